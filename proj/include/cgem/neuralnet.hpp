#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgem/matrix.hpp"
#include "cgem/rng.hpp"

namespace cgem::nn {

/// One named parameter tensor with its gradient and Adam moments.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;
    bool trainable = true;
};

/// Ordered collection of named tensors. Iteration follows registration
/// order, which keeps initialization and serialization deterministic.
class ParamStore {
  public:
    Param& add(const std::string& name, std::size_t rows, std::size_t cols);
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    std::deque<Param>& params() { return params_; }
    const std::deque<Param>& params() const { return params_; }

    void zero_grad();
    void set_trainable(const std::string& name, bool trainable);
    void set_all_trainable(bool trainable);

    std::size_t parameter_count() const;

    std::size_t adam_step() const { return adam_step_; }
    void set_adam_step(std::size_t s) { adam_step_ = s; }
    /// Clears moments and the step counter (fresh optimizer state).
    void reset_optimizer();

    /// Bitwise checksum of a tensor's values, for freeze-contract tests.
    std::uint64_t value_checksum(const std::string& name) const;

    std::vector<double> snapshot_values() const;
    void restore_values(const std::vector<double>& snapshot);

  private:
    std::deque<Param> params_;  // stable references across add()
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t adam_step_ = 0;
};

/// Glorot-uniform fill, U(+-sqrt(6/(fan_in+fan_out))).
void init_glorot_uniform(Matrix& w, RngStream& rng);

// ---- GRU cell ----
// Convention: z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// hcand = tanh(Wc x + Uc (r.h) + bc), h' = (1-z).h + z.hcand.

/// Non-owning view of the nine GRU tensors inside a ParamStore.
struct GruView {
    const Matrix *wz, *uz, *bz;
    const Matrix *wr, *ur, *br;
    const Matrix *wc, *uc, *bc;
    std::size_t hidden() const { return wz->rows; }
    std::size_t input() const { return wz->cols; }
};

struct GruGrads {
    Matrix *wz, *uz, *bz;
    Matrix *wr, *ur, *br;
    Matrix *wc, *uc, *bc;
};

/// Registers W/U/b tensors for the three gates under `prefix`.
void register_gru(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                  std::size_t hidden_dim);
GruView gru_view(const ParamStore& store, const std::string& prefix);
GruGrads gru_grads(ParamStore& store, const std::string& prefix);

struct GruStepCache {
    std::vector<double> x, h_prev, z, r, rh, hcand, h_new;
};

std::vector<double> gru_forward(const GruView& p, const std::vector<double>& h,
                                const std::vector<double>& x, GruStepCache* cache = nullptr);

/// Accumulates parameter gradients for one step given dL/dh_new; returns
/// dL/dh_prev. dx_out, when non-null, receives dL/dx.
std::vector<double> gru_backward(const GruView& p, const GruGrads& g, const GruStepCache& cache,
                                 const std::vector<double>& dh_new,
                                 std::vector<double>* dx_out = nullptr);

// ---- Dense layer ----

enum class Activation { identity, tanh };

struct DenseCache {
    std::vector<double> x, y;  // y is post-activation
};

std::vector<double> dense_forward(const Matrix& w, const Matrix& b, Activation act,
                                  const std::vector<double>& x, DenseCache* cache = nullptr);

/// Given dL/dy, accumulates dW/db and returns dL/dx.
std::vector<double> dense_backward(const Matrix& w, Activation act, const DenseCache& cache,
                                   const std::vector<double>& dy, Matrix& dw, Matrix& db);

// ---- Dropout ----

enum class DropoutMode { eval, train };

/// Inverted dropout. In train mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate); the mask (0 or the scale
/// factor) is written to `mask` for backprop and replay.
std::vector<double> dropout_forward(const std::vector<double>& x, double rate, DropoutMode mode,
                                    RngStream* rng, std::vector<double>* mask);

std::vector<double> dropout_replay(const std::vector<double>& x, const std::vector<double>& mask);

// ---- Gaussian negative log-likelihood ----

/// Sum over dimensions of the per-step negative log-density,
/// 0.5*log(2*pi) + log_scale + r_i^2 / (2*exp(2*log_scale)).
double gaussian_nll(const std::vector<double>& residual, double log_scale);
double gaussian_nll(const double* residual, std::size_t n, double log_scale);

/// d(nll)/d(residual_i) and d(nll)/d(log_scale) for the same expression.
void gaussian_nll_backward(const double* residual, std::size_t n, double log_scale,
                           double upstream, double* d_residual, double& d_log_scale);

// ---- Adam ----

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam over the trainable tensors of the store. Frozen
/// tensors are left untouched, values and moments alike.
void adam_update(ParamStore& store, const AdamConfig& cfg);

// ---- Finite-difference verification ----

/// Central differences per trainable parameter against the gradients already
/// stored in `store.grad`. `loss` must be deterministic (dropout masks held
/// fixed by the caller). Relative error uses a small denominator floor so
/// near-zero gradients are compared absolutely.
double finite_diff_check(ParamStore& store, const std::function<double()>& loss,
                         double step = 1e-5);

}  // namespace cgem::nn
