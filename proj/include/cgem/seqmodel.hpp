#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cgem/coarsegrain.hpp"
#include "cgem/matrix.hpp"
#include "cgem/neuralnet.hpp"
#include "cgem/rng.hpp"

namespace cgem::seq {

using coarse::Standardizer;

struct ModelArch {
    std::size_t d = 0;         // low-res width
    std::size_t m = 0;         // refinement; high-res width is d*m
    std::size_t hidden = 0;    // GRU width
    std::size_t hx_width = 0;  // hidden layer width of the low-res head
    std::size_t hy_width = 0;  // hidden layer width of the high-res head
    double dropout_rate = 0.3;

    std::size_t dm() const { return d * m; }
};

/// Shared-trunk probabilistic emulator: a GRU driven by the low-res state,
/// one dense head predicting the low-res increment and one predicting the
/// high-res increment, each with its own learned noise scale.
class EmulatorModel {
  public:
    EmulatorModel(const ModelArch& arch, std::uint64_t init_seed);

    const ModelArch& arch() const { return arch_; }
    nn::ParamStore& params() { return store_; }
    const nn::ParamStore& params() const { return store_; }

    Standardizer standardizer;  // physical <-> standardized conversion

    nn::GruView gru() const { return nn::gru_view(store_, "gru"); }
    double log_sigma() const { return store_.at("log_sigma").value.data[0]; }
    double log_rho() const { return store_.at("log_rho").value.data[0]; }

    /// Increment predicted by the low-res head from a (possibly dropped-out)
    /// hidden state.
    std::vector<double> head_x(const std::vector<double>& h) const;
    std::vector<double> head_y(const std::vector<double>& h) const;

  private:
    ModelArch arch_;
    nn::ParamStore store_;
};

enum class Objective { lowres, highres };

/// Per-window forward record: everything backward_window needs, including
/// dropout masks so a loss can be re-evaluated deterministically.
struct WindowTrace {
    Objective objective = Objective::lowres;
    std::size_t n_steps = 0;
    double total_nll = 0.0;
    std::vector<nn::GruStepCache> gru_steps;
    std::vector<nn::DenseCache> head_l1, head_l2;
    std::vector<std::vector<double>> drop_masks;
    std::vector<std::vector<double>> dropped_h;
    std::vector<std::vector<double>> residuals;
    std::vector<double> h_final;
    std::vector<std::vector<double>> hidden_states;  // h_1..h_T
};

struct ForwardOptions {
    bool train_mode = false;                                   // dropout active
    RngStream* rng = nullptr;                                  // required in train mode
    const std::vector<std::vector<double>>* replay_masks = nullptr;  // fixed masks
    const std::vector<double>* h0 = nullptr;                   // defaults to zeros
};

/// Teacher-forced pass over a window of T states (T-1 scored transitions).
/// For the high-res objective, Y must be aligned with X.
WindowTrace forward_window(const EmulatorModel& model, const Matrix& x, const Matrix* y,
                           Objective objective, const ForwardOptions& opts = {});

/// Accumulates gradients of scale * total_nll into the model's ParamStore.
void backward_window(EmulatorModel& model, const WindowTrace& trace, double scale);

/// Hidden-state sequence h_1..h_T from a standardized input sequence.
Matrix encode_sequence(const EmulatorModel& model, const Matrix& x,
                       const std::vector<double>* h0 = nullptr);

/// Mean per-step NLL of the low-res sequence under Eq.-style teacher forcing.
double nll_lowres(const EmulatorModel& model, const Matrix& x, bool train_mode = false,
                  RngStream* rng = nullptr);

double nll_highres(const EmulatorModel& model, const Matrix& x, const Matrix& y,
                   bool train_mode = false, RngStream* rng = nullptr);

/// As nll_lowres but chunk-friendly: starts from h0, returns the final
/// hidden state and the total (not mean) NLL with the transition count.
struct ChunkNll {
    double total = 0.0;
    std::size_t steps = 0;
    std::vector<double> h_final;
};
ChunkNll nll_lowres_chunk(const EmulatorModel& model, const Matrix& x,
                          const std::vector<double>* h0);

struct RolloutConfig {
    std::size_t n_steps = 1;
    bool noise_on = true;
    std::uint64_t seed = 0;
};

struct RolloutResult {
    Matrix states;  // [n_steps x d], physical units
    bool truncated = false;
    std::size_t steps_completed = 0;
};

/// Free-running generation: h' = f(h, x); x' = x + g(h') + sigma * z.
/// Input x0 is in physical units; the iteration runs in standardized space
/// and the returned states are converted back. Never touches the high-res
/// head. Non-finite states truncate the rollout and set the flag.
RolloutResult rollout(const EmulatorModel& model, const std::vector<double>& x0_physical,
                      const std::vector<double>* h0, const RolloutConfig& cfg);

}  // namespace cgem::seq
