#include "cgem/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace cgem::nn {

namespace {

// y += M x
void matvec_acc(const Matrix& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) sum += row[c] * x[c];
        y[r] += sum;
    }
}

// y += M^T x
void matvec_t_acc(const Matrix& m, const double* x, double* y) {
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
}

// G += y x^T
void outer_acc(Matrix& g, const double* y, const double* x) {
    for (std::size_t r = 0; r < g.rows; ++r) {
        double* row = g.data.data() + r * g.cols;
        const double yr = y[r];
        for (std::size_t c = 0; c < g.cols; ++c) row[c] += yr * x[c];
    }
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

Param& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
    require(!has(name), "ParamStore: duplicate tensor name " + name);
    Param p;
    p.name = name;
    p.value = Matrix(rows, cols);
    p.grad = Matrix(rows, cols);
    p.adam_m = Matrix(rows, cols);
    p.adam_v = Matrix(rows, cols);
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return params_.back();
}

Param& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    require(it != index_.end(), "ParamStore: unknown tensor " + name);
    return params_[it->second];
}

const Param& ParamStore::at(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), "ParamStore: unknown tensor " + name);
    return params_[it->second];
}

void ParamStore::zero_grad() {
    for (Param& p : params_) p.grad.fill(0.0);
}

void ParamStore::set_trainable(const std::string& name, bool trainable) {
    at(name).trainable = trainable;
}

void ParamStore::set_all_trainable(bool trainable) {
    for (Param& p : params_) p.trainable = trainable;
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for (const Param& p : params_) n += p.value.size();
    return n;
}

void ParamStore::reset_optimizer() {
    for (Param& p : params_) {
        p.adam_m.fill(0.0);
        p.adam_v.fill(0.0);
    }
    adam_step_ = 0;
}

std::uint64_t ParamStore::value_checksum(const std::string& name) const {
    const Param& p = at(name);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over raw bits
    for (double v : p.value.data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::vector<double> ParamStore::snapshot_values() const {
    std::vector<double> out;
    for (const Param& p : params_) out.insert(out.end(), p.value.data.begin(), p.value.data.end());
    return out;
}

void ParamStore::restore_values(const std::vector<double>& snapshot) {
    std::size_t off = 0;
    for (Param& p : params_) {
        require(off + p.value.size() <= snapshot.size(), "restore_values: snapshot too short");
        std::copy(snapshot.begin() + off, snapshot.begin() + off + p.value.size(),
                  p.value.data.begin());
        off += p.value.size();
    }
    require(off == snapshot.size(), "restore_values: snapshot length mismatch");
}

void init_glorot_uniform(Matrix& w, RngStream& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    for (double& v : w.data) v = rng.uniform(-bound, bound);
}

void register_gru(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                  std::size_t hidden_dim) {
    for (const char* gate : {"z", "r", "c"}) {
        store.add(prefix + ".W" + gate, hidden_dim, input_dim);
        store.add(prefix + ".U" + gate, hidden_dim, hidden_dim);
        store.add(prefix + ".b" + gate, hidden_dim, 1);
    }
}

GruView gru_view(const ParamStore& store, const std::string& prefix) {
    return GruView{&store.at(prefix + ".Wz").value, &store.at(prefix + ".Uz").value,
                   &store.at(prefix + ".bz").value, &store.at(prefix + ".Wr").value,
                   &store.at(prefix + ".Ur").value, &store.at(prefix + ".br").value,
                   &store.at(prefix + ".Wc").value, &store.at(prefix + ".Uc").value,
                   &store.at(prefix + ".bc").value};
}

GruGrads gru_grads(ParamStore& store, const std::string& prefix) {
    return GruGrads{&store.at(prefix + ".Wz").grad, &store.at(prefix + ".Uz").grad,
                    &store.at(prefix + ".bz").grad, &store.at(prefix + ".Wr").grad,
                    &store.at(prefix + ".Ur").grad, &store.at(prefix + ".br").grad,
                    &store.at(prefix + ".Wc").grad, &store.at(prefix + ".Uc").grad,
                    &store.at(prefix + ".bc").grad};
}

std::vector<double> gru_forward(const GruView& p, const std::vector<double>& h,
                                const std::vector<double>& x, GruStepCache* cache) {
    const std::size_t hd = p.hidden();
    require(h.size() == hd, "gru_forward: hidden state size mismatch");
    require(x.size() == p.input(), "gru_forward: input size mismatch");

    std::vector<double> z(p.bz->data), r(p.br->data), a_c(p.bc->data);
    matvec_acc(*p.wz, x.data(), z.data());
    matvec_acc(*p.uz, h.data(), z.data());
    matvec_acc(*p.wr, x.data(), r.data());
    matvec_acc(*p.ur, h.data(), r.data());
    for (std::size_t i = 0; i < hd; ++i) {
        z[i] = sigmoid(z[i]);
        r[i] = sigmoid(r[i]);
    }
    std::vector<double> rh(hd);
    for (std::size_t i = 0; i < hd; ++i) rh[i] = r[i] * h[i];
    matvec_acc(*p.wc, x.data(), a_c.data());
    matvec_acc(*p.uc, rh.data(), a_c.data());
    std::vector<double> hcand(hd), h_new(hd);
    for (std::size_t i = 0; i < hd; ++i) {
        hcand[i] = std::tanh(a_c[i]);
        h_new[i] = (1.0 - z[i]) * h[i] + z[i] * hcand[i];
    }
    if (cache) {
        cache->x = x;
        cache->h_prev = h;
        cache->z = z;
        cache->r = r;
        cache->rh = rh;
        cache->hcand = hcand;
        cache->h_new = h_new;
    }
    return h_new;
}

std::vector<double> gru_backward(const GruView& p, const GruGrads& g, const GruStepCache& cache,
                                 const std::vector<double>& dh_new, std::vector<double>* dx_out) {
    const std::size_t hd = p.hidden();
    const std::size_t xd = p.input();
    require(dh_new.size() == hd, "gru_backward: upstream gradient size mismatch");

    std::vector<double> dz(hd), dhcand(hd), dh_prev(hd);
    for (std::size_t i = 0; i < hd; ++i) {
        dz[i] = dh_new[i] * (cache.hcand[i] - cache.h_prev[i]);
        dhcand[i] = dh_new[i] * cache.z[i];
        dh_prev[i] = dh_new[i] * (1.0 - cache.z[i]);
    }

    std::vector<double> dx(xd, 0.0);

    // candidate branch
    std::vector<double> da_c(hd);
    for (std::size_t i = 0; i < hd; ++i)
        da_c[i] = dhcand[i] * (1.0 - cache.hcand[i] * cache.hcand[i]);
    outer_acc(*g.wc, da_c.data(), cache.x.data());
    outer_acc(*g.uc, da_c.data(), cache.rh.data());
    for (std::size_t i = 0; i < hd; ++i) g.bc->data[i] += da_c[i];
    std::vector<double> drh(hd, 0.0);
    matvec_t_acc(*p.uc, da_c.data(), drh.data());
    matvec_t_acc(*p.wc, da_c.data(), dx.data());
    std::vector<double> dr(hd);
    for (std::size_t i = 0; i < hd; ++i) {
        dr[i] = drh[i] * cache.h_prev[i];
        dh_prev[i] += drh[i] * cache.r[i];
    }

    // reset gate
    std::vector<double> da_r(hd);
    for (std::size_t i = 0; i < hd; ++i) da_r[i] = dr[i] * cache.r[i] * (1.0 - cache.r[i]);
    outer_acc(*g.wr, da_r.data(), cache.x.data());
    outer_acc(*g.ur, da_r.data(), cache.h_prev.data());
    for (std::size_t i = 0; i < hd; ++i) g.br->data[i] += da_r[i];
    matvec_t_acc(*p.ur, da_r.data(), dh_prev.data());
    matvec_t_acc(*p.wr, da_r.data(), dx.data());

    // update gate
    std::vector<double> da_z(hd);
    for (std::size_t i = 0; i < hd; ++i) da_z[i] = dz[i] * cache.z[i] * (1.0 - cache.z[i]);
    outer_acc(*g.wz, da_z.data(), cache.x.data());
    outer_acc(*g.uz, da_z.data(), cache.h_prev.data());
    for (std::size_t i = 0; i < hd; ++i) g.bz->data[i] += da_z[i];
    matvec_t_acc(*p.uz, da_z.data(), dh_prev.data());
    matvec_t_acc(*p.wz, da_z.data(), dx.data());

    if (dx_out) *dx_out = std::move(dx);
    return dh_prev;
}

std::vector<double> dense_forward(const Matrix& w, const Matrix& b, Activation act,
                                  const std::vector<double>& x, DenseCache* cache) {
    require(x.size() == w.cols, "dense_forward: input size mismatch");
    require(b.rows == w.rows && b.cols == 1, "dense_forward: bias shape mismatch");
    std::vector<double> y(b.data);
    matvec_acc(w, x.data(), y.data());
    if (act == Activation::tanh)
        for (double& v : y) v = std::tanh(v);
    if (cache) {
        cache->x = x;
        cache->y = y;
    }
    return y;
}

std::vector<double> dense_backward(const Matrix& w, Activation act, const DenseCache& cache,
                                   const std::vector<double>& dy, Matrix& dw, Matrix& db) {
    require(dy.size() == w.rows, "dense_backward: upstream gradient size mismatch");
    std::vector<double> da(dy);
    if (act == Activation::tanh)
        for (std::size_t i = 0; i < da.size(); ++i) da[i] *= 1.0 - cache.y[i] * cache.y[i];
    outer_acc(dw, da.data(), cache.x.data());
    for (std::size_t i = 0; i < da.size(); ++i) db.data[i] += da[i];
    std::vector<double> dx(w.cols, 0.0);
    matvec_t_acc(w, da.data(), dx.data());
    return dx;
}

std::vector<double> dropout_forward(const std::vector<double>& x, double rate, DropoutMode mode,
                                    RngStream* rng, std::vector<double>* mask) {
    require(rate >= 0.0 && rate < 1.0, "dropout_forward: rate must be in [0, 1)");
    if (mode == DropoutMode::eval || rate == 0.0) {
        if (mask) mask->assign(x.size(), 1.0);
        return x;
    }
    require(rng != nullptr, "dropout_forward: train mode needs an rng");
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<double> m(x.size());
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m[i] = rng->uniform() < rate ? 0.0 : keep_scale;
        y[i] = x[i] * m[i];
    }
    if (mask) *mask = std::move(m);
    return y;
}

std::vector<double> dropout_replay(const std::vector<double>& x, const std::vector<double>& mask) {
    require(x.size() == mask.size(), "dropout_replay: mask size mismatch");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask[i];
    return y;
}

double gaussian_nll(const double* residual, std::size_t n, double log_scale) {
    require(n >= 1, "gaussian_nll: empty residual");
    constexpr double half_log_2pi = 0.5 * 1.8378770664093453;  // log(2*pi)
    const double inv_var = std::exp(-2.0 * log_scale);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(residual[i]))
            throw std::invalid_argument("gaussian_nll: non-finite residual");
        sum_sq += residual[i] * residual[i];
    }
    return static_cast<double>(n) * (half_log_2pi + log_scale) + 0.5 * sum_sq * inv_var;
}

double gaussian_nll(const std::vector<double>& residual, double log_scale) {
    return gaussian_nll(residual.data(), residual.size(), log_scale);
}

void gaussian_nll_backward(const double* residual, std::size_t n, double log_scale,
                           double upstream, double* d_residual, double& d_log_scale) {
    const double inv_var = std::exp(-2.0 * log_scale);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d_residual[i] = upstream * residual[i] * inv_var;
        sum_sq += residual[i] * residual[i];
    }
    d_log_scale += upstream * (static_cast<double>(n) - sum_sq * inv_var);
}

void adam_update(ParamStore& store, const AdamConfig& cfg) {
    store.set_adam_step(store.adam_step() + 1);
    const double t = static_cast<double>(store.adam_step());
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (Param& p : store.params()) {
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad.data[i];
            p.adam_m.data[i] = cfg.beta1 * p.adam_m.data[i] + (1.0 - cfg.beta1) * g;
            p.adam_v.data[i] = cfg.beta2 * p.adam_v.data[i] + (1.0 - cfg.beta2) * g * g;
            const double m_hat = p.adam_m.data[i] / bc1;
            const double v_hat = p.adam_v.data[i] / bc2;
            p.value.data[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

double finite_diff_check(ParamStore& store, const std::function<double()>& loss, double step) {
    // Denominator floor: below it, differences are judged on absolute scale.
    constexpr double floor = 1e-2;
    double worst = 0.0;
    for (Param& p : store.params()) {
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value.data[i];
            p.value.data[i] = saved + step;
            const double up = loss();
            p.value.data[i] = saved - step;
            const double down = loss();
            p.value.data[i] = saved;
            const double fd = (up - down) / (2.0 * step);
            const double bp = p.grad.data[i];
            const double rel = std::abs(fd - bp) / std::max({std::abs(fd), std::abs(bp), floor});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace cgem::nn
