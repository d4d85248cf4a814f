#include "cgem/seqmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace cgem::seq {

using nn::Activation;
using nn::DenseCache;
using nn::DropoutMode;

EmulatorModel::EmulatorModel(const ModelArch& arch, std::uint64_t init_seed) : arch_(arch) {
    require(arch.d >= 1 && arch.m >= 1 && arch.hidden >= 1, "EmulatorModel: bad architecture");
    require(arch.hx_width >= 1 && arch.hy_width >= 1, "EmulatorModel: bad head widths");

    nn::register_gru(store_, "gru", arch.d, arch.hidden);
    store_.add("head_x.W1", arch.hx_width, arch.hidden);
    store_.add("head_x.b1", arch.hx_width, 1);
    store_.add("head_x.W2", arch.d, arch.hx_width);
    store_.add("head_x.b2", arch.d, 1);
    store_.add("head_y.W1", arch.hy_width, arch.hidden);
    store_.add("head_y.b1", arch.hy_width, 1);
    store_.add("head_y.W2", arch.dm(), arch.hy_width);
    store_.add("head_y.b2", arch.dm(), 1);
    store_.add("log_sigma", 1, 1);
    store_.add("log_rho", 1, 1);

    RngStream rng(mix_seed({init_seed, 0x11217ULL}));
    for (nn::Param& p : store_.params()) {
        if (p.value.cols > 1) nn::init_glorot_uniform(p.value, rng);
        // biases and log-scales start at zero
    }
    standardizer = coarse::identity_standardizer(arch.d, arch.dm());
}

std::vector<double> EmulatorModel::head_x(const std::vector<double>& h) const {
    auto hidden = nn::dense_forward(store_.at("head_x.W1").value, store_.at("head_x.b1").value,
                                    Activation::tanh, h);
    return nn::dense_forward(store_.at("head_x.W2").value, store_.at("head_x.b2").value,
                             Activation::identity, hidden);
}

std::vector<double> EmulatorModel::head_y(const std::vector<double>& h) const {
    auto hidden = nn::dense_forward(store_.at("head_y.W1").value, store_.at("head_y.b1").value,
                                    Activation::tanh, h);
    return nn::dense_forward(store_.at("head_y.W2").value, store_.at("head_y.b2").value,
                             Activation::identity, hidden);
}

namespace {

struct HeadRefs {
    const Matrix *w1, *b1, *w2, *b2;
    const char* prefix;
};

HeadRefs head_refs(const nn::ParamStore& store, Objective obj) {
    const char* prefix = obj == Objective::lowres ? "head_x" : "head_y";
    std::string p(prefix);
    return {&store.at(p + ".W1").value, &store.at(p + ".b1").value, &store.at(p + ".W2").value,
            &store.at(p + ".b2").value, prefix};
}

}  // namespace

WindowTrace forward_window(const EmulatorModel& model, const Matrix& x, const Matrix* y,
                           Objective objective, const ForwardOptions& opts) {
    const ModelArch& arch = model.arch();
    require(x.cols == arch.d, "forward_window: X width mismatch");
    require(x.rows >= 2, "forward_window: need at least 2 states");
    if (objective == Objective::highres) {
        require(y != nullptr, "forward_window: high-res objective needs Y");
        require(y->rows == x.rows, "forward_window: X/Y length mismatch");
        require(y->cols == arch.dm(), "forward_window: Y width mismatch");
    }
    if (opts.train_mode && opts.replay_masks == nullptr)
        require(opts.rng != nullptr, "forward_window: train mode needs an rng");

    const nn::GruView gru = model.gru();
    const HeadRefs head = head_refs(model.params(), objective);
    const double log_scale = objective == Objective::lowres ? model.log_sigma() : model.log_rho();
    const Matrix& target = objective == Objective::lowres ? x : *y;

    WindowTrace trace;
    trace.objective = objective;
    trace.n_steps = x.rows - 1;
    trace.gru_steps.resize(trace.n_steps);
    trace.head_l1.resize(trace.n_steps);
    trace.head_l2.resize(trace.n_steps);
    trace.drop_masks.resize(trace.n_steps);
    trace.dropped_h.resize(trace.n_steps);
    trace.residuals.resize(trace.n_steps);
    trace.hidden_states.resize(trace.n_steps);

    std::vector<double> h(arch.hidden, 0.0);
    if (opts.h0) {
        require(opts.h0->size() == arch.hidden, "forward_window: h0 size mismatch");
        h = *opts.h0;
    }

    double total = 0.0;
    for (std::size_t t = 0; t < trace.n_steps; ++t) {
        h = nn::gru_forward(gru, h, x.row_copy(t), &trace.gru_steps[t]);
        trace.hidden_states[t] = h;

        std::vector<double> dropped;
        if (opts.replay_masks) {
            require(opts.replay_masks->size() == trace.n_steps,
                    "forward_window: replay mask count mismatch");
            trace.drop_masks[t] = (*opts.replay_masks)[t];
            dropped = nn::dropout_replay(h, trace.drop_masks[t]);
        } else {
            dropped = nn::dropout_forward(
                h, arch.dropout_rate, opts.train_mode ? DropoutMode::train : DropoutMode::eval,
                opts.rng, &trace.drop_masks[t]);
        }
        trace.dropped_h[t] = dropped;

        auto hidden = nn::dense_forward(*head.w1, *head.b1, Activation::tanh, dropped,
                                        &trace.head_l1[t]);
        auto pred = nn::dense_forward(*head.w2, *head.b2, Activation::identity, hidden,
                                      &trace.head_l2[t]);

        std::vector<double>& res = trace.residuals[t];
        res.resize(target.cols);
        const double* now = target.row(t);
        const double* next = target.row(t + 1);
        for (std::size_t i = 0; i < target.cols; ++i) res[i] = next[i] - now[i] - pred[i];
        total += nn::gaussian_nll(res, log_scale);
    }
    trace.total_nll = total;
    trace.h_final = h;
    return trace;
}

void backward_window(EmulatorModel& model, const WindowTrace& trace, double scale) {
    require(trace.n_steps > 0, "backward_window: forward pass not recorded");
    nn::ParamStore& store = model.params();
    const ModelArch& arch = model.arch();
    const nn::GruView gru = model.gru();
    const nn::GruGrads grads = nn::gru_grads(store, "gru");
    const HeadRefs head = head_refs(store, trace.objective);
    const std::string hp(head.prefix);
    Matrix& dw1 = store.at(hp + ".W1").grad;
    Matrix& db1 = store.at(hp + ".b1").grad;
    Matrix& dw2 = store.at(hp + ".W2").grad;
    Matrix& db2 = store.at(hp + ".b2").grad;
    const std::string scale_name = trace.objective == Objective::lowres ? "log_sigma" : "log_rho";
    const double log_scale = store.at(scale_name).value.data[0];
    double& d_log_scale = store.at(scale_name).grad.data[0];

    std::vector<double> dh_next(arch.hidden, 0.0);
    for (std::size_t t = trace.n_steps; t-- > 0;) {
        const std::vector<double>& res = trace.residuals[t];
        std::vector<double> d_res(res.size());
        nn::gaussian_nll_backward(res.data(), res.size(), log_scale, scale, d_res.data(),
                                  d_log_scale);
        // residual = target_diff - prediction
        std::vector<double> d_pred(res.size());
        for (std::size_t i = 0; i < res.size(); ++i) d_pred[i] = -d_res[i];

        auto d_hidden = nn::dense_backward(*head.w2, Activation::identity, trace.head_l2[t],
                                           d_pred, dw2, db2);
        auto d_dropped = nn::dense_backward(*head.w1, Activation::tanh, trace.head_l1[t],
                                            d_hidden, dw1, db1);

        std::vector<double> dh(arch.hidden);
        const std::vector<double>& mask = trace.drop_masks[t];
        for (std::size_t i = 0; i < arch.hidden; ++i)
            dh[i] = d_dropped[i] * mask[i] + dh_next[i];

        dh_next = nn::gru_backward(gru, grads, trace.gru_steps[t], dh);
    }
}

Matrix encode_sequence(const EmulatorModel& model, const Matrix& x,
                       const std::vector<double>* h0) {
    const ModelArch& arch = model.arch();
    require(x.cols == arch.d, "encode_sequence: X width mismatch");
    std::vector<double> h(arch.hidden, 0.0);
    if (h0) {
        require(h0->size() == arch.hidden, "encode_sequence: h0 size mismatch");
        h = *h0;
    }
    const nn::GruView gru = model.gru();
    Matrix out(x.rows, arch.hidden);
    for (std::size_t t = 0; t < x.rows; ++t) {
        h = nn::gru_forward(gru, h, x.row_copy(t));
        std::copy(h.begin(), h.end(), out.row(t));
    }
    return out;
}

double nll_lowres(const EmulatorModel& model, const Matrix& x, bool train_mode, RngStream* rng) {
    require(x.rows >= 2, "nll_lowres: need at least 2 states");
    ForwardOptions opts;
    opts.train_mode = train_mode;
    opts.rng = rng;
    WindowTrace trace = forward_window(model, x, nullptr, Objective::lowres, opts);
    return trace.total_nll / static_cast<double>(trace.n_steps);
}

double nll_highres(const EmulatorModel& model, const Matrix& x, const Matrix& y, bool train_mode,
                   RngStream* rng) {
    require(x.rows >= 2, "nll_highres: need at least 2 states");
    require(y.rows == x.rows, "nll_highres: X/Y length mismatch");
    ForwardOptions opts;
    opts.train_mode = train_mode;
    opts.rng = rng;
    WindowTrace trace = forward_window(model, x, &y, Objective::highres, opts);
    return trace.total_nll / static_cast<double>(trace.n_steps);
}

ChunkNll nll_lowres_chunk(const EmulatorModel& model, const Matrix& x,
                          const std::vector<double>* h0) {
    ForwardOptions opts;
    opts.h0 = h0;
    WindowTrace trace = forward_window(model, x, nullptr, Objective::lowres, opts);
    return ChunkNll{trace.total_nll, trace.n_steps, trace.h_final};
}

RolloutResult rollout(const EmulatorModel& model, const std::vector<double>& x0_physical,
                      const std::vector<double>* h0, const RolloutConfig& cfg) {
    const ModelArch& arch = model.arch();
    require(cfg.n_steps >= 1, "rollout: n_steps must be >= 1");
    require(x0_physical.size() == arch.d, "rollout: x0 width mismatch");

    std::vector<double> x(x0_physical);
    model.standardizer.apply_x_row(x.data());

    std::vector<double> h(arch.hidden, 0.0);
    if (h0) {
        require(h0->size() == arch.hidden, "rollout: h0 size mismatch");
        h = *h0;
    }

    const nn::GruView gru = model.gru();
    const double sigma = std::exp(model.log_sigma());
    RngStream noise(mix_seed({cfg.seed, 0x9011ULL}));

    RolloutResult out;
    out.states = Matrix(cfg.n_steps, arch.d);
    for (std::size_t t = 0; t < cfg.n_steps; ++t) {
        h = nn::gru_forward(gru, h, x);
        auto inc = model.head_x(h);
        for (std::size_t i = 0; i < arch.d; ++i) {
            x[i] += inc[i];
            if (cfg.noise_on) x[i] += sigma * noise.normal();
        }
        if (!all_finite(x)) {
            out.truncated = true;
            out.states.rows = t;
            out.states.data.resize(t * arch.d);
            return out;
        }
        double* dst = out.states.row(t);
        std::copy(x.begin(), x.end(), dst);
        model.standardizer.invert_x_row(dst);
        out.steps_completed = t + 1;
    }
    return out;
}

}  // namespace cgem::seq
