#include <doctest.h>

#include <cmath>

#include "cgem/seqmodel.hpp"
#include "test_helpers.hpp"

using namespace cgem;
using namespace cgem::seq;

namespace {

ModelArch small_arch(std::size_t d = 3, std::size_t m = 2, std::size_t H = 4) {
    ModelArch a;
    a.d = d;
    a.m = m;
    a.hidden = H;
    a.hx_width = 5;
    a.hy_width = 4;
    a.dropout_rate = 0.3;
    return a;
}

/// Direct per-dimension Gaussian density sum, written with the explicit
/// normal pdf rather than the nll expression.
double density_oracle(const EmulatorModel& model, const Matrix& x, const Matrix* y,
                      Objective objective) {
    const Matrix& target = objective == Objective::lowres ? x : *y;
    const double scale =
        std::exp(objective == Objective::lowres ? model.log_sigma() : model.log_rho());
    Matrix hs = encode_sequence(model, x);
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < x.rows; ++t) {
        auto h = hs.row_copy(t);
        auto pred = objective == Objective::lowres ? model.head_x(h) : model.head_y(h);
        for (std::size_t i = 0; i < target.cols; ++i) {
            const double r = target(t + 1, i) - target(t, i) - pred[i];
            const double pdf = 1.0 / (scale * std::sqrt(2.0 * 3.14159265358979323846)) *
                               std::exp(-r * r / (2.0 * scale * scale));
            total += -std::log(pdf);
        }
    }
    return total / static_cast<double>(x.rows - 1);
}

}  // namespace

TEST_SUITE("seqmodel") {

TEST_CASE("encode: zero weights keep the hidden state at zero") {
    EmulatorModel model(small_arch(), 3);
    cgem::test::zero_all_params(model);
    RngStream rng(5);
    Matrix x = cgem::test::random_matrix(6, 3, rng);
    Matrix hs = encode_sequence(model, x);
    for (double v : hs.data) CHECK(v == 0.0);
}

TEST_CASE("encode equals chained gru_forward calls") {
    EmulatorModel model(small_arch(), 7);
    RngStream rng(9);
    Matrix x = cgem::test::random_matrix(4, 3, rng);
    Matrix hs = encode_sequence(model, x);

    std::vector<double> h(model.arch().hidden, 0.0);
    for (std::size_t t = 0; t < 4; ++t) {
        h = nn::gru_forward(model.gru(), h, x.row_copy(t));
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(hs(t, i) == h[i]);
    }

    Matrix single(1, 3);
    std::copy(x.row(0), x.row(0) + 3, single.data.begin());
    Matrix hs1 = encode_sequence(model, single);
    CHECK(hs1.rows == 1);
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(hs1(0, i) == hs(0, i));
}

TEST_CASE("nll_lowres: zero head on a constant sequence is d * 0.5 log(2 pi)") {
    EmulatorModel model(small_arch(4, 2, 3), 11);
    cgem::test::zero_all_params(model);  // heads 0, log_sigma 0
    Matrix x(5, 4, 1.7);
    const double nll = nll_lowres(model, x);
    CHECK(nll == doctest::Approx(4 * 0.91893853320467274).epsilon(1e-12));
}

TEST_CASE("nll_lowres matches the density-formula oracle to 1e-12") {
    EmulatorModel model(small_arch(), 13);
    RngStream rng(17);
    Matrix x = cgem::test::random_matrix(10, 3, rng);
    const double got = nll_lowres(model, x);
    const double want = density_oracle(model, x, nullptr, Objective::lowres);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
}

TEST_CASE("nll_lowres over log_sigma is minimized at the RMS residual") {
    EmulatorModel model(small_arch(), 19);
    RngStream rng(23);
    Matrix x = cgem::test::random_matrix(12, 3, rng);

    // residuals of the current model
    ForwardOptions opts;
    WindowTrace trace = forward_window(model, x, nullptr, Objective::lowres, opts);
    double mean_sq = 0.0;
    std::size_t count = 0;
    for (const auto& r : trace.residuals)
        for (double v : r) {
            mean_sq += v * v;
            ++count;
        }
    mean_sq /= static_cast<double>(count);
    const double ls_star = 0.5 * std::log(mean_sq);

    auto nll_at = [&](double ls) {
        model.params().at("log_sigma").value.data[0] = ls;
        return nll_lowres(model, x);
    };
    const double at_star = nll_at(ls_star);
    for (double delta : {-0.1, 0.1, 0.3}) CHECK(nll_at(ls_star + delta) > at_star);
}

TEST_CASE("nll_highres: zero head on constant Y is d m * 0.5 log(2 pi)") {
    EmulatorModel model(small_arch(4, 3, 3), 29);
    cgem::test::zero_all_params(model);
    RngStream rng(31);
    Matrix x = cgem::test::random_matrix(5, 4, rng);
    Matrix y(5, 12, -0.3);
    const double nll = nll_highres(model, x, y);
    CHECK(nll == doctest::Approx(12 * 0.91893853320467274).epsilon(1e-12));
}

TEST_CASE("nll_highres matches the density oracle and ignores head_x") {
    EmulatorModel model(small_arch(), 37);
    RngStream rng(41);
    Matrix x = cgem::test::random_matrix(10, 3, rng);
    Matrix y = cgem::test::random_matrix(10, 6, rng);
    const double got = nll_highres(model, x, y);
    const double want = density_oracle(model, x, &y, Objective::highres);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));

    // gradients of the high-res objective w.r.t. head_x are exactly zero
    model.params().zero_grad();
    WindowTrace trace = forward_window(model, x, &y, Objective::highres, {});
    backward_window(model, trace, 1.0);
    for (const char* n : {"head_x.W1", "head_x.b1", "head_x.W2", "head_x.b2", "log_sigma"})
        for (double g : model.params().at(n).grad.data) CHECK(g == 0.0);
}

TEST_CASE("mismatched Y length is rejected") {
    EmulatorModel model(small_arch(), 43);
    Matrix x(6, 3), y(5, 6);
    CHECK_THROWS_AS((void)nll_highres(model, x, y), std::invalid_argument);
}

TEST_CASE("rollout: zero head, noise off repeats x0") {
    EmulatorModel model(small_arch(), 47);
    cgem::test::zero_head_x(model);
    std::vector<double> x0{0.4, -1.1, 2.2};
    RolloutConfig cfg;
    cfg.n_steps = 8;
    cfg.noise_on = false;
    auto out = rollout(model, x0, nullptr, cfg);
    REQUIRE(out.states.rows == 8);
    CHECK_FALSE(out.truncated);
    for (std::size_t t = 0; t < 8; ++t)
        for (std::size_t i = 0; i < 3; ++i) CHECK(out.states(t, i) == x0[i]);
}

TEST_CASE("rollout: zero head with unit noise is a random walk") {
    EmulatorModel model(small_arch(), 53);
    cgem::test::zero_head_x(model);  // log_sigma stays 0 => sigma = 1
    model.params().at("log_sigma").value.data[0] = 0.0;
    std::vector<double> x0{0.0, 0.0, 0.0};
    const std::size_t replicas = 10000, steps = 4;

    std::vector<std::vector<double>> sq_sum(steps, std::vector<double>(3, 0.0));
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        RolloutConfig cfg;
        cfg.n_steps = steps;
        cfg.noise_on = true;
        cfg.seed = 1000 + rep;
        auto out = rollout(model, x0, nullptr, cfg);
        for (std::size_t t = 0; t < steps; ++t)
            for (std::size_t i = 0; i < 3; ++i)
                sq_sum[t][i] += out.states(t, i) * out.states(t, i);
    }
    for (std::size_t t = 0; t < steps; ++t) {
        // pooled variance across d dims and replicas; mean is 0 by symmetry
        double var = 0.0;
        for (std::size_t i = 0; i < 3; ++i) var += sq_sum[t][i];
        var /= static_cast<double>(replicas * 3);
        const double want = static_cast<double>(t + 1);
        const double se = want * std::sqrt(2.0 / static_cast<double>(replicas * 3 - 1));
        CHECK(std::abs(var - want) <= 3.0 * se);
    }
}

TEST_CASE("rollout determinism and Y-independence") {
    EmulatorModel model(small_arch(), 59);
    std::vector<double> x0{0.1, 0.2, -0.3};
    RolloutConfig cfg;
    cfg.n_steps = 20;
    cfg.noise_on = true;
    cfg.seed = 77;
    auto a = rollout(model, x0, nullptr, cfg);
    auto b = rollout(model, x0, nullptr, cfg);
    CHECK(cgem::test::bitwise_equal(a.states, b.states));

    // corrupt the high-res head and noise scale; the rollout must not change
    model.params().at("head_y.W1").value.fill(1234.5);
    model.params().at("head_y.b2").value.fill(-99.0);
    model.params().at("log_rho").value.data[0] = 3.7;
    auto c = rollout(model, x0, nullptr, cfg);
    CHECK(cgem::test::bitwise_equal(a.states, c.states));
}

TEST_CASE("both objectives share the same hidden-state sequence") {
    EmulatorModel model(small_arch(), 61);
    RngStream rng(67);
    Matrix x = cgem::test::random_matrix(8, 3, rng);
    Matrix y = cgem::test::random_matrix(8, 6, rng);
    WindowTrace lo = forward_window(model, x, nullptr, Objective::lowres, {});
    WindowTrace hi = forward_window(model, x, &y, Objective::highres, {});
    REQUIRE(lo.hidden_states.size() == hi.hidden_states.size());
    for (std::size_t t = 0; t < lo.hidden_states.size(); ++t)
        CHECK(lo.hidden_states[t] == hi.hidden_states[t]);
}

TEST_CASE("mean per-step NLL is invariant under window duplication") {
    EmulatorModel model(small_arch(), 71);
    RngStream rng(73);
    Matrix x = cgem::test::random_matrix(9, 3, rng);
    WindowTrace w1 = forward_window(model, x, nullptr, Objective::lowres, {});
    WindowTrace w2 = forward_window(model, x, nullptr, Objective::lowres, {});
    const double doubled =
        (w1.total_nll + w2.total_nll) / static_cast<double>(w1.n_steps + w2.n_steps);
    CHECK(std::abs(doubled - nll_lowres(model, x)) <= 1e-9);
}

TEST_CASE("d nll / d log_sigma matches the closed form") {
    EmulatorModel model(small_arch(), 79);
    RngStream rng(83);
    Matrix x = cgem::test::random_matrix(10, 3, rng);

    model.params().zero_grad();
    WindowTrace trace = forward_window(model, x, nullptr, Objective::lowres, {});
    backward_window(model, trace, 1.0 / static_cast<double>(trace.n_steps));

    const double sigma_sq = std::exp(2.0 * model.log_sigma());
    double mean_sq_per_dim_sum = 0.0;  // sum over dims of mean_t residual^2
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (const auto& r : trace.residuals) s += r[i] * r[i];
        mean_sq_per_dim_sum += s / static_cast<double>(trace.n_steps);
    }
    const double closed_form = 3.0 - mean_sq_per_dim_sum / sigma_sq;
    CHECK(std::abs(model.params().at("log_sigma").grad.data[0] - closed_form) <= 1e-8);
}

TEST_CASE("full-model gradients agree with central finite differences") {
    for (unsigned objective = 0; objective < 2; ++objective) {
        EmulatorModel model(small_arch(), 89 + objective);
        RngStream rng(97);
        Matrix x = cgem::test::random_matrix(6, 3, rng);  // window of 5 transitions
        Matrix y = cgem::test::random_matrix(6, 6, rng);
        const Objective obj = objective == 0 ? Objective::lowres : Objective::highres;

        RngStream dropout_rng(101);
        ForwardOptions opts;
        opts.train_mode = true;
        opts.rng = &dropout_rng;
        WindowTrace trace =
            forward_window(model, x, obj == Objective::highres ? &y : nullptr, obj, opts);
        model.params().zero_grad();
        backward_window(model, trace, 1.0);

        auto loss = [&] {
            ForwardOptions replay;
            replay.replay_masks = &trace.drop_masks;
            WindowTrace t =
                forward_window(model, x, obj == Objective::highres ? &y : nullptr, obj, replay);
            return t.total_nll;
        };
        model.params().set_all_trainable(true);
        CHECK(nn::finite_diff_check(model.params(), loss) <= 1e-6);
    }
}

}  // TEST_SUITE
