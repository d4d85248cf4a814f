// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 6 and 7 run the full desk-scale L96 pipeline.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "cgem/commands.hpp"
#include "cgem/dataset_io.hpp"
#include "cgem/evaluation.hpp"
#include "cgem/model_io.hpp"
#include "cgem/rng.hpp"

namespace fs = std::filesystem;
using namespace cgem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_gradients() {
    const double t0 = now_seconds();
    struct Case {
        const char* name;
        seq::ModelArch arch;
    };
    // Table-2 shapes at reduced width: KS-like, Brusselator-like, L96-like.
    std::vector<Case> cases;
    cases.push_back({"ks-like", {4, 4, 8, 8, 16, 0.3}});
    cases.push_back({"brusselator-like", {8, 4, 8, 8, 8, 0.3}});
    cases.push_back({"l96-like", {8, 4, 8, 8, 4, 0.3}});

    double worst = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        seq::EmulatorModel model(cases[c].arch, 1000 + c);
        RngStream data_rng(2000 + c);
        Matrix x(6, cases[c].arch.d);
        Matrix y(6, cases[c].arch.dm());
        for (double& v : x.data) v = data_rng.uniform(-1, 1);
        for (double& v : y.data) v = data_rng.uniform(-1, 1);

        for (seq::Objective obj : {seq::Objective::lowres, seq::Objective::highres}) {
            const Matrix* yp = obj == seq::Objective::highres ? &y : nullptr;
            RngStream dropout_rng(3000 + c);
            seq::ForwardOptions opts;
            opts.train_mode = true;
            opts.rng = &dropout_rng;
            seq::WindowTrace trace = seq::forward_window(model, x, yp, obj, opts);
            model.params().zero_grad();
            seq::backward_window(model, trace, 1.0);
            auto loss = [&] {
                seq::ForwardOptions replay;
                replay.replay_masks = &trace.drop_masks;
                return seq::forward_window(model, x, yp, obj, replay).total_nll;
            };
            model.params().set_all_trainable(true);
            worst = std::max(worst, nn::finite_diff_check(model.params(), loss));
        }
    }
    const double dt = now_seconds() - t0;
    return {worst <= 1e-6 && dt < 60.0,
            "max relative error " + fmt(worst) + " (limit 1e-6), " + fmt(dt) + "s"};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_simulators() {
    std::string detail;

    // derivative oracles on reduced grids (independent loop transcriptions)
    double worst = 0.0;
    {
        dynsys::KsSpec ks;
        ks.grid_points = 32;
        RngStream rng(11);
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> u(ks.grid_points);
            for (double& v : u) v = rng.uniform(-2, 2);
            auto got = dynsys::derivative_ks(u, ks);
            const double dx = ks.dx();
            auto at = [&](long i) {
                return u[static_cast<std::size_t>(((i % 32) + 32) % 32)];
            };
            for (long i = 0; i < 32; ++i) {
                const double want =
                    -ks.nu * (at(i + 2) - 4 * at(i + 1) + 6 * at(i) - 4 * at(i - 1) + at(i - 2)) /
                        (dx * dx * dx * dx) -
                    (at(i + 1) - 2 * at(i) + at(i - 1)) / (dx * dx) -
                    at(i) * (at(i + 1) - at(i - 1)) / (2 * dx);
                worst = std::max(worst, std::abs(got[static_cast<std::size_t>(i)] - want) /
                                            std::max(1.0, std::abs(want)));
            }
        }
    }
    {
        dynsys::BrusselatorSpec br;
        br.side = 8;
        RngStream rng(13);
        const long n = 8;
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> state(br.state_dim());
            for (double& v : state) v = rng.uniform(0, 3);
            auto got = dynsys::derivative_brusselator(state, br);
            auto wrap = [n](long i) { return ((i % n) + n) % n; };
            auto u = [&](long r, long c) { return state[wrap(r) * n + wrap(c)]; };
            auto v = [&](long r, long c) { return state[n * n + wrap(r) * n + wrap(c)]; };
            for (long r = 0; r < n; ++r)
                for (long c = 0; c < n; ++c) {
                    const double lap_u =
                        u(r - 1, c) + u(r + 1, c) + u(r, c - 1) + u(r, c + 1) - 4 * u(r, c);
                    const double lap_v =
                        v(r - 1, c) + v(r + 1, c) + v(r, c - 1) + v(r, c + 1) - 4 * v(r, c);
                    const double want_u = br.d0 * lap_u + br.a - (1 + br.b) * u(r, c) +
                                          v(r, c) * u(r, c) * u(r, c);
                    const double want_v =
                        br.d1 * lap_v + br.b * u(r, c) - v(r, c) * u(r, c) * u(r, c);
                    worst = std::max(worst, std::abs(got[r * n + c] - want_u) /
                                                std::max(1.0, std::abs(want_u)));
                    worst = std::max(worst, std::abs(got[n * n + r * n + c] - want_v) /
                                                std::max(1.0, std::abs(want_v)));
                }
        }
    }
    {
        dynsys::L96Spec sp;
        sp.slow_count = 4;
        sp.fast_per_slow = 3;
        RngStream rng(17);
        const long K = 4, J = 3, M = K * J;
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> state(sp.state_dim());
            for (double& v : state) v = rng.uniform(-5, 5);
            auto got = dynsys::derivative_l96(state, sp);
            auto X = [&](long k) { return state[((k - 1 + 8 * K) % K)]; };
            auto Y = [&](long g) { return state[K + ((g - 1 + 8 * M) % M)]; };
            const double hc_b = sp.coupling_h * sp.timescale_c / sp.scale_b;
            for (long k = 1; k <= K; ++k) {
                double sum = 0.0;
                for (long j = J * (k - 1) + 1; j <= k * J; ++j) sum += Y(j);
                const double want =
                    -X(k - 1) * (X(k - 2) - X(k + 1)) - X(k) + sp.forcing_f - hc_b * sum;
                worst = std::max(worst,
                                 std::abs(got[k - 1] - want) / std::max(1.0, std::abs(want)));
                for (long j = 1; j <= J; ++j) {
                    const long g = (k - 1) * J + j;
                    const double want_y =
                        -sp.timescale_c * sp.scale_b * Y(g + 1) * (Y(g + 2) - Y(g - 1)) -
                        sp.timescale_c * Y(g) - hc_b * X(k);
                    worst = std::max(worst, std::abs(got[K + g - 1] - want_y) /
                                                std::max(1.0, std::abs(want_y)));
                }
            }
        }
    }
    if (worst > 1e-12) return {false, "derivative oracle mismatch " + fmt(worst)};
    detail += "oracles " + fmt(worst);

    // Brusselator fixed point under 1000 Euler steps
    {
        dynsys::BrusselatorSpec br;
        br.side = 16;
        std::vector<double> state(br.state_dim());
        for (std::size_t i = 0; i < br.cells(); ++i) state[i] = br.a;
        for (std::size_t i = 0; i < br.cells(); ++i) state[br.cells() + i] = br.b / br.a;
        auto deriv = [&br](const double* in, double* out) {
            dynsys::derivative_brusselator(in, out, br);
        };
        for (int s = 0; s < 1000; ++s) dynsys::step_euler(deriv, state, br.dt_solver);
        double drift = 0.0;
        for (std::size_t i = 0; i < br.cells(); ++i) {
            drift = std::max(drift, std::abs(state[i] - br.a));
            drift = std::max(drift, std::abs(state[br.cells() + i] - br.b / br.a));
        }
        if (drift > 1e-10) return {false, "Brusselator fixed-point drift " + fmt(drift)};
        detail += ", fixed-point drift " + fmt(drift);
    }

    // KS spatial-mean drift over 1e4 stored samples
    {
        dynsys::KsSpec ks;
        ks.spinup_steps = 100;
        auto traj = dynsys::generate_trajectory(ks, 9, 10000);
        auto mean_of = [&](std::size_t t) {
            double s = 0.0;
            for (std::size_t i = 0; i < traj.states.cols; ++i) s += traj.states(t, i);
            return s / static_cast<double>(traj.states.cols);
        };
        const double m0 = mean_of(0);
        double drift = 0.0;
        for (std::size_t t = 0; t < traj.states.rows; ++t)
            drift = std::max(drift, std::abs(mean_of(t) - m0));
        if (drift > 1e-8) return {false, "KS mean drift " + fmt(drift)};
        detail += ", KS mean drift " + fmt(drift);
    }

    // L96 zero state with F = 0 stays exactly zero
    {
        dynsys::L96Spec sp;
        sp.slow_count = 4;
        sp.fast_per_slow = 4;
        sp.forcing_f = 0.0;
        sp.coupling_h = 0.0;
        sp.spinup_steps = 10;
        std::vector<double> zero(sp.state_dim(), 0.0);
        auto traj = dynsys::generate_trajectory(dynsys::SystemSpec{sp}, 1, 50,
                                                dynsys::Integrator::rk4, &zero);
        for (double v : traj.states.data)
            if (v != 0.0) return {false, "L96 zero state moved"};
        detail += ", L96 zero fixed point exact";
    }
    return {true, detail};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_likelihood() {
    double worst = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        seq::ModelArch arch{3, 2, 4, 5, 4, 0.3};
        seq::EmulatorModel model(arch, seed);
        RngStream rng(100 + seed);
        Matrix x(10, 3), y(10, 6);
        for (double& v : x.data) v = rng.uniform(-1, 1);
        for (double& v : y.data) v = rng.uniform(-1, 1);

        // independent density-formula oracle via the pdf expression
        auto oracle = [&](const Matrix& target, bool lowres) {
            Matrix hs = seq::encode_sequence(model, x);
            const double scale = std::exp(lowres ? model.log_sigma() : model.log_rho());
            double total = 0.0;
            for (std::size_t t = 0; t + 1 < x.rows; ++t) {
                auto h = hs.row_copy(t);
                auto pred = lowres ? model.head_x(h) : model.head_y(h);
                for (std::size_t i = 0; i < target.cols; ++i) {
                    const double r = target(t + 1, i) - target(t, i) - pred[i];
                    const double pdf = std::exp(-r * r / (2 * scale * scale)) /
                                       (scale * std::sqrt(2 * 3.14159265358979323846));
                    total -= std::log(pdf);
                }
            }
            return total / static_cast<double>(x.rows - 1);
        };
        worst = std::max(worst, std::abs(seq::nll_lowres(model, x) - oracle(x, true)));
        worst = std::max(worst, std::abs(seq::nll_highres(model, x, y) - oracle(y, false)));
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst) + " (limit 1e-12)"};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_protocol() {
    // tiny real dataset
    dynsys::L96Spec sp;
    sp.slow_count = 4;
    sp.fast_per_slow = 4;
    sp.forcing_f = 10.0;
    sp.spinup_steps = 300;
    auto fine = dynsys::generate_trajectory(sp, 3, 420);
    coarse::CoarsenSpec cs;
    cs.system = dynsys::SystemTag::l96;
    cs.temporal_factor = 1;
    cs.l96_slow = 4;
    auto ds = coarse::build_paired_dataset(fine, cs);
    auto [tr, va, ho] = coarse::split_with_buffer(ds, {250, 120, 30, 10});
    auto std_ = coarse::fit_standardizer(tr.x, tr.y);
    for (auto* p : {&tr, &va}) {
        std_.apply_x(p->x);
        std_.apply_y(p->y);
    }
    train::SplitData train_data(std::move(tr.x), std::move(tr.y));
    train::SplitData val_data(std::move(va.x), std::move(va.y));

    seq::ModelArch arch{4, 4, 6, 6, 4, 0.3};
    seq::EmulatorModel model(arch, 5);
    model.standardizer = std_;
    train::TrainPlan plan;
    plan.phase1_epochs = 3;
    plan.phase2_epochs = 5;
    plan.tbptt_len = 50;
    plan.batch_size = 4;
    plan.lr = 0.003;
    plan.patience = 5;

    auto p1 = train::train_phase1_highres(model, train_data, val_data, plan, 7);
    if (p1.diverged) return {false, "phase 1 diverged"};
    train::freeze_shared(model);
    std::vector<std::uint64_t> before;
    for (const nn::Param& p : model.params().params())
        before.push_back(model.params().value_checksum(p.name));
    auto p2 = train::train_phase2_lowres(model, train_data, val_data, plan, 7);
    if (p2.diverged) return {false, "phase 2 diverged"};

    const auto& params = model.params().params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const bool tuned =
            params[i].name.rfind("head_x.", 0) == 0 || params[i].name == "log_sigma";
        if (!tuned && model.params().value_checksum(params[i].name) != before[i])
            return {false, "tensor " + params[i].name + " changed during phase 2"};
    }

    // baseline never reads Y
    seq::EmulatorModel base(arch, 5);
    base.standardizer = std_;
    auto bl = train::train_baseline(base, train_data, val_data, plan, 7);
    if (bl.diverged) return {false, "baseline diverged"};
    if (train_data.y_accessed() || val_data.y_accessed())
        return {false, "baseline read the Y block"};

    // early stopping returns the argmax-validation epoch
    if (train::early_stop_select({1.0, 2.0, 3.0}, 5) != 3) return {false, "argmax selection"};
    if (train::early_stop_select({1.0, 3.0, 2.0, 2.0, 2.0}, 2) != 2)
        return {false, "argmax selection with patience"};
    if (train::early_stop_select({2.0, 2.0}, 2) != 1) return {false, "tie selection"};
    double best_logged = -1e300;
    for (double v : p2.val_ll) best_logged = std::max(best_logged, v);
    if (p2.best_val_ll != best_logged) return {false, "restored model is not the argmax epoch"};

    return {true, "isolation, Y access, early stopping all hold"};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_forecast_formulas() {
    double worst = 0.0;
    RngStream rng(51);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t M = 1 + rng.uniform_index(3);
        const std::size_t N = 1 + rng.uniform_index(3);
        const std::size_t d = 1 + rng.uniform_index(3);
        const std::size_t steps = 3;
        std::vector<eval::Ensemble> es(M);
        for (auto& e : es) {
            e.truth = Matrix(steps, d);
            for (double& v : e.truth.data) v = rng.uniform(-2, 2);
            for (std::size_t n = 0; n < N; ++n) {
                Matrix m(steps, d);
                for (double& v : m.data) v = rng.uniform(-2, 2);
                e.members.push_back(std::move(m));
            }
        }
        auto err = eval::forecast_error(es);
        auto spr = eval::forecast_spread(es);
        for (std::size_t t = 0; t < steps; ++t) {
            double esum = 0.0, ssum = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t i = 0; i < d; ++i) {
                    double mean = 0.0;
                    for (std::size_t n = 0; n < N; ++n) mean += es[m].members[n](t, i);
                    mean /= static_cast<double>(N);
                    esum += (es[m].truth(t, i) - mean) * (es[m].truth(t, i) - mean);
                    for (std::size_t n = 0; n < N; ++n)
                        ssum += (es[m].members[n](t, i) - mean) *
                                (es[m].members[n](t, i) - mean);
                }
            worst = std::max(worst,
                             std::abs(err[t] - std::sqrt(esum / static_cast<double>(M * d))));
            worst = std::max(
                worst, std::abs(spr[t] - std::sqrt(ssum / static_cast<double>(M * N * d))));
        }
    }
    if (worst > 1e-12) return {false, "formula deviation " + fmt(worst)};

    // N = 1 -> spread identically 0; perfect forecast -> error identically 0
    std::vector<eval::Ensemble> single(2);
    RngStream rng2(53);
    for (auto& e : single) {
        e.truth = Matrix(4, 2);
        for (double& v : e.truth.data) v = rng2.uniform(-1, 1);
        e.members.push_back(e.truth);
    }
    for (double v : eval::forecast_spread(single))
        if (v != 0.0) return {false, "spread not exactly 0 for N=1"};
    for (double v : eval::forecast_error(single))
        if (v != 0.0) return {false, "error not exactly 0 for a perfect forecast"};
    return {true, "formulas match to " + fmt(worst) + ", exact zeros hold"};
}

// -------------------------------------------------------- criteria 6 and 7

struct DeskRun {
    bool trained = false;
    cli::ExperimentConfig cfg;
    cli::EvaluateResult eval;
};

cli::ExperimentConfig desk_config(const std::string& outdir, std::size_t master_seed) {
    cli::ExperimentConfig cfg = cli::make_config("l96", "desk");
    cfg.outdir = outdir;
    cfg.master_seed = master_seed;
    // criterion-pinned desk sizes
    cfg.train_len = 400;
    cfg.val_len = 2000;
    cfg.holdout_len = 4000;
    cfg.n_seeds = 5;
    cfg.phase1_epochs = 20;
    cfg.phase2_epochs = 100;
    cfg.patience = 25;
    cfg.forecast_inits = 50;
    cfg.forecast_members = 10;
    cfg.forecast_steps = 200;
    return cfg;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Outcome criterion_table1(std::vector<DeskRun>& runs, const std::string& scratch) {
    const double t0 = now_seconds();
    const std::vector<std::size_t> master_seeds{101, 202, 303};
    std::size_t passes = 0;
    std::string detail;
    for (std::size_t i = 0; i < master_seeds.size(); ++i) {
        DeskRun run;
        run.cfg = desk_config(scratch + "/desk" + std::to_string(i), master_seeds[i]);
        cli::run_simulate(run.cfg);
        cli::run_train(run.cfg, train::TrainMode::tl);
        cli::run_train(run.cfg, train::TrainMode::baseline);
        run.eval = cli::run_evaluate(run.cfg);
        run.trained = true;

        const double tl_mean = mean_of(run.eval.tl.holdout_lls);
        const double base_mean = mean_of(run.eval.baseline.holdout_lls);
        const double tl_sd = sample_sd(run.eval.tl.holdout_lls);
        const double base_sd = sample_sd(run.eval.baseline.holdout_lls);
        const bool ok = tl_mean > base_mean && tl_sd < base_sd;
        passes += ok ? 1 : 0;
        detail += (i ? "; " : "") + std::string("seed ") + std::to_string(master_seeds[i]) +
                  ": TL " + fmt(tl_mean) + "+-" + fmt(tl_sd) + " vs base " + fmt(base_mean) +
                  "+-" + fmt(base_sd) + (ok ? " OK" : " FAIL");
        runs.push_back(std::move(run));
    }
    const double dt = now_seconds() - t0;
    detail += "; " + fmt(dt) + "s";
    return {passes >= 2, detail};
}

bool nondecreasing_trend(const std::vector<double>& curve) {
    // 5-point moving average with a small slack against plateau noise
    std::vector<double> ma;
    for (std::size_t i = 0; i + 5 <= curve.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = i; j < i + 5; ++j) s += curve[j];
        ma.push_back(s / 5.0);
    }
    double peak = 0.0;
    for (double v : ma) peak = std::max(peak, v);
    const double slack = 0.02 * peak;
    for (std::size_t i = 0; i + 1 < ma.size(); ++i)
        if (ma[i + 1] < ma[i] - slack) return false;
    return true;
}

Outcome criterion_fig1(std::vector<DeskRun>& runs) {
    const double t0 = now_seconds();
    // use the first criterion-6 run that passed the train step
    for (DeskRun& run : runs) {
        if (!run.trained) continue;
        cli::ForecastResult fc = cli::run_forecast(run.cfg);
        std::size_t tl_not_worse = 0;
        for (std::size_t t = 0; t < fc.error_tl.size(); ++t)
            if (fc.error_tl[t] <= fc.error_baseline[t]) ++tl_not_worse;
        const double frac =
            static_cast<double>(tl_not_worse) / static_cast<double>(fc.error_tl.size());
        const bool trend_tl = nondecreasing_trend(fc.error_tl);
        const bool trend_base = nondecreasing_trend(fc.error_baseline);
        const double dt = now_seconds() - t0;
        const bool ok = frac >= 0.6 && trend_tl && trend_base && dt <= 600.0;
        return {ok, "TL at-or-below baseline at " + fmt(100 * frac) + "% of leads, trends " +
                        (trend_tl ? "ok" : "BAD") + "/" + (trend_base ? "ok" : "BAD") + ", " +
                        fmt(dt) + "s"};
    }
    return {false, "no trained desk run available"};
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_indicator() {
    const double a = eval::tl_benefit_indicator(1, 1, 10000);
    if (std::abs(a - 0.01) > 1e-9) return {false, "example 1 value " + fmt(a)};
    if (!eval::tl_benefit_flag(a)) return {false, "example 1 not flagged"};

    const double b = eval::tl_benefit_indicator(10000, 8, 400);
    if (std::abs(b - 8.8808596464545122) > 1e-9) return {false, "example 2 value " + fmt(b)};
    if (eval::tl_benefit_flag(b)) return {false, "example 2 wrongly flagged"};

    if (!eval::tl_benefit_flag(1.0)) return {false, "threshold 1.0 must flag"};
    if (eval::tl_benefit_flag(1.0 + 1e-9)) return {false, "just above 1.0 must not flag"};
    return {true, "0.01 flagged, 8.881 clear, threshold at 1.0"};
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_reproducibility(const std::string& scratch) {
    auto small = [&](const std::string& sub) {
        cli::ExperimentConfig cfg = desk_config(scratch + "/" + sub, 77);
        cfg.l96_slow = 4;
        cfg.l96_fast_per_slow = 4;
        cfg.spinup_steps = 300;
        cfg.train_len = 150;
        cfg.val_len = 120;
        cfg.holdout_len = 300;
        cfg.buffer_len = 10;
        cfg.hidden = 6;
        cfg.hx_width = 6;
        cfg.hy_width = 4;
        cfg.phase1_epochs = 2;
        cfg.phase2_epochs = 4;
        cfg.patience = 3;
        cfg.tbptt_len = 50;
        cfg.n_seeds = 2;
        cfg.forecast_inits = 4;
        cfg.forecast_members = 2;
        cfg.forecast_steps = 8;
        cfg.forecast_warmup = 20;
        return cfg;
    };
    std::vector<std::pair<std::string, std::uint64_t>> crcs[2];
    const std::string subs[2] = {"repro_a", "repro_b"};
    for (int round = 0; round < 2; ++round) {
        cli::ExperimentConfig cfg = small(subs[round]);
        cli::run_simulate(cfg);
        cli::run_train(cfg, train::TrainMode::tl);
        cli::run_train(cfg, train::TrainMode::baseline);
        cli::run_evaluate(cfg);
        cli::run_forecast(cfg);
        cli::run_indicator(cfg);
        for (const auto& entry : fs::recursive_directory_iterator(cfg.outdir)) {
            if (!entry.is_regular_file()) continue;
            crcs[round].emplace_back(fs::relative(entry.path(), cfg.outdir).string(),
                                     io::file_digest(entry.path().string()));
        }
        std::sort(crcs[round].begin(), crcs[round].end());
    }
    if (crcs[0].size() != crcs[1].size() || crcs[0].empty())
        return {false, "output trees differ in file count"};
    for (std::size_t i = 0; i < crcs[0].size(); ++i)
        if (crcs[0][i] != crcs[1][i])
            return {false, "file " + crcs[0][i].first + " differs between reruns"};
    return {true, std::to_string(crcs[0].size()) + " files byte-identical across reruns"};
}

}  // namespace

int main() {
    const std::string scratch = "acceptance_scratch";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    std::vector<DeskRun> desk_runs;
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"C1 gradient correctness", criterion_gradients},
        {"C2 simulator oracles", criterion_simulators},
        {"C3 likelihood oracle", criterion_likelihood},
        {"C4 protocol invariants", criterion_protocol},
        {"C5 forecast formula fidelity", criterion_forecast_formulas},
        {"C6 directional hold-out comparison",
         [&] { return criterion_table1(desk_runs, scratch); }},
        {"C7 directional forecast comparison", [&] { return criterion_fig1(desk_runs); }},
        {"C8 benefit indicator", criterion_indicator},
        {"C9 reproducibility", [&] { return criterion_reproducibility(scratch); }},
    };

    int failures = 0;
    for (auto& [name, fn] : criteria) {
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << name << ": " << out.detail << "\n";
        std::cout.flush();
        failures += out.pass ? 0 : 1;
    }
    fs::remove_all(scratch);
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
