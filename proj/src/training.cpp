#include "cgem/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace cgem::train {

using seq::EmulatorModel;
using seq::ForwardOptions;
using seq::Objective;
using seq::WindowTrace;

namespace {

// Sub-stream tags. The low-res tags are shared between TL phase 2 and the
// baseline so both modes see the same window schedule and dropout draws.
constexpr std::uint64_t k_tag_init = 0x101;
constexpr std::uint64_t k_tag_shuffle_high = 0x201;
constexpr std::uint64_t k_tag_dropout_high = 0x202;
constexpr std::uint64_t k_tag_shuffle_low = 0x301;
constexpr std::uint64_t k_tag_dropout_low = 0x302;

Matrix window_slice(const Matrix& data, std::size_t offset, std::size_t n_states) {
    Matrix w(n_states, data.cols);
    std::copy(data.row(offset), data.row(offset) + n_states * data.cols, w.data.begin());
    return w;
}

struct EpochResult {
    double train_nll = 0.0;
    bool finite = true;
};

/// One epoch of TBPTT training on the given objective. Returns the mean
/// per-transition NLL over the epoch.
EpochResult run_epoch(EmulatorModel& model, const SplitData& data, Objective objective,
                      const TrainPlan& plan, RngStream& shuffle_rng, RngStream& dropout_rng) {
    auto batches = make_window_batches(data.length(), plan.tbptt_len, plan.batch_size,
                                       shuffle_rng, plan.window_stride);
    nn::AdamConfig adam;
    adam.lr = plan.lr;

    double epoch_total = 0.0;
    std::size_t epoch_steps = 0;
    for (const auto& batch : batches) {
        model.params().zero_grad();
        std::vector<WindowTrace> traces;
        traces.reserve(batch.size());
        std::size_t batch_steps = 0;
        for (std::size_t offset : batch) {
            Matrix xw = window_slice(data.X(), offset, plan.tbptt_len + 1);
            ForwardOptions opts;
            opts.train_mode = true;
            opts.rng = &dropout_rng;
            if (objective == Objective::highres) {
                Matrix yw = window_slice(data.Y(), offset, plan.tbptt_len + 1);
                traces.push_back(seq::forward_window(model, xw, &yw, objective, opts));
            } else {
                traces.push_back(seq::forward_window(model, xw, nullptr, objective, opts));
            }
            batch_steps += traces.back().n_steps;
        }
        double batch_total = 0.0;
        for (const WindowTrace& t : traces) batch_total += t.total_nll;
        if (!std::isfinite(batch_total)) return {batch_total, false};
        const double scale = 1.0 / static_cast<double>(batch_steps);
        for (WindowTrace& t : traces) seq::backward_window(model, t, scale);
        nn::adam_update(model.params(), adam);
        epoch_total += batch_total;
        epoch_steps += batch_steps;
    }
    return {epoch_total / static_cast<double>(epoch_steps), true};
}

double validation_ll(const EmulatorModel& model, const SplitData& val, Objective objective) {
    if (objective == Objective::highres)
        return -seq::nll_highres(model, val.X(), val.Y());
    return -seq::nll_lowres(model, val.X());
}

/// Shared driver for the two low-res trainings (TL phase 2 and baseline):
/// early stopping on validation LL, restore-best on exit.
TrainLog run_lowres_training(EmulatorModel& model, const SplitData& train, const SplitData& val,
                             const TrainPlan& plan, std::uint64_t run_seed) {
    const auto t_start = std::chrono::steady_clock::now();
    RngStream shuffle_rng(mix_seed({run_seed, k_tag_shuffle_low}));
    RngStream dropout_rng(mix_seed({run_seed, k_tag_dropout_low}));

    model.params().reset_optimizer();

    TrainLog log;
    log.seed = run_seed;
    std::vector<double> best_snapshot = model.params().snapshot_values();
    double best_ll = -std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= plan.phase2_epochs; ++epoch) {
        EpochResult res = run_epoch(model, train, Objective::lowres, plan, shuffle_rng,
                                    dropout_rng);
        if (!res.finite) {
            log.diverged = true;
            break;
        }
        const double vll = validation_ll(model, val, Objective::lowres);
        log.train_nll.push_back(res.train_nll);
        log.val_ll.push_back(vll);
        if (!std::isfinite(vll)) {
            log.diverged = true;
            break;
        }
        if (vll > best_ll) {
            best_ll = vll;
            best_epoch = epoch;
            best_snapshot = model.params().snapshot_values();
            since_best = 0;
        } else {
            ++since_best;
            if (since_best >= plan.patience) break;
        }
    }

    if (best_epoch > 0) {
        model.params().restore_values(best_snapshot);
        log.best_epoch = best_epoch;
        log.best_val_ll = best_ll;
    } else {
        log.diverged = true;
    }
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return log;
}

}  // namespace

std::string to_string(TrainMode mode) { return mode == TrainMode::tl ? "tl" : "baseline"; }

std::vector<std::vector<std::size_t>> make_window_batches(std::size_t split_len,
                                                          std::size_t tbptt_len,
                                                          std::size_t batch_size,
                                                          RngStream& rng, std::size_t stride) {
    require(tbptt_len >= 1 && batch_size >= 1, "make_window_batches: bad plan");
    require(split_len >= tbptt_len + 1, "make_window_batches: split shorter than one window");
    if (stride == 0) stride = tbptt_len;
    std::vector<std::size_t> offsets;
    for (std::size_t o = 0; o + tbptt_len <= split_len - 1; o += stride) offsets.push_back(o);
    rng.shuffle(offsets);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t i = 0; i < offsets.size(); i += batch_size) {
        std::vector<std::size_t> batch(offsets.begin() + i,
                                       offsets.begin() + std::min(i + batch_size, offsets.size()));
        batches.push_back(std::move(batch));
    }
    return batches;
}

TrainLog train_phase1_highres(EmulatorModel& model, const SplitData& train, const SplitData& val,
                              const TrainPlan& plan, std::uint64_t run_seed) {
    const auto t_start = std::chrono::steady_clock::now();
    RngStream shuffle_rng(mix_seed({run_seed, k_tag_shuffle_high}));
    RngStream dropout_rng(mix_seed({run_seed, k_tag_dropout_high}));

    model.params().set_all_trainable(true);
    model.params().reset_optimizer();

    TrainLog log;
    log.seed = run_seed;
    for (std::size_t epoch = 1; epoch <= plan.phase1_epochs; ++epoch) {
        EpochResult res = run_epoch(model, train, Objective::highres, plan, shuffle_rng,
                                    dropout_rng);
        if (!res.finite) {
            log.diverged = true;
            break;
        }
        const double vll = validation_ll(model, val, Objective::highres);
        log.train_nll.push_back(res.train_nll);
        log.val_ll.push_back(vll);
        if (!std::isfinite(vll)) {
            log.diverged = true;
            break;
        }
    }
    if (!log.val_ll.empty() && !log.diverged) {
        log.best_epoch = early_stop_select(log.val_ll, log.val_ll.size() + 1);
        log.best_val_ll = log.val_ll[log.best_epoch - 1];
    }
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return log;
}

void freeze_shared(EmulatorModel& model) {
    nn::ParamStore& store = model.params();
    store.set_all_trainable(false);
    for (const char* name : {"head_x.W1", "head_x.b1", "head_x.W2", "head_x.b2", "log_sigma"})
        store.set_trainable(name, true);
}

void unfreeze_all(EmulatorModel& model) { model.params().set_all_trainable(true); }

TrainLog train_phase2_lowres(EmulatorModel& model, const SplitData& train, const SplitData& val,
                             const TrainPlan& plan, std::uint64_t run_seed) {
    return run_lowres_training(model, train, val, plan, run_seed);
}

TrainLog train_baseline(EmulatorModel& model, const SplitData& train, const SplitData& val,
                        const TrainPlan& plan, std::uint64_t run_seed) {
    nn::ParamStore& store = model.params();
    store.set_all_trainable(false);
    for (nn::Param& p : store.params()) {
        if (p.name.rfind("gru.", 0) == 0 || p.name.rfind("head_x.", 0) == 0 ||
            p.name == "log_sigma")
            p.trainable = true;
    }
    return run_lowres_training(model, train, val, plan, run_seed);
}

std::size_t early_stop_select(const std::vector<double>& val_ll, std::size_t patience) {
    require(!val_ll.empty(), "early_stop_select: need at least one epoch");
    (void)patience;  // halting is the trainer's job; selection is pure argmax
    std::size_t best = 0;
    for (std::size_t i = 1; i < val_ll.size(); ++i)
        if (val_ll[i] > val_ll[best]) best = i;
    return best + 1;
}

std::vector<SweepRun> seed_sweep(const seq::ModelArch& arch, const coarse::Standardizer& standardizer,
                                 const SplitData& train, const SplitData& val,
                                 const TrainPlan& plan, std::uint64_t master_seed,
                                 std::size_t n_threads) {
    std::vector<SweepRun> runs(plan.n_seeds);

    auto run_instance = [&](std::size_t i) {
        SweepRun& run = runs[i];
        run.instance = i;
        run.seed = master_seed ^ static_cast<std::uint64_t>(i);
        EmulatorModel model(arch, mix_seed({run.seed, k_tag_init}));
        model.standardizer = standardizer;
        if (plan.mode == TrainMode::tl) {
            run.phase1 = train_phase1_highres(model, train, val, plan, run.seed);
            if (run.phase1.diverged) {
                run.diverged = true;
                return;
            }
            freeze_shared(model);
            run.final_phase = train_phase2_lowres(model, train, val, plan, run.seed);
        } else {
            run.final_phase = train_baseline(model, train, val, plan, run.seed);
        }
        run.diverged = run.final_phase.diverged;
        if (!run.diverged) run.model = std::move(model);
    };

    if (n_threads <= 1 || plan.n_seeds <= 1) {
        for (std::size_t i = 0; i < plan.n_seeds; ++i) run_instance(i);
        return runs;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < plan.n_seeds; i = next.fetch_add(1))
            run_instance(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, plan.n_seeds); ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return runs;
}

}  // namespace cgem::train
