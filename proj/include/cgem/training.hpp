#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cgem/matrix.hpp"
#include "cgem/seqmodel.hpp"

namespace cgem::train {

enum class TrainMode : std::uint8_t { tl = 0, baseline = 1 };

std::string to_string(TrainMode mode);

/// One split of a paired dataset, already standardized. Y access is tracked
/// so tests can assert the baseline never reads high-res data.
class SplitData {
  public:
    SplitData() = default;
    SplitData(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)), has_y_(!y_.empty()) {}
    explicit SplitData(Matrix x) : x_(std::move(x)) {}

    SplitData(SplitData&& o) noexcept
        : x_(std::move(o.x_)), y_(std::move(o.y_)), has_y_(o.has_y_),
          y_accessed_(o.y_accessed_.load()) {}
    SplitData& operator=(SplitData&& o) noexcept {
        x_ = std::move(o.x_);
        y_ = std::move(o.y_);
        has_y_ = o.has_y_;
        y_accessed_.store(o.y_accessed_.load());
        return *this;
    }

    const Matrix& X() const { return x_; }
    const Matrix& Y() const {
        require(has_y_, "SplitData: Y block was not loaded");
        y_accessed_.store(true, std::memory_order_relaxed);
        return y_;
    }
    bool has_y() const { return has_y_; }
    bool y_accessed() const { return y_accessed_.load(); }
    std::size_t length() const { return x_.rows; }

  private:
    Matrix x_;
    Matrix y_;
    bool has_y_ = false;
    mutable std::atomic<bool> y_accessed_{false};
};

struct TrainPlan {
    std::size_t phase1_epochs = 20;
    std::size_t phase2_epochs = 250;
    std::size_t tbptt_len = 100;
    std::size_t batch_size = 32;
    double lr = 0.001;
    std::size_t patience = 25;
    std::size_t n_seeds = 15;
    std::size_t window_stride = 0;  // 0 = tbptt_len (non-overlapping)
    TrainMode mode = TrainMode::tl;
};

struct TrainLog {
    std::vector<double> train_nll;  // per epoch
    std::vector<double> val_ll;     // per epoch
    std::size_t best_epoch = 0;     // 1-based; 0 = none
    double best_val_ll = 0.0;
    double wall_seconds = 0.0;      // console diagnostics only, never persisted
    std::uint64_t seed = 0;
    bool diverged = false;
};

/// Window offsets for one epoch: starts at 0, tbptt, 2*tbptt, ... while a
/// full window of tbptt transitions fits; shuffled; grouped into batches.
std::vector<std::vector<std::size_t>> make_window_batches(std::size_t split_len,
                                                          std::size_t tbptt_len,
                                                          std::size_t batch_size, RngStream& rng,
                                                          std::size_t stride = 0);

/// Pre-training on the high-res objective. All parameters trainable; the
/// low-res head and log_sigma receive no gradient and stay at initialization.
TrainLog train_phase1_highres(seq::EmulatorModel& model, const SplitData& train,
                              const SplitData& val, const TrainPlan& plan, std::uint64_t run_seed);

/// Marks the trunk (and the now-unused high-res head) non-trainable; only
/// head_x and log_sigma remain trainable.
void freeze_shared(seq::EmulatorModel& model);
void unfreeze_all(seq::EmulatorModel& model);

/// Fine-tuning on the low-res objective with early stopping on validation
/// log-likelihood; the returned model is restored to its best epoch.
TrainLog train_phase2_lowres(seq::EmulatorModel& model, const SplitData& train,
                             const SplitData& val, const TrainPlan& plan, std::uint64_t run_seed);

/// No-transfer baseline: trains {gru, head_x, log_sigma} on the low-res
/// objective only, same early stopping and epoch budget as phase 2.
TrainLog train_baseline(seq::EmulatorModel& model, const SplitData& train, const SplitData& val,
                        const TrainPlan& plan, std::uint64_t run_seed);

/// Best epoch (1-based) = argmax validation LL, first occurrence on ties.
std::size_t early_stop_select(const std::vector<double>& val_ll, std::size_t patience);

struct SweepRun {
    std::size_t instance = 0;
    std::uint64_t seed = 0;
    TrainLog phase1;  // empty for baseline
    TrainLog final_phase;
    std::optional<seq::EmulatorModel> model;
    bool diverged = false;
};

/// Trains n_seeds independent instances (seed = master ^ instance) in the
/// plan's mode. Instances are independent; n_threads > 1 runs them
/// concurrently with identical results. Diverged instances are recorded and
/// skipped by consumers.
std::vector<SweepRun> seed_sweep(const seq::ModelArch& arch, const coarse::Standardizer& standardizer,
                                 const SplitData& train, const SplitData& val,
                                 const TrainPlan& plan, std::uint64_t master_seed,
                                 std::size_t n_threads = 1);

}  // namespace cgem::train
