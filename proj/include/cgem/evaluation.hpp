#pragma once

#include <cstdint>
#include <vector>

#include "cgem/seqmodel.hpp"
#include "cgem/training.hpp"

namespace cgem::eval {

/// Mean per-step log-likelihood (= -nll_lowres) over the hold-out split,
/// teacher-forced in order from a zero hidden state.
double holdout_loglik(const seq::EmulatorModel& model, const Matrix& holdout_x);

struct Ci {
    double mean = 0.0;
    double half_width = 0.0;
};

/// mean +- 1.96 * s / sqrt(n) with s the sample standard deviation.
Ci confidence_interval_95(const std::vector<double>& values);

/// Forecasts from one initial condition: the observed truth and the
/// surviving ensemble members, all in physical units, leads 1..n_steps.
struct Ensemble {
    Matrix truth;                 // [n_steps x d]
    std::vector<Matrix> members;  // each [n_steps x d]
};

struct ForecastConfig {
    std::size_t n_inits = 500;    // M
    std::size_t n_members = 40;   // N
    std::size_t n_steps = 500;
    std::size_t warmup = 100;     // teacher-forced coarse steps before each init
    bool noise_on = true;
    std::uint64_t seed = 0;
};

struct ForecastSet {
    std::vector<Ensemble> ensembles;
    std::size_t excluded_members = 0;  // non-finite rollouts dropped
};

/// M x N independent noise-on rollouts, each seeded by (seed, m, n). Initial
/// conditions are drawn without replacement from `source` (held-out data);
/// each hidden state comes from teacher-forcing the preceding warmup steps.
ForecastSet forecast_ensemble(const seq::EmulatorModel& model, const train::SplitData& source,
                              const ForecastConfig& cfg);

/// error(t) = sqrt( 1/(M d) * sum_m sum_i (truth - ensemble mean)^2 ).
std::vector<double> forecast_error(const std::vector<Ensemble>& ensembles);

/// spread(t) = sqrt( 1/(M N d) * sum_m sum_n sum_i (member - ensemble mean)^2 ).
std::vector<double> forecast_spread(const std::vector<Ensemble>& ensembles);

/// n_params^0.1 * d^0.5 * 1e4 / train_len^1.5; values at or below 1.0 flag
/// the transfer approach as likely less beneficial.
double tl_benefit_indicator(std::size_t n_params, std::size_t d, std::size_t train_len);
bool tl_benefit_flag(double indicator_value);

struct SweepSummary {
    std::vector<double> holdout_lls;  // per seed, diverged runs excluded
    std::size_t max_seed = 0;         // instance index of the greatest validation LL
    double max_holdout_ll = 0.0;      // hold-out LL of that seed
    Ci average;
};

/// Table-style summary of one mode's sweep: "Max" picks the seed with the
/// greatest validation LL; "Average" aggregates all (non-diverged) seeds.
SweepSummary summarize_sweep(const std::vector<double>& holdout_lls,
                             const std::vector<double>& validation_lls,
                             const std::vector<std::size_t>& instance_ids);

}  // namespace cgem::eval
