#pragma once

#include <string>
#include <vector>

#include "cgem/config.hpp"
#include "cgem/evaluation.hpp"

namespace cgem::cli {

/// Paths used by the pipeline inside cfg.outdir.
std::string dataset_path(const ExperimentConfig& cfg, const std::string& split);
std::string artifact_path(const ExperimentConfig& cfg, train::TrainMode mode, std::size_t seed_idx);
std::string manifest_path(const ExperimentConfig& cfg, train::TrainMode mode);
std::string trainlog_path(const ExperimentConfig& cfg, train::TrainMode mode,
                          std::size_t seed_idx);
std::string summary_csv_path(const ExperimentConfig& cfg);
std::string per_seed_csv_path(const ExperimentConfig& cfg, train::TrainMode mode);
std::string forecast_csv_path(const ExperimentConfig& cfg, train::TrainMode mode);
std::string indicator_csv_path(const ExperimentConfig& cfg);

/// simulate: trajectory -> paired dataset -> splits -> standardize -> files.
void run_simulate(const ExperimentConfig& cfg);

/// train: seed sweep in the given mode; writes artifacts, per-epoch logs and
/// a manifest. The baseline never loads the Y block.
void run_train(const ExperimentConfig& cfg, train::TrainMode mode);

struct EvaluateResult {
    eval::SweepSummary tl;
    eval::SweepSummary baseline;
};

/// evaluate: hold-out log-likelihood per artifact, summarized per mode.
EvaluateResult run_evaluate(const ExperimentConfig& cfg);

struct ForecastResult {
    std::vector<double> error_tl, spread_tl;
    std::vector<double> error_baseline, spread_baseline;
};

/// forecast: error/spread curves from the best-validation artifact per mode.
ForecastResult run_forecast(const ExperimentConfig& cfg);

struct IndicatorResult {
    std::size_t n_params = 0;
    double value = 0.0;
    bool flagged = false;
};

IndicatorResult run_indicator(const ExperimentConfig& cfg);

}  // namespace cgem::cli
