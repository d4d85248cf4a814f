#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cgem/coarsegrain.hpp"
#include "cgem/dynsys.hpp"
#include "cgem/evaluation.hpp"
#include "cgem/seqmodel.hpp"
#include "cgem/training.hpp"

namespace cgem::cli {

/// Every knob of one experiment, with paper-scale defaults per system and a
/// reduced "desk" preset that shrinks sizes only (never formulas or rates).
struct ExperimentConfig {
    std::string system = "l96";
    std::string preset = "paper";
    std::size_t master_seed = 1;
    std::string outdir = "out";

    // KS parameters
    double ks_nu = 1.0;
    double ks_length = 22.0;
    std::size_t ks_grid_points = 100;

    // Brusselator parameters
    double br_d0 = 1.0;
    double br_d1 = 0.1;
    double br_a = 1.0;
    double br_b = 3.0;
    std::size_t br_side = 64;

    // L96 parameters
    std::size_t l96_slow = 8;
    std::size_t l96_fast_per_slow = 32;
    double l96_h = 1.0;
    double l96_b = 10.0;
    double l96_c = 10.0;
    double l96_f = 20.0;

    // simulation
    double dt_solver = 0.001;
    double subsample_dt = 0.005;
    std::size_t spinup_steps = 10000;
    std::string integrator = "default";  // default | euler | rk4

    // coarse-graining
    std::size_t temporal_factor = 1;
    std::size_t spatial_factor = 1;

    // splits
    std::size_t train_len = 400;
    std::size_t val_len = 10000;
    std::size_t holdout_len = 30000;
    std::size_t buffer_len = 1000;

    // architecture
    std::size_t hidden = 32;
    std::size_t hx_width = 32;
    std::size_t hy_width = 4;
    double dropout_rate = 0.3;

    // training
    std::size_t phase1_epochs = 20;
    std::size_t phase2_epochs = 250;
    std::size_t tbptt_len = 100;
    std::size_t batch_size = 32;
    double lr = 0.001;
    std::size_t patience = 25;
    std::size_t n_seeds = 15;

    // forecasting
    std::size_t forecast_inits = 500;
    std::size_t forecast_members = 40;
    std::size_t forecast_steps = 500;
    std::size_t forecast_warmup = 100;
};

/// Paper (or desk) defaults for the given system.
ExperimentConfig make_config(const std::string& system, const std::string& preset);

using FieldPtr = std::variant<std::size_t*, double*, std::string*>;

struct FieldRef {
    std::string name;
    FieldPtr ptr;
};

/// Canonical ordered list of all fields; drives the config file, the CLI
/// flags, the canonical string and the hash.
std::vector<FieldRef> config_fields(ExperimentConfig& cfg);

void set_field(ExperimentConfig& cfg, const std::string& name, const std::string& value);

/// Reads a JSON object of field name -> value. Unknown keys are an error.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

std::string canonical_string(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Derived per-module inputs.
dynsys::SystemTag system_tag(const ExperimentConfig& cfg);
dynsys::SystemSpec system_spec(const ExperimentConfig& cfg);
dynsys::Integrator integrator_choice(const ExperimentConfig& cfg);
coarse::CoarsenSpec coarsen_spec(const ExperimentConfig& cfg);
coarse::SplitPlan split_plan(const ExperimentConfig& cfg);
seq::ModelArch model_arch(const ExperimentConfig& cfg);
train::TrainPlan train_plan(const ExperimentConfig& cfg, train::TrainMode mode);
eval::ForecastConfig forecast_config(const ExperimentConfig& cfg);

}  // namespace cgem::cli
