#include "cgem/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cgem::cli {

using dynsys::SystemTag;

ExperimentConfig make_config(const std::string& system, const std::string& preset) {
    require(preset == "paper" || preset == "desk", "unknown preset: " + preset);
    ExperimentConfig cfg;
    cfg.system = system;
    cfg.preset = preset;

    const SystemTag tag = dynsys::system_tag_from_string(system);
    switch (tag) {
        case SystemTag::ks:
            cfg.dt_solver = 0.00005;
            cfg.subsample_dt = 0.002;
            cfg.temporal_factor = 5;
            cfg.spatial_factor = 5;
            cfg.train_len = 10000;
            cfg.hidden = 8;
            cfg.hx_width = 8;
            cfg.hy_width = 16;
            cfg.lr = 0.001;
            cfg.phase2_epochs = 200;
            break;
        case SystemTag::brusselator:
            cfg.dt_solver = 0.0002;
            cfg.subsample_dt = 0.002;
            cfg.temporal_factor = 5;
            cfg.spatial_factor = 8;
            cfg.train_len = 600;
            cfg.hidden = 8;
            cfg.hx_width = 64;
            cfg.hy_width = 64;
            cfg.lr = 0.0003;
            cfg.phase2_epochs = 400;
            break;
        case SystemTag::l96:
            cfg.dt_solver = 0.001;
            cfg.subsample_dt = 0.005;
            cfg.temporal_factor = 1;
            cfg.spatial_factor = 1;
            cfg.train_len = 400;
            cfg.hidden = 32;
            cfg.hx_width = 32;
            cfg.hy_width = 4;
            cfg.lr = 0.001;
            cfg.phase2_epochs = 250;
            break;
    }

    if (preset == "desk") {
        cfg.n_seeds = 5;
        cfg.buffer_len = 100;
        cfg.val_len = tag == SystemTag::l96 ? 2000 : 1000;
        cfg.holdout_len = tag == SystemTag::l96 ? 4000 : 2000;
        cfg.phase2_epochs = tag == SystemTag::l96 ? 100 : 50;
        if (tag == SystemTag::ks) cfg.train_len = 2000;
        cfg.forecast_inits = tag == SystemTag::l96 ? 50 : 20;
        cfg.forecast_members = tag == SystemTag::l96 ? 10 : 5;
        cfg.forecast_steps = tag == SystemTag::l96 ? 200 : 100;
    }
    return cfg;
}

std::vector<FieldRef> config_fields(ExperimentConfig& c) {
    return {
        {"system", &c.system},
        {"preset", &c.preset},
        {"master_seed", &c.master_seed},
        {"outdir", &c.outdir},
        {"ks_nu", &c.ks_nu},
        {"ks_length", &c.ks_length},
        {"ks_grid_points", &c.ks_grid_points},
        {"br_d0", &c.br_d0},
        {"br_d1", &c.br_d1},
        {"br_a", &c.br_a},
        {"br_b", &c.br_b},
        {"br_side", &c.br_side},
        {"l96_slow", &c.l96_slow},
        {"l96_fast_per_slow", &c.l96_fast_per_slow},
        {"l96_h", &c.l96_h},
        {"l96_b", &c.l96_b},
        {"l96_c", &c.l96_c},
        {"l96_f", &c.l96_f},
        {"dt_solver", &c.dt_solver},
        {"subsample_dt", &c.subsample_dt},
        {"spinup_steps", &c.spinup_steps},
        {"integrator", &c.integrator},
        {"temporal_factor", &c.temporal_factor},
        {"spatial_factor", &c.spatial_factor},
        {"train_len", &c.train_len},
        {"val_len", &c.val_len},
        {"holdout_len", &c.holdout_len},
        {"buffer_len", &c.buffer_len},
        {"hidden", &c.hidden},
        {"hx_width", &c.hx_width},
        {"hy_width", &c.hy_width},
        {"dropout_rate", &c.dropout_rate},
        {"phase1_epochs", &c.phase1_epochs},
        {"phase2_epochs", &c.phase2_epochs},
        {"tbptt_len", &c.tbptt_len},
        {"batch_size", &c.batch_size},
        {"lr", &c.lr},
        {"patience", &c.patience},
        {"n_seeds", &c.n_seeds},
        {"forecast_inits", &c.forecast_inits},
        {"forecast_members", &c.forecast_members},
        {"forecast_steps", &c.forecast_steps},
        {"forecast_warmup", &c.forecast_warmup},
    };
}

void set_field(ExperimentConfig& cfg, const std::string& name, const std::string& value) {
    for (FieldRef& f : config_fields(cfg)) {
        if (f.name != name) continue;
        std::visit(
            [&](auto* p) {
                using T = std::remove_pointer_t<decltype(p)>;
                if constexpr (std::is_same_v<T, std::string>)
                    *p = value;
                else if constexpr (std::is_same_v<T, double>)
                    *p = std::stod(value);
                else
                    *p = static_cast<T>(std::stoull(value));
            },
            f.ptr);
        return;
    }
    throw std::invalid_argument("unknown config field: " + name);
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    require(j.is_object(), "config file must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (value.is_string())
            set_field(cfg, key, value.get<std::string>());
        else
            set_field(cfg, key, value.dump());
    }
}

namespace {

std::string field_to_string(const FieldPtr& ptr) {
    return std::visit(
        [](auto* p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return *p;
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", *p);
                return buf;
            } else {
                return std::to_string(*p);
            }
        },
        ptr);
}

}  // namespace

std::string canonical_string(const ExperimentConfig& cfg) {
    ExperimentConfig copy = cfg;
    std::string out;
    for (const FieldRef& f : config_fields(copy)) {
        if (f.name == "outdir") continue;  // a location, not an experiment parameter
        out += f.name;
        out += '=';
        out += field_to_string(f.ptr);
        out += '\n';
    }
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string s = canonical_string(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

SystemTag system_tag(const ExperimentConfig& cfg) {
    return dynsys::system_tag_from_string(cfg.system);
}

dynsys::SystemSpec system_spec(const ExperimentConfig& cfg) {
    switch (system_tag(cfg)) {
        case SystemTag::ks: {
            dynsys::KsSpec s;
            s.nu = cfg.ks_nu;
            s.length = cfg.ks_length;
            s.grid_points = cfg.ks_grid_points;
            s.dt_solver = cfg.dt_solver;
            s.subsample_dt = cfg.subsample_dt;
            s.spinup_steps = cfg.spinup_steps;
            return s;
        }
        case SystemTag::brusselator: {
            dynsys::BrusselatorSpec s;
            s.d0 = cfg.br_d0;
            s.d1 = cfg.br_d1;
            s.a = cfg.br_a;
            s.b = cfg.br_b;
            s.side = cfg.br_side;
            s.dt_solver = cfg.dt_solver;
            s.subsample_dt = cfg.subsample_dt;
            s.spinup_steps = cfg.spinup_steps;
            return s;
        }
        case SystemTag::l96:
        default: {
            dynsys::L96Spec s;
            s.slow_count = cfg.l96_slow;
            s.fast_per_slow = cfg.l96_fast_per_slow;
            s.coupling_h = cfg.l96_h;
            s.scale_b = cfg.l96_b;
            s.timescale_c = cfg.l96_c;
            s.forcing_f = cfg.l96_f;
            s.dt_solver = cfg.dt_solver;
            s.subsample_dt = cfg.subsample_dt;
            s.spinup_steps = cfg.spinup_steps;
            return s;
        }
    }
}

dynsys::Integrator integrator_choice(const ExperimentConfig& cfg) {
    if (cfg.integrator == "default") return dynsys::default_integrator(system_tag(cfg));
    if (cfg.integrator == "euler") return dynsys::Integrator::euler;
    if (cfg.integrator == "rk4") return dynsys::Integrator::rk4;
    throw std::invalid_argument("unknown integrator: " + cfg.integrator);
}

coarse::CoarsenSpec coarsen_spec(const ExperimentConfig& cfg) {
    coarse::CoarsenSpec spec;
    spec.system = system_tag(cfg);
    spec.temporal_factor = cfg.temporal_factor;
    spec.spatial_factor = cfg.spatial_factor;
    switch (spec.system) {
        case SystemTag::ks:
            spec.fields = 1;
            spec.grid_side = cfg.ks_grid_points;
            spec.grid_dims = 1;
            break;
        case SystemTag::brusselator:
            spec.fields = 2;
            spec.grid_side = cfg.br_side;
            spec.grid_dims = 2;
            break;
        case SystemTag::l96:
            spec.l96_slow = cfg.l96_slow;
            break;
    }
    return spec;
}

coarse::SplitPlan split_plan(const ExperimentConfig& cfg) {
    return {cfg.train_len, cfg.val_len, cfg.holdout_len, cfg.buffer_len};
}

seq::ModelArch model_arch(const ExperimentConfig& cfg) {
    seq::ModelArch arch;
    const coarse::CoarsenSpec cs = coarsen_spec(cfg);
    if (cs.system == SystemTag::l96) {
        arch.d = cfg.l96_slow;
        arch.m = cfg.l96_fast_per_slow;
    } else {
        arch.d = cs.low_res_dim();
        arch.m = cs.refinement();
    }
    arch.hidden = cfg.hidden;
    arch.hx_width = cfg.hx_width;
    arch.hy_width = cfg.hy_width;
    arch.dropout_rate = cfg.dropout_rate;
    return arch;
}

train::TrainPlan train_plan(const ExperimentConfig& cfg, train::TrainMode mode) {
    train::TrainPlan plan;
    plan.phase1_epochs = cfg.phase1_epochs;
    plan.phase2_epochs = cfg.phase2_epochs;
    plan.tbptt_len = cfg.tbptt_len;
    plan.batch_size = cfg.batch_size;
    plan.lr = cfg.lr;
    plan.patience = cfg.patience;
    plan.n_seeds = cfg.n_seeds;
    plan.mode = mode;
    return plan;
}

eval::ForecastConfig forecast_config(const ExperimentConfig& cfg) {
    eval::ForecastConfig fc;
    fc.n_inits = cfg.forecast_inits;
    fc.n_members = cfg.forecast_members;
    fc.n_steps = cfg.forecast_steps;
    fc.warmup = cfg.forecast_warmup;
    fc.seed = mix_seed({cfg.master_seed, 0xfc5eedULL});
    return fc;
}

}  // namespace cgem::cli
