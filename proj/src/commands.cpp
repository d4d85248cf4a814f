#include "cgem/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cgem/dataset_io.hpp"
#include "cgem/model_io.hpp"

namespace cgem::cli {

namespace fs = std::filesystem;
using train::TrainMode;

namespace {

std::string seed_tag(std::size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02zu", i);
    return buf;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& path) { fs::create_directories(path); }

std::size_t env_thread_count() {
    const char* env = std::getenv("CGEM_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v > 1 ? static_cast<std::size_t>(v) : 1;
}

std::uint8_t split_code(const std::string& split) {
    if (split == "train") return 0;
    if (split == "val") return 1;
    if (split == "holdout") return 2;
    throw std::invalid_argument("unknown split: " + split);
}

void write_trainlog_csv(const std::string& path, const train::TrainLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,train_nll,val_ll\n";
    for (std::size_t e = 0; e < log.train_nll.size(); ++e)
        out << e + 1 << ',' << fmt_double(log.train_nll[e]) << ',' << fmt_double(log.val_ll[e])
            << '\n';
}

struct ModeArtifacts {
    std::vector<io::LoadedModel> models;  // non-diverged artifacts, instance order
    std::vector<std::size_t> instances;
};

ModeArtifacts load_mode_artifacts(const ExperimentConfig& cfg, TrainMode mode,
                                  std::uint64_t expect_hash) {
    const std::string mpath = manifest_path(cfg, mode);
    std::ifstream in(mpath);
    if (!in)
        throw std::runtime_error("missing manifest " + mpath + " (run the train command first)");
    nlohmann::json manifest = nlohmann::json::parse(in);

    ModeArtifacts arts;
    for (const auto& entry : manifest.at("artifacts")) {
        // manifest paths are relative to the experiment directory
        const std::string path = cfg.outdir + "/" + entry.at("path").get<std::string>();
        io::LoadedModel lm = io::load_model(path);
        if (lm.info.config_hash != expect_hash)
            throw std::runtime_error("config hash mismatch between dataset and artifact " + path);
        arts.instances.push_back(entry.at("instance").get<std::size_t>());
        arts.models.push_back(std::move(lm));
    }
    if (arts.models.empty())
        throw std::runtime_error("manifest " + mpath + " lists no usable artifacts");
    return arts;
}

}  // namespace

std::string dataset_path(const ExperimentConfig& cfg, const std::string& split) {
    return cfg.outdir + "/data/" + split + ".cgd";
}

std::string artifact_path(const ExperimentConfig& cfg, TrainMode mode, std::size_t seed_idx) {
    return cfg.outdir + "/models/" + to_string(mode) + "_seed" + seed_tag(seed_idx) + ".cgm";
}

std::string manifest_path(const ExperimentConfig& cfg, TrainMode mode) {
    return cfg.outdir + "/models/manifest_" + to_string(mode) + ".json";
}

std::string trainlog_path(const ExperimentConfig& cfg, TrainMode mode, std::size_t seed_idx) {
    return cfg.outdir + "/logs/" + to_string(mode) + "_seed" + seed_tag(seed_idx) + ".csv";
}

std::string summary_csv_path(const ExperimentConfig& cfg) {
    return cfg.outdir + "/eval/summary.csv";
}

std::string per_seed_csv_path(const ExperimentConfig& cfg, TrainMode mode) {
    return cfg.outdir + "/eval/holdout_ll_" + to_string(mode) + ".csv";
}

std::string forecast_csv_path(const ExperimentConfig& cfg, TrainMode mode) {
    return cfg.outdir + "/forecast/forecast_" + to_string(mode) + ".csv";
}

std::string indicator_csv_path(const ExperimentConfig& cfg) {
    return cfg.outdir + "/eval/indicator.csv";
}

void run_simulate(const ExperimentConfig& cfg) {
    const dynsys::SystemSpec spec = system_spec(cfg);
    const coarse::CoarsenSpec cspec = coarsen_spec(cfg);
    const coarse::SplitPlan plan = split_plan(cfg);
    const std::uint64_t hash = config_hash(cfg);

    const std::size_t total_coarse = plan.total();
    const std::size_t n_fine = total_coarse * cspec.temporal_factor;
    std::cout << "simulate: " << cfg.system << " (" << cfg.preset << "), " << n_fine
              << " fine samples -> " << total_coarse << " coarse steps\n";

    dynsys::FineTrajectory fine = dynsys::generate_trajectory(
        spec, mix_seed({cfg.master_seed, 0x51bULL}), n_fine, integrator_choice(cfg));
    coarse::PairedDataset ds = coarse::build_paired_dataset(fine, cspec);
    auto [train_ds, val_ds, holdout_ds] = coarse::split_with_buffer(ds, plan);

    const coarse::Standardizer standardizer = coarse::fit_standardizer(train_ds.x, train_ds.y);
    ensure_dir(cfg.outdir + "/data");

    auto write_split = [&](coarse::PairedDataset& part, const std::string& name) {
        coarse::Standardizer s = standardizer;
        s.apply_x(part.x);
        s.apply_y(part.y);
        io::DatasetHeader header;
        header.config_hash = hash;
        header.system = ds.system;
        header.split = split_code(name);
        header.dt_coarse = ds.dt_coarse;
        header.length = static_cast<std::uint32_t>(part.x.rows);
        header.d = static_cast<std::uint32_t>(ds.d);
        header.m = static_cast<std::uint32_t>(ds.m);
        const std::string path = dataset_path(cfg, name);
        io::save_dataset(path, header, standardizer, part.x, part.y);
        std::cout << "  wrote " << path << " (" << part.x.rows << " x " << ds.d << ", digest "
                  << io::file_digest(path) << ")\n";
    };
    write_split(train_ds, "train");
    write_split(val_ds, "val");
    write_split(holdout_ds, "holdout");
}

void run_train(const ExperimentConfig& cfg, TrainMode mode) {
    const bool need_y = mode == TrainMode::tl;
    io::LoadedDataset train_ds = io::load_dataset(dataset_path(cfg, "train"), need_y);
    io::LoadedDataset val_ds = io::load_dataset(dataset_path(cfg, "val"), need_y);
    const std::uint64_t hash = config_hash(cfg);
    if (train_ds.header.config_hash != val_ds.header.config_hash)
        throw std::runtime_error("train/val datasets come from different configs");

    const seq::ModelArch arch = model_arch(cfg);
    require(arch.d == train_ds.header.d && arch.m == train_ds.header.m,
            "run_train: config architecture does not match the dataset dimensions");

    const train::TrainPlan plan = train_plan(cfg, mode);
    std::cout << "train: mode=" << to_string(mode) << ", seeds=" << plan.n_seeds
              << ", threads=" << env_thread_count() << "\n";

    auto runs = train::seed_sweep(arch, train_ds.standardizer, train_ds.data, val_ds.data, plan,
                                  cfg.master_seed, env_thread_count());

    ensure_dir(cfg.outdir + "/models");
    ensure_dir(cfg.outdir + "/logs");

    nlohmann::json artifacts = nlohmann::json::array();
    std::size_t diverged = 0;
    for (const train::SweepRun& run : runs) {
        if (run.diverged || !run.model.has_value()) {
            ++diverged;
            std::cout << "  seed " << run.instance << ": DIVERGED (excluded from artifacts)\n";
            continue;
        }
        io::ArtifactInfo info;
        info.config_hash = hash;
        info.system = train_ds.header.system;
        info.mode = mode;
        info.seed = run.seed;
        info.best_epoch = static_cast<std::uint32_t>(run.final_phase.best_epoch);
        info.best_val_ll = run.final_phase.best_val_ll;
        const std::string path = artifact_path(cfg, mode, run.instance);
        io::save_model(path, *run.model, info);
        write_trainlog_csv(trainlog_path(cfg, mode, run.instance), run.final_phase);
        if (mode == TrainMode::tl)
            write_trainlog_csv(cfg.outdir + "/logs/" + to_string(mode) + "_seed" +
                                   seed_tag(run.instance) + "_phase1.csv",
                               run.phase1);
        const std::string rel_path =
            "models/" + to_string(mode) + "_seed" + seed_tag(run.instance) + ".cgm";
        artifacts.push_back({{"instance", run.instance},
                             {"path", rel_path},
                             {"best_epoch", run.final_phase.best_epoch},
                             {"best_val_ll", run.final_phase.best_val_ll}});
        std::cout << "  seed " << run.instance << ": best epoch " << run.final_phase.best_epoch
                  << ", val LL " << fmt_double(run.final_phase.best_val_ll) << " ("
                  << run.final_phase.wall_seconds + run.phase1.wall_seconds << " s)\n";
    }
    if (diverged > 0)
        std::cout << "  warning: " << diverged << " run(s) diverged and were excluded\n";

    nlohmann::json manifest;
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(hash));
    manifest["mode"] = to_string(mode);
    manifest["config_hash"] = hash_hex;
    manifest["n_seeds"] = plan.n_seeds;
    manifest["artifacts"] = artifacts;
    std::ofstream mf(manifest_path(cfg, mode));
    if (!mf) throw std::runtime_error("cannot write manifest");
    mf << manifest.dump(2) << '\n';
}

EvaluateResult run_evaluate(const ExperimentConfig& cfg) {
    io::LoadedDataset holdout = io::load_dataset(dataset_path(cfg, "holdout"), false);
    ensure_dir(cfg.outdir + "/eval");

    EvaluateResult result;
    std::ofstream summary(summary_csv_path(cfg));
    if (!summary) throw std::runtime_error("cannot write summary CSV");
    summary << "mode,n_seeds,max_holdout_ll,avg_holdout_ll,ci95_half_width\n";

    for (TrainMode mode : {TrainMode::tl, TrainMode::baseline}) {
        ModeArtifacts arts = load_mode_artifacts(cfg, mode, holdout.header.config_hash);
        std::vector<double> holdout_lls, val_lls;
        std::ofstream per_seed(per_seed_csv_path(cfg, mode));
        if (!per_seed) throw std::runtime_error("cannot write per-seed CSV");
        per_seed << "instance,val_ll,holdout_ll\n";
        for (std::size_t i = 0; i < arts.models.size(); ++i) {
            const double ll = eval::holdout_loglik(arts.models[i].model, holdout.data.X());
            holdout_lls.push_back(ll);
            val_lls.push_back(arts.models[i].info.best_val_ll);
            per_seed << arts.instances[i] << ',' << fmt_double(arts.models[i].info.best_val_ll)
                     << ',' << fmt_double(ll) << '\n';
        }
        eval::SweepSummary s = eval::summarize_sweep(holdout_lls, val_lls, arts.instances);
        summary << to_string(mode) << ',' << holdout_lls.size() << ','
                << fmt_double(s.max_holdout_ll) << ',' << fmt_double(s.average.mean) << ','
                << fmt_double(s.average.half_width) << '\n';
        std::cout << "evaluate " << to_string(mode) << ": max " << fmt_double(s.max_holdout_ll)
                  << ", average " << fmt_double(s.average.mean) << " +- "
                  << fmt_double(s.average.half_width) << " (" << holdout_lls.size()
                  << " seeds)\n";
        (mode == TrainMode::tl ? result.tl : result.baseline) = std::move(s);
    }
    return result;
}

ForecastResult run_forecast(const ExperimentConfig& cfg) {
    io::LoadedDataset holdout = io::load_dataset(dataset_path(cfg, "holdout"), false);
    ensure_dir(cfg.outdir + "/forecast");
    const eval::ForecastConfig fc = forecast_config(cfg);

    ForecastResult result;
    for (TrainMode mode : {TrainMode::tl, TrainMode::baseline}) {
        ModeArtifacts arts = load_mode_artifacts(cfg, mode, holdout.header.config_hash);
        std::size_t best = 0;
        for (std::size_t i = 1; i < arts.models.size(); ++i)
            if (arts.models[i].info.best_val_ll > arts.models[best].info.best_val_ll) best = i;

        eval::ForecastSet set =
            eval::forecast_ensemble(arts.models[best].model, holdout.data, fc);
        std::vector<double> error = eval::forecast_error(set.ensembles);
        std::vector<double> spread = eval::forecast_spread(set.ensembles);

        const std::string path = forecast_csv_path(cfg, mode);
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "lead,error,spread\n";
        for (std::size_t t = 0; t < error.size(); ++t)
            out << t + 1 << ',' << fmt_double(error[t]) << ',' << fmt_double(spread[t]) << '\n';
        std::cout << "forecast " << to_string(mode) << ": seed " << arts.instances[best] << ", "
                  << fc.n_inits << " x " << fc.n_members << " members, " << fc.n_steps
                  << " leads";
        if (set.excluded_members > 0)
            std::cout << " (" << set.excluded_members << " members excluded as non-finite)";
        std::cout << "\n";

        if (mode == TrainMode::tl) {
            result.error_tl = std::move(error);
            result.spread_tl = std::move(spread);
        } else {
            result.error_baseline = std::move(error);
            result.spread_baseline = std::move(spread);
        }
    }
    return result;
}

IndicatorResult run_indicator(const ExperimentConfig& cfg) {
    const seq::ModelArch arch = model_arch(cfg);
    seq::EmulatorModel model(arch, 0);  // parameter count is seed-independent

    IndicatorResult res;
    res.n_params = model.params().parameter_count();
    res.value = eval::tl_benefit_indicator(res.n_params, arch.d, cfg.train_len);
    res.flagged = eval::tl_benefit_flag(res.value);

    ensure_dir(cfg.outdir + "/eval");
    std::ofstream out(indicator_csv_path(cfg));
    if (!out) throw std::runtime_error("cannot write indicator CSV");
    out << "n_params,d,train_len,value,tl_likely_less_beneficial\n";
    out << res.n_params << ',' << arch.d << ',' << cfg.train_len << ',' << fmt_double(res.value)
        << ',' << (res.flagged ? 1 : 0) << '\n';
    std::cout << "indicator: n_params=" << res.n_params << ", d=" << arch.d
              << ", train_len=" << cfg.train_len << " -> " << fmt_double(res.value)
              << (res.flagged ? "  [TL likely less beneficial]" : "") << "\n";
    return res;
}

}  // namespace cgem::cli
