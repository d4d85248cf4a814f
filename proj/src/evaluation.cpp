#include "cgem/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgem::eval {

double holdout_loglik(const seq::EmulatorModel& model, const Matrix& holdout_x) {
    return -seq::nll_lowres(model, holdout_x);
}

Ci confidence_interval_95(const std::vector<double>& values) {
    require(values.size() >= 2, "confidence_interval_95: need at least 2 values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sample_sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sample_sd / std::sqrt(n)};
}

ForecastSet forecast_ensemble(const seq::EmulatorModel& model, const train::SplitData& source,
                              const ForecastConfig& cfg) {
    require(cfg.n_inits >= 1 && cfg.n_members >= 1 && cfg.n_steps >= 1,
            "forecast_ensemble: bad configuration");
    const Matrix& x = source.X();
    const std::size_t d = model.arch().d;
    require(x.cols == d, "forecast_ensemble: source width mismatch");
    require(x.rows > cfg.warmup + cfg.n_steps,
            "forecast_ensemble: source too short for warmup + lead range");

    // Eligible start index s needs warmup history [s-warmup, s) and truth
    // (s, s+n_steps]. Draw M distinct starts.
    const std::size_t lo = cfg.warmup;
    const std::size_t hi = x.rows - 1 - cfg.n_steps;  // inclusive
    require(hi >= lo, "forecast_ensemble: no eligible initial conditions");
    std::vector<std::size_t> eligible(hi - lo + 1);
    for (std::size_t i = 0; i < eligible.size(); ++i) eligible[i] = lo + i;
    require(eligible.size() >= cfg.n_inits,
            "forecast_ensemble: fewer eligible starts than requested inits");
    RngStream pick(mix_seed({cfg.seed, 0xf07ecaULL}));
    pick.shuffle(eligible);
    eligible.resize(cfg.n_inits);
    std::sort(eligible.begin(), eligible.end());

    const coarse::Standardizer& std_ = model.standardizer;

    ForecastSet set;
    set.ensembles.reserve(cfg.n_inits);
    for (std::size_t mi = 0; mi < cfg.n_inits; ++mi) {
        const std::size_t start = eligible[mi];
        Ensemble ens;
        ens.truth = Matrix(cfg.n_steps, d);
        for (std::size_t t = 0; t < cfg.n_steps; ++t) {
            const double* row = x.row(start + 1 + t);
            double* dst = ens.truth.row(t);
            std::copy(row, row + d, dst);
            std_.invert_x_row(dst);
        }

        // Warm-up: h after consuming X[start-warmup .. start-1].
        Matrix warm(cfg.warmup, d);
        std::copy(x.row(start - cfg.warmup), x.row(start - cfg.warmup) + cfg.warmup * d,
                  warm.data.begin());
        std::vector<double> h0(model.arch().hidden, 0.0);
        if (cfg.warmup > 0) {
            Matrix hs = seq::encode_sequence(model, warm);
            h0 = hs.row_copy(hs.rows - 1);
        }

        std::vector<double> x0 = x.row_copy(start);
        std_.invert_x_row(x0.data());

        ens.members.reserve(cfg.n_members);
        for (std::size_t ni = 0; ni < cfg.n_members; ++ni) {
            seq::RolloutConfig rc;
            rc.n_steps = cfg.n_steps;
            rc.noise_on = cfg.noise_on;
            rc.seed = mix_seed({cfg.seed, static_cast<std::uint64_t>(mi),
                                static_cast<std::uint64_t>(ni)});
            seq::RolloutResult r = seq::rollout(model, x0, &h0, rc);
            if (r.truncated || r.steps_completed < cfg.n_steps) {
                ++set.excluded_members;
                continue;
            }
            ens.members.push_back(std::move(r.states));
        }
        require(!ens.members.empty(), "forecast_ensemble: all members diverged for one init");
        set.ensembles.push_back(std::move(ens));
    }
    return set;
}

namespace {

void check_aligned(const std::vector<Ensemble>& ensembles) {
    require(!ensembles.empty(), "forecast curves: empty ensemble set");
    const Matrix& t0 = ensembles.front().truth;
    for (const Ensemble& e : ensembles) {
        require(e.truth.rows == t0.rows && e.truth.cols == t0.cols,
                "forecast curves: misaligned truth");
        for (const Matrix& m : e.members)
            require(m.rows == t0.rows && m.cols == t0.cols,
                    "forecast curves: misaligned member");
    }
}

Matrix member_mean(const Ensemble& e) {
    Matrix mean(e.truth.rows, e.truth.cols);
    for (const Matrix& m : e.members)
        for (std::size_t i = 0; i < mean.size(); ++i) mean.data[i] += m.data[i];
    const double n = static_cast<double>(e.members.size());
    for (double& v : mean.data) v /= n;
    return mean;
}

}  // namespace

std::vector<double> forecast_error(const std::vector<Ensemble>& ensembles) {
    check_aligned(ensembles);
    const std::size_t n_steps = ensembles.front().truth.rows;
    const std::size_t d = ensembles.front().truth.cols;
    std::vector<double> acc(n_steps, 0.0);
    for (const Ensemble& e : ensembles) {
        const Matrix mean = member_mean(e);
        for (std::size_t t = 0; t < n_steps; ++t)
            for (std::size_t i = 0; i < d; ++i) {
                const double diff = e.truth(t, i) - mean(t, i);
                acc[t] += diff * diff;
            }
    }
    const double norm = static_cast<double>(ensembles.size() * d);
    for (double& v : acc) v = std::sqrt(v / norm);
    return acc;
}

std::vector<double> forecast_spread(const std::vector<Ensemble>& ensembles) {
    check_aligned(ensembles);
    const std::size_t n_steps = ensembles.front().truth.rows;
    const std::size_t d = ensembles.front().truth.cols;
    std::vector<double> acc(n_steps, 0.0);
    std::size_t member_total = 0;
    for (const Ensemble& e : ensembles) {
        const Matrix mean = member_mean(e);
        member_total += e.members.size();
        for (const Matrix& m : e.members)
            for (std::size_t t = 0; t < n_steps; ++t)
                for (std::size_t i = 0; i < d; ++i) {
                    const double diff = m(t, i) - mean(t, i);
                    acc[t] += diff * diff;
                }
    }
    const double norm = static_cast<double>(member_total * d);
    for (double& v : acc) v = std::sqrt(v / norm);
    return acc;
}

double tl_benefit_indicator(std::size_t n_params, std::size_t d, std::size_t train_len) {
    require(n_params >= 1 && d >= 1 && train_len >= 1, "tl_benefit_indicator: inputs must be >= 1");
    return std::pow(static_cast<double>(n_params), 0.1) * std::sqrt(static_cast<double>(d)) *
           1e4 / std::pow(static_cast<double>(train_len), 1.5);
}

bool tl_benefit_flag(double indicator_value) { return indicator_value <= 1.0; }

SweepSummary summarize_sweep(const std::vector<double>& holdout_lls,
                             const std::vector<double>& validation_lls,
                             const std::vector<std::size_t>& instance_ids) {
    require(holdout_lls.size() == validation_lls.size() &&
                holdout_lls.size() == instance_ids.size(),
            "summarize_sweep: per-seed vectors must align");
    require(holdout_lls.size() >= 2, "summarize_sweep: need at least 2 seeds");

    SweepSummary s;
    s.holdout_lls = holdout_lls;
    std::size_t best = 0;
    for (std::size_t i = 1; i < validation_lls.size(); ++i)
        if (validation_lls[i] > validation_lls[best]) best = i;
    s.max_seed = instance_ids[best];
    s.max_holdout_ll = holdout_lls[best];
    s.average = confidence_interval_95(holdout_lls);
    return s;
}

}  // namespace cgem::eval
