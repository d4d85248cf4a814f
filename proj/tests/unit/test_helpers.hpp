#pragma once

#include <cstring>
#include <vector>

#include "cgem/coarsegrain.hpp"
#include "cgem/dynsys.hpp"
#include "cgem/rng.hpp"
#include "cgem/seqmodel.hpp"
#include "cgem/training.hpp"

namespace cgem::test {

inline std::vector<double> random_vector(std::size_t n, RngStream& rng, double lo = -1.0,
                                         double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (double& x : m.data) x = rng.uniform(lo, hi);
    return m;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols &&
           std::memcmp(a.data.data(), b.data.data(), a.size() * sizeof(double)) == 0;
}

inline void zero_all_params(seq::EmulatorModel& model) {
    for (nn::Param& p : model.params().params()) p.value.fill(0.0);
}

inline void zero_head_x(seq::EmulatorModel& model) {
    for (const char* n : {"head_x.W1", "head_x.b1", "head_x.W2", "head_x.b2"})
        model.params().at(n).value.fill(0.0);
}

/// A tiny but real L96 paired dataset for training tests: K=4, J=4,
/// standardized, split train/val/holdout.
struct TinyL96 {
    seq::ModelArch arch;
    coarse::Standardizer standardizer;
    train::SplitData train;
    train::SplitData val;
    train::SplitData holdout;
};

inline TinyL96 make_tiny_l96(std::size_t train_len = 300, std::size_t val_len = 150,
                             std::size_t holdout_len = 150, std::uint64_t seed = 7,
                             std::size_t hidden = 8) {
    dynsys::L96Spec spec;
    spec.slow_count = 4;
    spec.fast_per_slow = 4;
    spec.forcing_f = 10.0;
    spec.dt_solver = 0.001;
    spec.subsample_dt = 0.005;
    spec.spinup_steps = 400;

    const std::size_t total = train_len + val_len + holdout_len + 2 * 10;
    auto fine = dynsys::generate_trajectory(spec, seed, total);
    coarse::CoarsenSpec cspec;
    cspec.system = dynsys::SystemTag::l96;
    cspec.temporal_factor = 1;
    cspec.l96_slow = spec.slow_count;
    auto ds = coarse::build_paired_dataset(fine, cspec);
    auto [train_ds, val_ds, holdout_ds] =
        coarse::split_with_buffer(ds, {train_len, val_len, holdout_len, 10});

    TinyL96 out;
    out.standardizer = coarse::fit_standardizer(train_ds.x, train_ds.y);
    for (auto* part : {&train_ds, &val_ds, &holdout_ds}) {
        out.standardizer.apply_x(part->x);
        out.standardizer.apply_y(part->y);
    }
    out.train = train::SplitData(std::move(train_ds.x), std::move(train_ds.y));
    out.val = train::SplitData(std::move(val_ds.x), std::move(val_ds.y));
    out.holdout = train::SplitData(std::move(holdout_ds.x), std::move(holdout_ds.y));

    out.arch.d = spec.slow_count;
    out.arch.m = spec.fast_per_slow;
    out.arch.hidden = hidden;
    out.arch.hx_width = 8;
    out.arch.hy_width = 4;
    out.arch.dropout_rate = 0.3;
    return out;
}

}  // namespace cgem::test
