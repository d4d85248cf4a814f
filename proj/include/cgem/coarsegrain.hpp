#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "cgem/dynsys.hpp"
#include "cgem/matrix.hpp"

namespace cgem::coarse {

using dynsys::SystemTag;

/// How a fine trajectory is reduced to the paired (X, Y) representation.
/// For KS and Brusselator both factors apply; for L96 the split is by
/// variable role (slow -> X, fast -> Y) with temporal_factor 1.
struct CoarsenSpec {
    SystemTag system = SystemTag::ks;
    std::size_t temporal_factor = 5;
    std::size_t spatial_factor = 5;   // per axis; ignored for L96
    std::size_t fields = 1;           // independent fields stacked in the state (Brusselator: 2)
    std::size_t grid_side = 100;      // 1-D length or 2-D side per field
    std::size_t grid_dims = 1;        // 1 for KS, 2 for Brusselator
    std::size_t l96_slow = 8;         // used only for L96

    void validate() const;
    std::size_t low_res_dim() const;   // d
    std::size_t refinement() const;    // m, so that Y width = d * m
};

CoarsenSpec default_coarsen_spec(SystemTag tag);

/// Per-dimension standardization statistics, fit on the training split only.
struct Standardizer {
    std::vector<double> x_mean, x_scale, y_mean, y_scale;

    bool empty() const { return x_mean.empty(); }
    void apply_x(Matrix& x) const;
    void invert_x(Matrix& x) const;
    void apply_y(Matrix& y) const;
    void invert_y(Matrix& y) const;
    void apply_x_row(double* row) const;
    void invert_x_row(double* row) const;
};

Standardizer identity_standardizer(std::size_t d, std::size_t dm);

/// Aligned low-resolution targets X and high-resolution auxiliary targets Y
/// on a common coarse time grid.
struct PairedDataset {
    Matrix x;  // [T_c x d]
    Matrix y;  // [T_c x d*m]
    double dt_coarse = 0.0;
    SystemTag system = SystemTag::ks;
    std::size_t d = 0;
    std::size_t m = 0;
    Standardizer standardizer;  // empty until fit
};

struct SplitPlan {
    std::size_t train_len = 0;
    std::size_t val_len = 0;
    std::size_t holdout_len = 0;
    std::size_t buffer_len = 0;

    std::size_t total() const { return train_len + val_len + holdout_len + 2 * buffer_len; }
};

/// Block-mean over non-overlapping groups of `factor` cells (1-D) or
/// factor x factor blocks (2-D), applied to each field independently.
std::vector<double> spatial_block_mean(const std::vector<double>& state, std::size_t factor,
                                       std::size_t fields, std::size_t side,
                                       std::size_t grid_dims);

/// Non-overlapping window means along time; window w covers fine rows
/// [w*factor, (w+1)*factor).
Matrix temporal_block_mean(const Matrix& seq, std::size_t factor);

PairedDataset build_paired_dataset(const dynsys::FineTrajectory& fine, const CoarsenSpec& spec);

std::tuple<PairedDataset, PairedDataset, PairedDataset> split_with_buffer(const PairedDataset& ds,
                                                                          const SplitPlan& plan);

/// Mean/std per dimension over the given (training) data. Dimensions with
/// zero variance get scale 1.
Standardizer fit_standardizer(const Matrix& train_x, const Matrix& train_y);

}  // namespace cgem::coarse
