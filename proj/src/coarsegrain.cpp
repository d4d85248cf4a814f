#include "cgem/coarsegrain.hpp"

#include <cmath>
#include <stdexcept>

namespace cgem::coarse {

void CoarsenSpec::validate() const {
    require(temporal_factor >= 1, "CoarsenSpec: temporal_factor must be >= 1");
    if (system == SystemTag::l96) {
        require(temporal_factor == 1, "CoarsenSpec: L96 uses temporal_factor 1");
        return;
    }
    require(spatial_factor >= 1, "CoarsenSpec: spatial_factor must be >= 1");
    require(grid_side % spatial_factor == 0,
            "CoarsenSpec: spatial_factor must divide the grid extent");
}

std::size_t CoarsenSpec::low_res_dim() const {
    if (system == SystemTag::l96) return l96_slow;
    std::size_t per_field = grid_side / spatial_factor;
    if (grid_dims == 2) per_field *= per_field;
    return fields * per_field;
}

std::size_t CoarsenSpec::refinement() const {
    if (system == SystemTag::l96) return 0;  // set from the trajectory layout
    std::size_t m = spatial_factor;
    if (grid_dims == 2) m *= spatial_factor;
    return m;
}

CoarsenSpec default_coarsen_spec(SystemTag tag) {
    CoarsenSpec spec;
    spec.system = tag;
    switch (tag) {
        case SystemTag::ks:
            spec.temporal_factor = 5;
            spec.spatial_factor = 5;
            spec.fields = 1;
            spec.grid_side = 100;
            spec.grid_dims = 1;
            break;
        case SystemTag::brusselator:
            spec.temporal_factor = 5;
            spec.spatial_factor = 8;
            spec.fields = 2;
            spec.grid_side = 64;
            spec.grid_dims = 2;
            break;
        case SystemTag::l96:
            spec.temporal_factor = 1;
            spec.l96_slow = 8;
            break;
    }
    return spec;
}

namespace {

void scale_rows(Matrix& data, const std::vector<double>& mean, const std::vector<double>& scale,
                bool forward) {
    require(data.cols == mean.size(), "Standardizer: dimension mismatch");
    for (std::size_t t = 0; t < data.rows; ++t) {
        double* row = data.row(t);
        for (std::size_t i = 0; i < data.cols; ++i)
            row[i] = forward ? (row[i] - mean[i]) / scale[i] : row[i] * scale[i] + mean[i];
    }
}

}  // namespace

void Standardizer::apply_x(Matrix& x) const { scale_rows(x, x_mean, x_scale, true); }
void Standardizer::invert_x(Matrix& x) const { scale_rows(x, x_mean, x_scale, false); }
void Standardizer::apply_y(Matrix& y) const { scale_rows(y, y_mean, y_scale, true); }
void Standardizer::invert_y(Matrix& y) const { scale_rows(y, y_mean, y_scale, false); }

void Standardizer::apply_x_row(double* row) const {
    for (std::size_t i = 0; i < x_mean.size(); ++i) row[i] = (row[i] - x_mean[i]) / x_scale[i];
}

void Standardizer::invert_x_row(double* row) const {
    for (std::size_t i = 0; i < x_mean.size(); ++i) row[i] = row[i] * x_scale[i] + x_mean[i];
}

Standardizer identity_standardizer(std::size_t d, std::size_t dm) {
    Standardizer s;
    s.x_mean.assign(d, 0.0);
    s.x_scale.assign(d, 1.0);
    s.y_mean.assign(dm, 0.0);
    s.y_scale.assign(dm, 1.0);
    return s;
}

std::vector<double> spatial_block_mean(const std::vector<double>& state, std::size_t factor,
                                       std::size_t fields, std::size_t side,
                                       std::size_t grid_dims) {
    require(factor >= 1, "spatial_block_mean: factor must be >= 1");
    require(side % factor == 0, "spatial_block_mean: factor must divide the extent");
    const std::size_t cells = grid_dims == 2 ? side * side : side;
    require(state.size() == fields * cells, "spatial_block_mean: layout mismatch");

    const std::size_t out_side = side / factor;
    const std::size_t out_cells = grid_dims == 2 ? out_side * out_side : out_side;
    std::vector<double> out(fields * out_cells, 0.0);

    for (std::size_t f = 0; f < fields; ++f) {
        const double* in = state.data() + f * cells;
        double* dst = out.data() + f * out_cells;
        if (grid_dims == 1) {
            for (std::size_t b = 0; b < out_side; ++b) {
                double sum = 0.0;
                for (std::size_t i = 0; i < factor; ++i) sum += in[b * factor + i];
                dst[b] = sum / static_cast<double>(factor);
            }
        } else {
            const double norm = static_cast<double>(factor * factor);
            for (std::size_t br = 0; br < out_side; ++br) {
                for (std::size_t bc = 0; bc < out_side; ++bc) {
                    double sum = 0.0;
                    for (std::size_t r = 0; r < factor; ++r)
                        for (std::size_t c = 0; c < factor; ++c)
                            sum += in[(br * factor + r) * side + bc * factor + c];
                    dst[br * out_side + bc] = sum / norm;
                }
            }
        }
    }
    return out;
}

Matrix temporal_block_mean(const Matrix& seq, std::size_t factor) {
    require(factor >= 1, "temporal_block_mean: factor must be >= 1");
    require(seq.rows % factor == 0, "temporal_block_mean: factor must divide the length");
    Matrix out(seq.rows / factor, seq.cols);
    const double norm = static_cast<double>(factor);
    for (std::size_t w = 0; w < out.rows; ++w) {
        double* dst = out.row(w);
        for (std::size_t s = 0; s < factor; ++s) {
            const double* src = seq.row(w * factor + s);
            for (std::size_t i = 0; i < seq.cols; ++i) dst[i] += src[i];
        }
        for (std::size_t i = 0; i < seq.cols; ++i) dst[i] /= norm;
    }
    return out;
}

PairedDataset build_paired_dataset(const dynsys::FineTrajectory& fine, const CoarsenSpec& spec) {
    spec.validate();
    require(fine.system == spec.system, "build_paired_dataset: system tag mismatch");
    require(fine.states.rows % spec.temporal_factor == 0,
            "build_paired_dataset: fine length not divisible by temporal_factor");

    PairedDataset ds;
    ds.system = spec.system;
    ds.dt_coarse = fine.dt * static_cast<double>(spec.temporal_factor);

    if (spec.system == SystemTag::l96) {
        const std::size_t total = fine.states.cols;
        const std::size_t slow = spec.l96_slow;
        require(slow < total, "build_paired_dataset: L96 layout mismatch");
        const std::size_t fast = total - slow;
        require(fast % slow == 0, "build_paired_dataset: L96 fast block not a multiple of slow");
        ds.d = slow;
        ds.m = fast / slow;
        ds.x = Matrix(fine.states.rows, slow);
        ds.y = Matrix(fine.states.rows, fast);
        for (std::size_t t = 0; t < fine.states.rows; ++t) {
            const double* src = fine.states.row(t);
            std::copy(src, src + slow, ds.x.row(t));
            std::copy(src + slow, src + total, ds.y.row(t));
        }
        return ds;
    }

    ds.y = temporal_block_mean(fine.states, spec.temporal_factor);
    ds.d = spec.low_res_dim();
    ds.m = spec.refinement();
    require(ds.d * ds.m == fine.states.cols, "build_paired_dataset: layout mismatch");
    ds.x = Matrix(ds.y.rows, ds.d);
    for (std::size_t t = 0; t < ds.y.rows; ++t) {
        std::vector<double> reduced = spatial_block_mean(ds.y.row_copy(t), spec.spatial_factor,
                                                         spec.fields, spec.grid_side,
                                                         spec.grid_dims);
        std::copy(reduced.begin(), reduced.end(), ds.x.row(t));
    }
    return ds;
}

std::tuple<PairedDataset, PairedDataset, PairedDataset> split_with_buffer(const PairedDataset& ds,
                                                                          const SplitPlan& plan) {
    require(plan.train_len >= 1 && plan.val_len >= 1 && plan.holdout_len >= 1,
            "split_with_buffer: all split lengths must be >= 1");
    require(plan.total() <= ds.x.rows, "split_with_buffer: plan exceeds dataset length");

    auto slice = [&](std::size_t begin, std::size_t len) {
        PairedDataset part;
        part.system = ds.system;
        part.dt_coarse = ds.dt_coarse;
        part.d = ds.d;
        part.m = ds.m;
        part.standardizer = ds.standardizer;
        part.x = Matrix(len, ds.x.cols);
        part.y = Matrix(len, ds.y.cols);
        for (std::size_t t = 0; t < len; ++t) {
            std::copy(ds.x.row(begin + t), ds.x.row(begin + t) + ds.x.cols, part.x.row(t));
            std::copy(ds.y.row(begin + t), ds.y.row(begin + t) + ds.y.cols, part.y.row(t));
        }
        return part;
    };

    const std::size_t val_begin = plan.train_len + plan.buffer_len;
    const std::size_t holdout_begin = val_begin + plan.val_len + plan.buffer_len;
    return {slice(0, plan.train_len), slice(val_begin, plan.val_len),
            slice(holdout_begin, plan.holdout_len)};
}

namespace {

void fit_dims(const Matrix& data, std::vector<double>& mean, std::vector<double>& scale) {
    mean.assign(data.cols, 0.0);
    scale.assign(data.cols, 1.0);
    const double n = static_cast<double>(data.rows);
    for (std::size_t t = 0; t < data.rows; ++t) {
        const double* row = data.row(t);
        for (std::size_t i = 0; i < data.cols; ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= n;
    std::vector<double> var(data.cols, 0.0);
    for (std::size_t t = 0; t < data.rows; ++t) {
        const double* row = data.row(t);
        for (std::size_t i = 0; i < data.cols; ++i) {
            const double dvi = row[i] - mean[i];
            var[i] += dvi * dvi;
        }
    }
    for (std::size_t i = 0; i < data.cols; ++i) scale[i] = var[i] > 0.0 ? std::sqrt(var[i] / n) : 1.0;
}

}  // namespace

Standardizer fit_standardizer(const Matrix& train_x, const Matrix& train_y) {
    require(train_x.rows >= 1, "fit_standardizer: empty training data");
    Standardizer s;
    fit_dims(train_x, s.x_mean, s.x_scale);
    fit_dims(train_y, s.y_mean, s.y_scale);
    return s;
}

}  // namespace cgem::coarse
