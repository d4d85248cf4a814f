#pragma once

#include <cstdint>
#include <string>

#include "cgem/seqmodel.hpp"
#include "cgem/training.hpp"

namespace cgem::io {

/// Provenance carried inside a model artifact ("CGM1").
struct ArtifactInfo {
    std::uint32_t version = 1;
    std::uint64_t config_hash = 0;
    dynsys::SystemTag system = dynsys::SystemTag::ks;
    train::TrainMode mode = train::TrainMode::tl;
    std::uint64_t seed = 0;
    std::uint32_t best_epoch = 0;  // 1-based
    double best_val_ll = 0.0;
};

void save_model(const std::string& path, const seq::EmulatorModel& model,
                const ArtifactInfo& info);

struct LoadedModel {
    ArtifactInfo info;
    seq::EmulatorModel model;
};

/// Reconstructs a model with bitwise-identical parameters and trainable
/// flags.
LoadedModel load_model(const std::string& path);

}  // namespace cgem::io
