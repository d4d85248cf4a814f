#pragma once

#include <cstdint>
#include <string>

#include "cgem/coarsegrain.hpp"
#include "cgem/training.hpp"

namespace cgem::io {

/// On-disk dataset split ("CGD1"): header, standardizer block, standardized
/// X block then Y block (f64 little-endian, time-major), CRC-32 trailer.
struct DatasetHeader {
    std::uint32_t version = 1;
    std::uint64_t config_hash = 0;
    dynsys::SystemTag system = dynsys::SystemTag::ks;
    std::uint8_t split = 0;  // 0 train, 1 val, 2 holdout
    double dt_coarse = 0.0;
    std::uint32_t length = 0;  // T
    std::uint32_t d = 0;
    std::uint32_t m = 0;
};

void save_dataset(const std::string& path, const DatasetHeader& header,
                  const coarse::Standardizer& standardizer, const Matrix& x, const Matrix& y);

struct LoadedDataset {
    DatasetHeader header;
    coarse::Standardizer standardizer;
    train::SplitData data;
};

/// load_y = false skips materializing the Y block (the bytes still stream
/// through the CRC check).
LoadedDataset load_dataset(const std::string& path, bool load_y = true);

/// Content digest (FNV-1a 64) of a whole file, for byte-identity
/// comparisons. Not a CRC: the on-disk formats end in their own CRC-32
/// trailer, and any same-polynomial digest of such files collapses to the
/// CRC residue constant, making comparisons vacuous.
std::uint64_t file_digest(const std::string& path);

}  // namespace cgem::io
