#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdc/hash_model.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

// Dense feature set with optional labels. Single-label entries hold the
// class id; multi-label entries hold a 64-bit membership bitmask.
struct FeatureMatrix {
    Matrix data;  // n x d, widened to real64 in memory
    std::vector<uint64_t> labels;
    bool multi_label = false;

    size_t n() const { return data.rows; }
    size_t dim() const { return data.cols; }
    bool has_labels() const { return !labels.empty(); }
};

// SDCF feature file: magic "SDCF", version u32=1, n u32, d u32, flags u32
// (bit0 has_labels, bit1 multi_label), payload n*d little-endian real32
// row-major, then labels (n * u32 single-label, n * u64 multi-label).
FeatureMatrix read_features(const std::string& path);
void write_features(const std::string& path, const FeatureMatrix& features);

// CSV fallback: n x d numeric rows, optionally with a final label column.
FeatureMatrix read_features_csv(const std::string& path, bool label_column);

// SDCB code file: magic "SDCB", version u32=1, n u32, k_bits u32, payload
// packed words little-endian with row stride ceil(K/64) words. Padding bits
// must be zero.
PackedCodes read_codes(const std::string& path);
void write_codes(const std::string& path, const PackedCodes& codes);

// Synthetic cluster generator: a desk-scale stand-in for extracted feature
// sets. Centers are iid Gaussian scaled by center_scale; points are center
// plus Gaussian(within_std); labels are cluster ids.
struct SyntheticSpec {
    size_t n_clusters = 4;
    size_t points_per_cluster = 250;
    size_t dim = 128;
    double center_scale = 1.0;
    double within_std = 1.0;
    uint64_t seed = 0;
};

FeatureMatrix generate_synthetic(const SyntheticSpec& spec);

}  // namespace sdc
