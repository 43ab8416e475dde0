#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdc/dataio.hpp"
#include "sdc/hash_model.hpp"
#include "sdc/matrix.hpp"

namespace sdc {

// Iterative-quantization model: center, project to the top-K principal
// directions, rotate, sign.
struct ItqModel {
    std::vector<double> mean;  // length d
    Matrix pca;                // d x K, orthonormal columns
    Matrix rotation;           // K x K orthogonal
    uint32_t k_bits = 0;
};

struct FitItqOptions {
    size_t iters = 50;
    // With a rank-deficient covariance the trailing principal directions are
    // numerical noise; either reject (default) or proceed anyway.
    bool allow_rank_deficient = false;
};

struct FitItqResult {
    ItqModel model;
    // Mean squared quantization gap ||B - VR||^2 / (nK) after each
    // alternation round; index 0 is the value under the initial rotation.
    std::vector<double> quantization_errors;
    // max |R^T R - I| entry per round, for orthogonality monitoring.
    std::vector<double> rotation_defects;
};

FitItqResult fit_itq(const FeatureMatrix& features, uint32_t k, const FitItqOptions& opts,
                     uint64_t seed);

PackedCodes encode_itq(const ItqModel& model, const FeatureMatrix& features);

// SDCI checkpoint: same container layout as the hash-model file, distinct
// magic; payload is mean, pca, rotation as little-endian real64 row-major.
void save_itq(const std::string& path, const ItqModel& model);
ItqModel load_itq(const std::string& path);

// Random-hyperplane hashing: Gaussian weights, zero bias, no training.
HashModel fit_lsh(size_t d, uint32_t k, uint64_t seed);

// Symmetric eigendecomposition (cyclic Jacobi), eigenpairs sorted by
// descending eigenvalue. Exposed for the PCA step and its tests.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;  // columns are eigenvectors
};
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace sdc
