#pragma once

#include <cstdint>
#include <vector>

namespace sdc {

// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);

// Regularized incomplete beta I_x(a, b): the Beta(a, b) CDF at x.
// Continued fraction with the symmetry switch at x = (a+1)/(a+b+2).
double regularized_incomplete_beta(double a, double b, double x);

// Symmetric-capable calibration distribution over [0, 1].
struct BetaDistribution {
    double alpha = 5.0;
    double beta = 5.0;

    BetaDistribution() = default;
    BetaDistribution(double a, double b);

    double pdf(double x) const;
    double cdf(double x) const;
};

// Quantile function: x with I_x(alpha, beta) = z, bisection-seeded Newton.
double beta_icdf(const BetaDistribution& dist, double z);

// Affine map from the iCDF range [0, 1] onto the cosine range [-1, 1].
double icdf_to_similarity(double u);

// Calibration targets for a batch of n sorted pairs: the iCDF evaluated at
// the quantile midpoints (2i-1)/(2n), mapped to similarity space. Ascending.
std::vector<double> calibration_targets(const BetaDistribution& dist, size_t n);

// Process-wide cache of calibration targets keyed by (alpha, beta, n).
// The quantile grid is fixed by the batch size, so solves are loop-invariant
// across training steps. Safe for concurrent readers.
const std::vector<double>& cached_calibration_targets(const BetaDistribution& dist, size_t n);

// Distribution of the Hamming distance between two uniformly sampled K-bit
// codes: B(K, 0.5).
struct BinomialBucketDistribution {
    uint32_t k_bits = 0;

    explicit BinomialBucketDistribution(uint32_t k);

    // PMF at distance d: C(K, d) / 2^K, evaluated in log space.
    double pmf(uint32_t d) const;

    // Smallest d with CDF(d) >= z.
    uint32_t icdf(double z) const;
};

}  // namespace sdc
