#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sdc/dataio.hpp"
#include "sdc/hash_model.hpp"

namespace sdc {

// Per-class normalized similarity histograms over uniform bins on [-1, 1].
struct SimilarityHistogram {
    std::vector<double> bin_edges;      // bins + 1 edges covering [-1, 1]
    std::vector<double> positive_mass;  // sums to 1
    std::vector<double> negative_mass;  // sums to 1
    size_t n_pos = 0;
    size_t n_neg = 0;
};

using IndexPair = std::pair<uint32_t, uint32_t>;

struct PairSample {
    std::vector<IndexPair> positive;
    std::vector<IndexPair> negative;
};

// Uniform random pairs (i < j, sampled with replacement) split by label
// agreement: positive = equal label, or any shared bit for multi-label.
PairSample sample_pairs(const std::vector<uint64_t>& labels, bool multi_label, size_t n_pos,
                        size_t n_neg, uint64_t seed);

SimilarityHistogram build_histogram(const std::vector<double>& sims_pos,
                                    const std::vector<double>& sims_neg, size_t bins);

// Histogram intersection sum(min(pos, neg)): 1 = identical distributions
// (total collapse), 0 = disjoint supports.
double intersection_score(const SimilarityHistogram& h);

struct CollapseOptions {
    size_t n_pos = 10000;
    size_t n_neg = 100000;
    size_t bins = 200;
    uint64_t seed = 0;
};

struct CollapseReport {
    double intersection = 0.0;
    SimilarityHistogram histogram;
    std::vector<double> positive_sims;
    std::vector<double> negative_sims;
    CollapseOptions options;
};

// Collapse diagnostics on signed codes: cosine of sampled pairs via the
// Hamming identity, so every similarity is an exact lattice value (K-2m)/K.
CollapseReport collapse_report(const PackedCodes& codes, const std::vector<uint64_t>& labels,
                               bool multi_label, const CollapseOptions& opts);

// Convenience: encode with the model, then analyze the codes.
CollapseReport collapse_report(const HashModel& model, const FeatureMatrix& features,
                               const CollapseOptions& opts);

// Same diagnostics on the raw feature cosines (the pre-hashing picture).
CollapseReport feature_collapse_report(const FeatureMatrix& features,
                                       const CollapseOptions& opts);

}  // namespace sdc
