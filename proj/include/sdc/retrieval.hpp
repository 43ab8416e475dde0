#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdc/hash_model.hpp"

namespace sdc {

struct RetrievalResult {
    size_t query_index = 0;
    std::vector<uint32_t> indices;    // ranked gallery indices
    std::vector<uint32_t> distances;  // nondecreasing; ties by ascending index
};

struct PrPoint {
    uint32_t radius = 0;
    double precision = 0.0;
    double recall = 0.0;
};

struct RankPrPoint {
    size_t rank = 0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalSummary {
    double map_at_k = 0.0;
    size_t k = 0;
    std::vector<double> per_query_ap;
    std::vector<PrPoint> pr_curve;          // one point per Hamming radius 0..K
    std::vector<RankPrPoint> pr_by_rank;    // secondary mode: cutoffs 1..k
};

struct EvalOptions {
    // Drop the gallery item whose index equals the query index (for
    // self-retrieval setups where the query set is the gallery).
    bool exclude_self = false;
    bool multi_label = false;
    // Also trace precision/recall over rank cutoffs 1..k.
    bool rank_curve = false;
};

// Popcount of the XOR, masked to k_bits. Equals K/2 (1 - cos) on the
// unpacked +/-1 codes.
uint32_t hamming_distance(std::span<const uint64_t> a, std::span<const uint64_t> b,
                          uint32_t k_bits);
uint32_t hamming_distance(const PackedCodes& a, size_t row_a, const PackedCodes& b, size_t row_b);

// Exhaustive exact top-k scan; ties broken by ascending gallery index.
std::vector<RetrievalResult> search_topk(const PackedCodes& queries, const PackedCodes& gallery,
                                         size_t k);

// AP@k with denominator min(total_relevant, k); 0 when nothing is relevant.
double average_precision(const std::vector<bool>& relevance, size_t total_relevant, size_t k);

// mAP@k plus a pooled precision/recall curve over Hamming radii 0..K.
// Relevance: label equality (single-label) or nonempty bitmask intersection
// (multi-label).
EvalSummary evaluate(const PackedCodes& queries, const PackedCodes& gallery,
                     const std::vector<uint64_t>& query_labels,
                     const std::vector<uint64_t>& gallery_labels, size_t k,
                     const EvalOptions& opts = {});

}  // namespace sdc
