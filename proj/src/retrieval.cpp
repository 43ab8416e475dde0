#include "sdc/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "sdc/errors.hpp"

namespace sdc {

uint32_t hamming_distance(std::span<const uint64_t> a, std::span<const uint64_t> b,
                          uint32_t k_bits) {
    uint32_t sum = 0;
    size_t words = a.size();
    size_t full = k_bits / 64;
    for (size_t w = 0; w < full; ++w) {
        sum += uint32_t(std::popcount(a[w] ^ b[w]));
    }
    uint32_t tail = k_bits % 64;
    if (tail != 0) {
        uint64_t mask = (uint64_t(1) << tail) - 1;
        sum += uint32_t(std::popcount((a[words - 1] ^ b[words - 1]) & mask));
    }
    return sum;
}

uint32_t hamming_distance(const PackedCodes& a, size_t row_a, const PackedCodes& b,
                          size_t row_b) {
    if (a.k_bits != b.k_bits) {
        throw ShapeError("hamming_distance: code lengths differ (" + std::to_string(a.k_bits) +
                         " vs " + std::to_string(b.k_bits) + ")");
    }
    return hamming_distance(a.row(row_a), b.row(row_b), a.k_bits);
}

std::vector<RetrievalResult> search_topk(const PackedCodes& queries, const PackedCodes& gallery,
                                         size_t k) {
    if (queries.k_bits != gallery.k_bits) {
        throw ShapeError("search_topk: query and gallery code lengths differ");
    }
    if (gallery.n == 0) {
        throw DegenerateInputError("search_topk: empty gallery");
    }
    if (k == 0) {
        throw DomainError("search_topk: k must be >= 1");
    }
    size_t keep = std::min(k, gallery.n);

    std::vector<RetrievalResult> results(queries.n);
    std::vector<std::pair<uint32_t, uint32_t>> heap;  // (distance, index), max on top
    for (size_t q = 0; q < queries.n; ++q) {
        heap.clear();
        auto qrow = queries.row(q);
        for (size_t g = 0; g < gallery.n; ++g) {
            uint32_t d = hamming_distance(qrow, gallery.row(g), queries.k_bits);
            std::pair<uint32_t, uint32_t> cand{d, uint32_t(g)};
            if (heap.size() < keep) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        std::sort_heap(heap.begin(), heap.end());
        RetrievalResult& r = results[q];
        r.query_index = q;
        r.indices.reserve(keep);
        r.distances.reserve(keep);
        for (auto [d, g] : heap) {
            r.distances.push_back(d);
            r.indices.push_back(g);
        }
    }
    return results;
}

double average_precision(const std::vector<bool>& relevance, size_t total_relevant, size_t k) {
    if (total_relevant == 0) return 0.0;
    size_t depth = std::min(k, relevance.size());
    size_t hits = 0;
    double sum = 0.0;
    for (size_t i = 0; i < depth; ++i) {
        if (relevance[i]) {
            ++hits;
            sum += double(hits) / double(i + 1);
        }
    }
    return sum / double(std::min(total_relevant, k));
}

namespace {

inline bool is_relevant(uint64_t a, uint64_t b, bool multi_label) {
    return multi_label ? (a & b) != 0 : a == b;
}

}  // namespace

EvalSummary evaluate(const PackedCodes& queries, const PackedCodes& gallery,
                     const std::vector<uint64_t>& query_labels,
                     const std::vector<uint64_t>& gallery_labels, size_t k,
                     const EvalOptions& opts) {
    if (queries.k_bits != gallery.k_bits) {
        throw ShapeError("evaluate: query and gallery code lengths differ");
    }
    if (query_labels.size() != queries.n || gallery_labels.size() != gallery.n) {
        throw ShapeError("evaluate: label counts do not match code counts");
    }
    if (gallery.n == 0) {
        throw DegenerateInputError("evaluate: empty gallery");
    }
    if (k == 0) {
        throw DomainError("evaluate: k must be >= 1");
    }
    uint32_t kb = queries.k_bits;

    EvalSummary out;
    out.k = k;
    out.per_query_ap.resize(queries.n);

    // Pooled per-radius counts for the PR curve.
    std::vector<uint64_t> retrieved_at(kb + 1, 0);
    std::vector<uint64_t> relevant_at(kb + 1, 0);
    uint64_t total_relevant_all = 0;

    std::vector<uint64_t> rank_retrieved(opts.rank_curve ? k : 0, 0);
    std::vector<uint64_t> rank_relevant(opts.rank_curve ? k : 0, 0);

    std::vector<uint32_t> dist(gallery.n);
    std::vector<std::pair<uint32_t, uint32_t>> ranked;
    std::vector<bool> flags;
    for (size_t q = 0; q < queries.n; ++q) {
        auto qrow = queries.row(q);
        size_t total_relevant = 0;
        ranked.clear();
        for (size_t g = 0; g < gallery.n; ++g) {
            if (opts.exclude_self && g == q) continue;
            uint32_t d = hamming_distance(qrow, gallery.row(g), kb);
            dist[g] = d;
            bool rel = is_relevant(query_labels[q], gallery_labels[g], opts.multi_label);
            if (rel) ++total_relevant;
            retrieved_at[d] += 1;
            if (rel) relevant_at[d] += 1;
            ranked.emplace_back(d, uint32_t(g));
        }
        total_relevant_all += total_relevant;

        // Top-k by (distance, index); partial sort is enough for AP.
        size_t depth = std::min(k, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + depth, ranked.end());
        flags.assign(depth, false);
        for (size_t i = 0; i < depth; ++i) {
            flags[i] =
                is_relevant(query_labels[q], gallery_labels[ranked[i].second], opts.multi_label);
        }
        out.per_query_ap[q] = average_precision(flags, total_relevant, k);

        if (opts.rank_curve) {
            size_t hits = 0;
            for (size_t r = 0; r < k; ++r) {
                if (r < depth && flags[r]) ++hits;
                rank_retrieved[r] += std::min(r + 1, depth);
                rank_relevant[r] += hits;
            }
        }
    }

    double ap_sum = 0.0;
    for (double ap : out.per_query_ap) ap_sum += ap;
    out.map_at_k = queries.n == 0 ? 0.0 : ap_sum / double(queries.n);

    // Prefix sums over radius; precision of an empty retrieved set is 1.
    out.pr_curve.resize(kb + 1);
    uint64_t ret_cum = 0, rel_cum = 0;
    for (uint32_t r = 0; r <= kb; ++r) {
        ret_cum += retrieved_at[r];
        rel_cum += relevant_at[r];
        PrPoint& p = out.pr_curve[r];
        p.radius = r;
        p.precision = ret_cum == 0 ? 1.0 : double(rel_cum) / double(ret_cum);
        p.recall = total_relevant_all == 0 ? 1.0 : double(rel_cum) / double(total_relevant_all);
    }

    if (opts.rank_curve) {
        out.pr_by_rank.resize(k);
        for (size_t r = 0; r < k; ++r) {
            RankPrPoint& p = out.pr_by_rank[r];
            p.rank = r + 1;
            p.precision = rank_retrieved[r] == 0
                              ? 1.0
                              : double(rank_relevant[r]) / double(rank_retrieved[r]);
            p.recall = total_relevant_all == 0
                           ? 1.0
                           : double(rank_relevant[r]) / double(total_relevant_all);
        }
    }
    return out;
}

}  // namespace sdc
