#include "sdc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdc/errors.hpp"
#include "sdc/retrieval.hpp"
#include "sdc/rng.hpp"
#include "sdc/trainer.hpp"

namespace sdc {

namespace {

inline bool shares_label(uint64_t a, uint64_t b, bool multi_label) {
    return multi_label ? (a & b) != 0 : a == b;
}

// Collect qualifying pairs by deterministic scan; used as fallback when
// rejection sampling keeps missing a rare class of pairs.
std::vector<IndexPair> scan_pairs(const std::vector<uint64_t>& labels, bool multi_label,
                                  bool want_positive, size_t limit) {
    std::vector<IndexPair> out;
    size_t n = labels.size();
    for (size_t i = 0; i < n && out.size() < limit; ++i) {
        for (size_t j = i + 1; j < n && out.size() < limit; ++j) {
            if (shares_label(labels[i], labels[j], multi_label) == want_positive) {
                out.emplace_back(uint32_t(i), uint32_t(j));
            }
        }
    }
    return out;
}

std::vector<IndexPair> sample_class(const std::vector<uint64_t>& labels, bool multi_label,
                                    bool want_positive, size_t count, Rng& rng) {
    std::vector<IndexPair> out;
    if (count == 0) return out;
    out.reserve(count);
    size_t n = labels.size();
    size_t attempts = 0;
    size_t max_attempts = 1000 + 1000 * count;
    while (out.size() < count && attempts < max_attempts) {
        ++attempts;
        uint32_t i = uint32_t(rng.next_below(n));
        uint32_t j = uint32_t(rng.next_below(n));
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (shares_label(labels[i], labels[j], multi_label) == want_positive) {
            out.emplace_back(i, j);
        }
    }
    if (out.size() < count) {
        // Qualifying pairs are rare or absent; fall back to an exact scan.
        std::vector<IndexPair> pool = scan_pairs(labels, multi_label, want_positive, count);
        if (pool.empty()) {
            throw DegenerateInputError(std::string("sample_pairs: no ") +
                                       (want_positive ? "positive" : "negative") +
                                       " pairs exist in this label set");
        }
        while (out.size() < count) {
            out.push_back(pool[rng.next_below(pool.size())]);
        }
    }
    return out;
}

}  // namespace

PairSample sample_pairs(const std::vector<uint64_t>& labels, bool multi_label, size_t n_pos,
                        size_t n_neg, uint64_t seed) {
    if (labels.size() < 2) {
        throw DegenerateInputError("sample_pairs: need at least 2 labeled items");
    }
    Rng rng = derive_rng(seed, RngStream::sampling);
    PairSample out;
    out.positive = sample_class(labels, multi_label, true, n_pos, rng);
    out.negative = sample_class(labels, multi_label, false, n_neg, rng);
    return out;
}

SimilarityHistogram build_histogram(const std::vector<double>& sims_pos,
                                    const std::vector<double>& sims_neg, size_t bins) {
    if (bins < 2) {
        throw DomainError("build_histogram: need at least 2 bins");
    }
    if (sims_pos.empty() || sims_neg.empty()) {
        throw DegenerateInputError("build_histogram: empty similarity array");
    }
    SimilarityHistogram h;
    h.bin_edges.resize(bins + 1);
    for (size_t i = 0; i <= bins; ++i) {
        h.bin_edges[i] = -1.0 + 2.0 * double(i) / double(bins);
    }
    h.positive_mass.assign(bins, 0.0);
    h.negative_mass.assign(bins, 0.0);
    h.n_pos = sims_pos.size();
    h.n_neg = sims_neg.size();

    auto accumulate = [&](const std::vector<double>& sims, std::vector<double>& mass) {
        double w = 1.0 / double(sims.size());
        for (double v : sims) {
            if (v < -1.0 || v > 1.0) {
                throw DomainError("build_histogram: similarity outside [-1, 1]");
            }
            size_t bin = std::min(bins - 1, size_t(std::floor((v + 1.0) / 2.0 * double(bins))));
            mass[bin] += w;
        }
    };
    accumulate(sims_pos, h.positive_mass);
    accumulate(sims_neg, h.negative_mass);
    return h;
}

double intersection_score(const SimilarityHistogram& h) {
    double s = 0.0;
    for (size_t i = 0; i < h.positive_mass.size(); ++i) {
        s += std::min(h.positive_mass[i], h.negative_mass[i]);
    }
    return s;
}

CollapseReport collapse_report(const PackedCodes& codes, const std::vector<uint64_t>& labels,
                               bool multi_label, const CollapseOptions& opts) {
    if (labels.size() != codes.n) {
        throw ShapeError("collapse_report: label count does not match code count");
    }
    PairSample pairs = sample_pairs(labels, multi_label, opts.n_pos, opts.n_neg, opts.seed);

    double k = double(codes.k_bits);
    auto sims_of = [&](const std::vector<IndexPair>& ps) {
        std::vector<double> sims;
        sims.reserve(ps.size());
        for (auto [i, j] : ps) {
            uint32_t d = hamming_distance(codes, i, codes, j);
            sims.push_back((k - 2.0 * double(d)) / k);
        }
        return sims;
    };

    CollapseReport report;
    report.options = opts;
    report.positive_sims = sims_of(pairs.positive);
    report.negative_sims = sims_of(pairs.negative);
    report.histogram = build_histogram(report.positive_sims, report.negative_sims, opts.bins);
    report.intersection = intersection_score(report.histogram);
    return report;
}

CollapseReport collapse_report(const HashModel& model, const FeatureMatrix& features,
                               const CollapseOptions& opts) {
    if (!features.has_labels()) {
        throw DegenerateInputError("collapse_report: features carry no labels");
    }
    PackedCodes codes = encode_dataset(model, features);
    return collapse_report(codes, features.labels, features.multi_label, opts);
}

CollapseReport feature_collapse_report(const FeatureMatrix& features,
                                       const CollapseOptions& opts) {
    if (!features.has_labels()) {
        throw DegenerateInputError("feature_collapse_report: features carry no labels");
    }
    PairSample pairs =
        sample_pairs(features.labels, features.multi_label, opts.n_pos, opts.n_neg, opts.seed);
    Matrix normalized = row_l2_normalize(features.data);

    auto sims_of = [&](const std::vector<IndexPair>& ps) {
        std::vector<double> sims;
        sims.reserve(ps.size());
        for (auto [i, j] : ps) {
            const double* a = normalized.data.data() + size_t(i) * normalized.cols;
            const double* b = normalized.data.data() + size_t(j) * normalized.cols;
            double dot = 0.0;
            for (size_t c = 0; c < normalized.cols; ++c) dot += a[c] * b[c];
            sims.push_back(std::clamp(dot, -1.0, 1.0));
        }
        return sims;
    };

    CollapseReport report;
    report.options = opts;
    report.positive_sims = sims_of(pairs.positive);
    report.negative_sims = sims_of(pairs.negative);
    report.histogram = build_histogram(report.positive_sims, report.negative_sims, opts.bins);
    report.intersection = intersection_score(report.histogram);
    return report;
}

}  // namespace sdc
