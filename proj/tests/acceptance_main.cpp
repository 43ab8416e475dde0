// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any executed criterion fails.
//
//  1  Hamming/cosine identity, exact over random packed codes
//  2  beta iCDF against an independent quadrature-bisection oracle
//  3  analytic gradients against central finite differences
//  4  per-bin calibration sum against the Wasserstein integral
//  5  binomial bucket law, exhaustive (rational) and sampled (chi-square)
//  6  collapse-mitigation ordering on the synthetic four-cluster set
//  7  ITQ objective monotonicity and rotation orthogonality
//  8  CLI determinism: byte-identical artifacts across reruns
//  9  evaluate() against a naive full-sort mAP reference

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sdc/analysis.hpp"
#include "sdc/baselines.hpp"
#include "sdc/calibration.hpp"
#include "sdc/dataio.hpp"
#include "sdc/losses.hpp"
#include "sdc/retrieval.hpp"
#include "sdc/rng.hpp"
#include "sdc/trainer.hpp"
#include "support.hpp"

using namespace sdc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
};

Matrix random_sign_matrix(size_t rows, size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.next_u64() & 1 ? 1.0 : -1.0;
    return m;
}

Matrix random_gaussian_matrix(size_t rows, size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.next_gaussian();
    return m;
}

// ---- criterion 1: Eq. D_h = K/2 (1 - cos) exact over packed codes ----

Outcome criterion_1() {
    Outcome out;
    Rng rng(101);
    const size_t total_pairs = 100000;
    const size_t chunk = 10000;
    for (uint32_t k : {16u, 32u, 64u}) {
        size_t mismatches = 0;
        double worst_rounding = 0.0;
        for (size_t done = 0; done < total_pairs; done += chunk) {
            Matrix a = random_sign_matrix(chunk, k, rng);
            Matrix b = random_sign_matrix(chunk, k, rng);
            PackedCodes pa = pack(a);
            PackedCodes pb = pack(b);
            for (size_t i = 0; i < chunk; ++i) {
                uint32_t d = hamming_distance(pa, i, pb, i);
                double dot = 0.0;
                for (size_t c = 0; c < k; ++c) dot += a(i, c) * b(i, c);
                double via_cos = double(k) / 2.0 * (1.0 - dot / double(k));
                double rounded = std::round(via_cos);
                worst_rounding = std::max(worst_rounding, std::fabs(via_cos - rounded));
                if (uint32_t(rounded) != d) ++mismatches;
            }
        }
        if (mismatches != 0) {
            out.fail("K=" + std::to_string(k) + ": " + std::to_string(mismatches) +
                     " mismatches");
        }
        if (worst_rounding > 1e-9) {
            out.fail("K=" + std::to_string(k) + ": rounding residual " +
                     std::to_string(worst_rounding));
        }
    }
    if (out.pass) out.detail = "3x100000 pairs, popcount == K/2(1-cos) exactly";
    return out;
}

// ---- criterion 2: beta iCDF vs independent quadrature oracle ----

Outcome criterion_2() {
    Outcome out;
    double worst_gap = 0.0, worst_sym = 0.0;
    for (double shape : {1.0, 2.0, 5.0, 10.0}) {
        BetaDistribution dist(shape, shape);
        oracle::QuadratureBetaCdf ref(shape, shape);
        for (int i = 1; i <= 99; ++i) {
            double z = double(i) / 100.0;
            double got = beta_icdf(dist, z);
            worst_gap = std::max(worst_gap, std::fabs(got - ref.icdf(z)));
            double mirror = beta_icdf(dist, 1.0 - z);
            worst_sym = std::max(worst_sym, std::fabs(got + mirror - 1.0));
        }
    }
    if (worst_gap >= 1e-8) out.fail("oracle gap " + std::to_string(worst_gap));
    if (worst_sym >= 1e-8) out.fail("symmetry defect " + std::to_string(worst_sym));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max oracle gap %.2e, max symmetry defect %.2e", worst_gap,
                  worst_sym);
    if (out.pass) out.detail = buf;
    return out;
}

// ---- criterion 3: gradient fidelity ----

Outcome criterion_3() {
    Outcome out;
    Rng rng(303);
    BetaDistribution calib(5.0, 5.0);
    const double h = 1e-5;
    const double tol = 1e-4;
    const int batches = 20;
    double worst = 0.0;

    auto record = [&](const char* name, double gap) {
        worst = std::max(worst, gap);
        if (gap >= tol) {
            out.fail(std::string(name) + " gap " + std::to_string(gap));
        }
    };

    for (int rep = 0; rep < batches; ++rep) {
        Matrix x = random_gaussian_matrix(5, 6, rng);

        // sdc, steering clear of the |.| kinks
        Matrix f = random_gaussian_matrix(5, 4, rng);
        for (int guard = 0; guard < 100; ++guard) {
            SimilarityBatch b = build_pair_batch(x, f);
            const auto& targets = cached_calibration_targets(calib, b.size());
            std::vector<size_t> order(b.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](size_t l, size_t r) { return b.t[l] < b.t[r]; });
            double closest = 1e9;
            for (size_t i = 0; i < order.size(); ++i) {
                closest = std::min(closest, std::fabs(b.s[order[i]] - targets[i]));
            }
            if (closest > 1e-3) break;
            f = random_gaussian_matrix(5, 4, rng);
        }
        {
            LossValueAndGrad got = sdc_loss(build_pair_batch(x, f), calib);
            Matrix fd = oracle::finite_difference_grad(
                [&](const Matrix& p) { return sdc_loss(build_pair_batch(x, p), calib).value; },
                f, h);
            record("sdc", oracle::gradient_gap(got.grad_f, fd));
        }

        // quantization, entries pushed away from the sign flip
        Matrix fq = random_gaussian_matrix(4, 5, rng);
        for (double& v : fq.data) {
            if (std::fabs(v) < 5e-3) v = v < 0.0 ? -5e-3 : 5e-3;
        }
        {
            LossValueAndGrad got = quantization_loss(fq);
            Matrix fd = oracle::finite_difference_grad(
                [&](const Matrix& p) { return quantization_loss(p).value; }, fq, h);
            record("quantization", oracle::gradient_gap(got.grad_f, fd));
        }

        // preservation p = 2 and p = 1
        for (int p : {2, 1}) {
            Matrix fp = random_gaussian_matrix(5, 4, rng);
            if (p == 1) {
                for (int guard = 0; guard < 100; ++guard) {
                    SimilarityBatch b = build_pair_batch(x, fp);
                    double closest = 1e9;
                    for (size_t i = 0; i < b.size(); ++i) {
                        closest = std::min(closest, std::fabs(b.s[i] - b.t[i]));
                    }
                    if (closest > 1e-3) break;
                    fp = random_gaussian_matrix(5, 4, rng);
                }
            }
            LossValueAndGrad got = preservation_loss(build_pair_batch(x, fp), p);
            Matrix fd = oracle::finite_difference_grad(
                [&](const Matrix& probe) {
                    return preservation_loss(build_pair_batch(x, probe), p).value;
                },
                fp, h);
            record(p == 2 ? "preservation-p2" : "preservation-p1",
                   oracle::gradient_gap(got.grad_f, fd));
        }

        // contrastive, both views
        Matrix v1 = random_gaussian_matrix(4, 8, rng);
        Matrix v2 = random_gaussian_matrix(4, 8, rng);
        {
            ContrastiveLoss got = contrastive_loss(v1, v2, 0.5);
            Matrix fd1 = oracle::finite_difference_grad(
                [&](const Matrix& p) { return contrastive_loss(p, v2, 0.5).value; }, v1, h);
            Matrix fd2 = oracle::finite_difference_grad(
                [&](const Matrix& p) { return contrastive_loss(v1, p, 0.5).value; }, v2, h);
            record("contrastive-v1", oracle::gradient_gap(got.grad_view1, fd1));
            record("contrastive-v2", oracle::gradient_gap(got.grad_view2, fd2));
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "20 batches x 5 losses, worst relative gap %.2e", worst);
    if (out.pass) out.detail = buf;
    return out;
}

// ---- criterion 4: per-bin sum vs numerical Wasserstein integral ----

Outcome criterion_4() {
    Outcome out;
    Rng rng(404);
    BetaDistribution calib(5.0, 5.0);
    for (size_t n : {size_t(100), size_t(1000)}) {
        std::vector<double> s(n);
        for (double& v : s) v = 2.0 * rng.next_double() - 1.0;
        std::sort(s.begin(), s.end());

        SimilarityBatch batch;
        batch.t = s;
        batch.s = s;
        size_t rows = 2;
        while (rows * (rows - 1) / 2 < n) ++rows;
        batch.codes = random_gaussian_matrix(rows, 8, rng);
        for (uint32_t i = 0; i < rows && batch.pair_index.size() < n; ++i) {
            for (uint32_t j = i + 1; j < rows && batch.pair_index.size() < n; ++j) {
                batch.pair_index.emplace_back(i, j);
            }
        }
        double loss = sdc_loss(batch, calib).value;

        double integral = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double lo = double(i) / double(n);
            double hi = double(i + 1) / double(n);
            auto gap = [&](double z) {
                return std::fabs(s[i] - icdf_to_similarity(beta_icdf(calib, z)));
            };
            double cross = calib.cdf((s[i] + 1.0) / 2.0);
            if (cross > lo && cross < hi) {
                integral += oracle::adaptive_simpson(gap, lo, cross, 1e-10);
                integral += oracle::adaptive_simpson(gap, cross, hi, 1e-10);
            } else {
                integral += oracle::adaptive_simpson(gap, lo, hi, 1e-10);
            }
        }
        double gap = std::fabs(loss - integral);
        double bound = 2.0 / double(n);
        if (gap >= bound) {
            out.fail("n=" + std::to_string(n) + ": |sum - integral| = " + std::to_string(gap) +
                     " >= " + std::to_string(bound));
        } else {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "n=%zu gap %.2e < %.0e", n, gap, bound);
            if (!out.detail.empty()) out.detail += "; ";
            out.detail += buf;
        }
    }

    // quantile-sampled similarities must calibrate to (numerically) zero loss
    const size_t n = 500;
    std::vector<double> targets = calibration_targets(calib, n);
    SimilarityBatch batch;
    batch.t = targets;
    batch.s = targets;
    size_t rows = 2;
    while (rows * (rows - 1) / 2 < n) ++rows;
    batch.codes = random_gaussian_matrix(rows, 8, rng);
    for (uint32_t i = 0; i < rows && batch.pair_index.size() < n; ++i) {
        for (uint32_t j = i + 1; j < rows && batch.pair_index.size() < n; ++j) {
            batch.pair_index.emplace_back(i, j);
        }
    }
    double loss = sdc_loss(batch, calib).value;
    if (loss >= 1e-8) {
        out.fail("quantile-sampled s left residual loss " + std::to_string(loss));
    } else {
        out.detail += "; quantile-sampled loss < 1e-8";
    }
    return out;
}

// ---- criterion 5: binomial bucket law ----

Outcome criterion_5() {
    Outcome out;
    // exhaustive rational check over all ordered pairs for K <= 12
    for (uint32_t k = 1; k <= 12; ++k) {
        std::vector<uint64_t> counts(k + 1, 0);
        uint32_t codes = 1u << k;
        for (uint32_t a = 0; a < codes; ++a) {
            for (uint32_t b = 0; b < codes; ++b) {
                counts[uint32_t(std::popcount(a ^ b))] += 1;
            }
        }
        std::vector<uint64_t> choose = oracle::binomial_row(k);
        BinomialBucketDistribution law(k);
        for (uint32_t d = 0; d <= k; ++d) {
            // counts / 4^K == C(K, d) / 2^K  <=>  counts == C(K, d) * 2^K
            if (counts[d] != choose[d] * uint64_t(codes)) {
                out.fail("K=" + std::to_string(k) + " d=" + std::to_string(d) +
                         ": exhaustive count mismatch");
            }
            double exact = std::ldexp(double(choose[d]), -int(k));
            if (std::fabs(law.pmf(d) - exact) > 1e-12) {
                out.fail("K=" + std::to_string(k) + " d=" + std::to_string(d) +
                         ": pmf deviates from the exact rational");
            }
        }
    }

    // chi-square fit of sampled 64-bit pairs
    Rng rng(505);
    const uint32_t k = 64;
    const size_t pairs = 100000;
    std::vector<uint64_t> counts(k + 1, 0);
    {
        Matrix a = random_sign_matrix(pairs, k, rng);
        Matrix b = random_sign_matrix(pairs, k, rng);
        PackedCodes pa = pack(a);
        PackedCodes pb = pack(b);
        for (size_t i = 0; i < pairs; ++i) counts[hamming_distance(pa, i, pb, i)] += 1;
    }
    BinomialBucketDistribution law(k);
    double stat = 0.0;
    size_t bins = 0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (uint32_t d = 0; d <= k; ++d) {
        double expected = law.pmf(d) * double(pairs);
        if (expected < 5.0) {
            pooled_obs += double(counts[d]);
            pooled_exp += expected;
            continue;
        }
        stat += (double(counts[d]) - expected) * (double(counts[d]) - expected) / expected;
        ++bins;
    }
    if (pooled_exp > 0.0) {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++bins;
    }
    double pvalue = oracle::chi_square_pvalue(stat, double(bins - 1));
    if (pvalue <= 0.01) {
        out.fail("chi-square p = " + std::to_string(pvalue));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "K=1..12 exhaustively rational-exact; chi2 p = %.3f", pvalue);
    if (out.pass) out.detail = buf;
    return out;
}

// ---- criterion 6: collapse-mitigation ordering ----

Outcome criterion_6() {
    Outcome out;
    const double margin = 0.02;
    int votes = 0;
    std::string per_seed;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        SyntheticSpec spec;
        spec.n_clusters = 4;
        spec.points_per_cluster = 250;
        spec.dim = 128;
        spec.center_scale = 0.5;  // tuned: raw intersection sits inside [0.15, 0.5]
        spec.within_std = 1.0;
        spec.seed = seed;
        FeatureMatrix features = generate_synthetic(spec);

        CollapseOptions copts;
        copts.n_pos = 10000;
        copts.n_neg = 100000;
        copts.seed = seed;
        double raw = feature_collapse_report(features, copts).intersection;
        if (raw < 0.15 || raw > 0.5) {
            out.fail("seed " + std::to_string(seed) + ": raw intersection " +
                     std::to_string(raw) + " outside [0.15, 0.5]");
            continue;
        }

        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.batch_size = 64;
        cfg.k_bits = 16;
        cfg.lambda_cl = 0.0;
        cfg.seed = seed;
        TrainResult sdc_run = train(features, cfg);

        TrainConfig pres_cfg = cfg;
        pres_cfg.objective = Objective::preservation;
        TrainResult pres_run = train(features, pres_cfg);

        HashModel lsh = fit_lsh(features.dim(), cfg.k_bits, seed);

        PackedCodes sdc_codes = encode_dataset(sdc_run.model, features);
        PackedCodes pres_codes = encode_dataset(pres_run.model, features);
        PackedCodes lsh_codes = encode_dataset(lsh, features);

        double i_sdc = collapse_report(sdc_codes, features.labels, false, copts).intersection;
        double i_pres = collapse_report(pres_codes, features.labels, false, copts).intersection;

        EvalOptions eopts;
        eopts.exclude_self = true;
        double m_sdc =
            evaluate(sdc_codes, sdc_codes, features.labels, features.labels, 100, eopts).map_at_k;
        double m_pres =
            evaluate(pres_codes, pres_codes, features.labels, features.labels, 100, eopts)
                .map_at_k;
        double m_lsh =
            evaluate(lsh_codes, lsh_codes, features.labels, features.labels, 100, eopts).map_at_k;

        bool vote = i_sdc <= i_pres - margin && m_sdc >= m_pres + margin &&
                    m_pres >= m_lsh + margin;
        votes += vote;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "seed %llu %s (inter %.3f<%.3f, map %.3f>%.3f>%.3f)",
                      (unsigned long long)seed, vote ? "yes" : "no", i_sdc, i_pres, m_sdc,
                      m_pres, m_lsh);
        if (!per_seed.empty()) per_seed += "; ";
        per_seed += buf;
    }
    if (votes < 2) {
        out.fail("majority vote failed (" + std::to_string(votes) + "/3): " + per_seed);
    } else {
        out.detail = std::to_string(votes) + "/3 seeds with margins >= 0.02: " + per_seed;
    }
    return out;
}

// ---- criterion 7: ITQ monotonicity ----

Outcome criterion_7() {
    Outcome out;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(700 + seed);
        FeatureMatrix features;
        features.data = random_gaussian_matrix(500, 64, rng);
        FitItqOptions opts;
        opts.iters = 50;
        FitItqResult fit = fit_itq(features, 64, opts, seed);
        for (size_t i = 1; i < fit.quantization_errors.size(); ++i) {
            if (fit.quantization_errors[i] > fit.quantization_errors[i - 1] + 1e-12) {
                out.fail("seed " + std::to_string(seed) + ": error rose at round " +
                         std::to_string(i));
                break;
            }
        }
        for (size_t i = 0; i < fit.rotation_defects.size(); ++i) {
            if (fit.rotation_defects[i] >= 1e-8) {
                out.fail("seed " + std::to_string(seed) + ": rotation defect " +
                         std::to_string(fit.rotation_defects[i]) + " at round " +
                         std::to_string(i));
                break;
            }
        }
    }
    if (out.pass) {
        out.detail = "5 seeds x 50 rounds nonincreasing, orthogonality < 1e-8 throughout";
    }
    return out;
}

// ---- criterion 8: CLI determinism ----

#ifndef SDC_CLI_PATH
#define SDC_CLI_PATH "sdchash"
#endif

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_8() {
    Outcome out;
    namespace fs = std::filesystem;
    fs::path root = fs::temp_directory_path() / "sdchash_acceptance_c8";
    fs::remove_all(root);
    fs::create_directories(root / "run1");
    fs::create_directories(root / "run2");

    std::string cli = SDC_CLI_PATH;
    auto shell = [&](const std::string& cmd) {
        int rc = std::system(cmd.c_str());
        if (rc != 0) out.fail("command failed (" + std::to_string(rc) + "): " + cmd);
        return rc == 0;
    };

    std::string gen = cli + " gen-data --clusters 4 --per 100 --dim 32 --seed 5 --out " +
                      (root / "features.sdcf").string() + " > /dev/null 2>/dev/null";
    if (!shell(gen)) return out;

    for (int run = 1; run <= 2; ++run) {
        fs::path dir = root / ("run" + std::to_string(run));
        std::string prefix = "cd " + dir.string() + " && " + cli;
        bool ok =
            shell(prefix +
                  " train --features ../features.sdcf --bits 16 --epochs 5 --batch 32"
                  " --seed 9 --out model.sdcm > train.json 2>/dev/null") &&
            shell(prefix +
                  " encode --model model.sdcm --features ../features.sdcf --out codes.sdcb"
                  " > encode.json 2>/dev/null") &&
            shell(prefix +
                  " eval --query-codes codes.sdcb --gallery-codes codes.sdcb"
                  " --query-features ../features.sdcf --gallery-features ../features.sdcf"
                  " --k 50 --exclude-self > eval.json 2>/dev/null");
        if (!ok) return out;
    }

    for (const char* name : {"model.sdcm", "model.sdcm.json", "codes.sdcb", "train.json",
                             "encode.json", "eval.json"}) {
        std::string a = file_bytes(root / "run1" / name);
        std::string b = file_bytes(root / "run2" / name);
        if (a.empty()) {
            out.fail(std::string(name) + " missing or empty");
        } else if (a != b) {
            out.fail(std::string(name) + " differs between runs");
        }
    }
    fs::remove_all(root);
    if (out.pass) {
        out.detail = "train+encode+eval reran byte-identical (codes, model, JSON summaries)";
    }
    return out;
}

// ---- criterion 9: mAP against a naive reference ----

Outcome criterion_9() {
    Outcome out;
    Rng rng(909);
    double worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        size_t n_gallery = 50 + rng.next_below(451);
        size_t n_queries = 5 + rng.next_below(20);
        uint32_t k_bits = rng.next_u64() & 1 ? 16 : 32;
        size_t k = 1 + rng.next_below(50);
        bool exclude_self = n_queries <= n_gallery && (rng.next_u64() & 1);

        Matrix gallery_m = random_sign_matrix(n_gallery, k_bits, rng);
        Matrix query_m = random_sign_matrix(n_queries, k_bits, rng);
        PackedCodes gallery = pack(gallery_m);
        PackedCodes queries = pack(query_m);
        std::vector<uint64_t> glabels(n_gallery), qlabels(n_queries);
        for (auto& l : glabels) l = rng.next_below(7);
        for (auto& l : qlabels) l = rng.next_below(7);

        EvalOptions opts;
        opts.exclude_self = exclude_self;
        EvalSummary summary = evaluate(queries, gallery, qlabels, glabels, k, opts);

        double ap_sum = 0.0;
        for (size_t q = 0; q < n_queries; ++q) {
            std::vector<std::pair<uint32_t, uint32_t>> ranked;
            size_t total_relevant = 0;
            for (size_t g = 0; g < n_gallery; ++g) {
                if (exclude_self && g == q) continue;
                uint32_t d = 0;
                for (size_t c = 0; c < k_bits; ++c) {
                    d += query_m(q, c) != gallery_m(g, c) ? 1 : 0;
                }
                ranked.emplace_back(d, uint32_t(g));
                total_relevant += qlabels[q] == glabels[g] ? 1 : 0;
            }
            std::stable_sort(ranked.begin(), ranked.end());
            std::vector<bool> flags(ranked.size());
            for (size_t i = 0; i < ranked.size(); ++i) {
                flags[i] = qlabels[q] == glabels[ranked[i].second];
            }
            double ap = oracle::naive_average_precision(flags, total_relevant, k);
            ap_sum += ap;
            worst = std::max(worst, std::fabs(ap - summary.per_query_ap[q]));
        }
        worst = std::max(worst, std::fabs(ap_sum / double(n_queries) - summary.map_at_k));
    }
    if (worst >= 1e-12) {
        out.fail("max deviation from the naive reference: " + std::to_string(worst));
    } else {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "50 instances, max |evaluate - reference| = %.1e", worst);
        out.detail = buf;
    }
    return out;
}

using CriterionFn = Outcome (*)();

struct Criterion {
    int id;
    const char* name;
    CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "Hamming/cosine identity", criterion_1},
    {2, "beta iCDF vs quadrature oracle", criterion_2},
    {3, "gradient fidelity", criterion_3},
    {4, "Wasserstein approximation consistency", criterion_4},
    {5, "binomial bucket law", criterion_5},
    {6, "collapse-mitigation ordering", criterion_6},
    {7, "ITQ monotonicity", criterion_7},
    {8, "pipeline determinism", criterion_8},
    {9, "mAP oracle", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
            ++i;
        }
    }

    bool all_pass = true;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome result = c.fn();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", result.pass ? "PASS" : "FAIL", c.id,
                    c.name, result.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : 1;
}
