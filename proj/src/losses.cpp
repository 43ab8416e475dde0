#include "sdc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdc/errors.hpp"

namespace sdc {

namespace {

// d s / d f_i and d s / d f_j for s = cos(f_i, f_j), evaluated with the
// normalized rows u and the row norms.
inline void accumulate_cosine_grad(Matrix& grad, const Matrix& u,
                                   const std::vector<double>& norms, uint32_t i, uint32_t j,
                                   double s, double g) {
    size_t k = u.cols;
    const double* ui = u.data.data() + size_t(i) * k;
    const double* uj = u.data.data() + size_t(j) * k;
    double* gi = grad.data.data() + size_t(i) * k;
    double* gj = grad.data.data() + size_t(j) * k;
    double inv_ni = g / norms[i];
    double inv_nj = g / norms[j];
    for (size_t c = 0; c < k; ++c) {
        gi[c] += inv_ni * (uj[c] - s * ui[c]);
        gj[c] += inv_nj * (ui[c] - s * uj[c]);
    }
}

std::vector<double> row_norms(const Matrix& a, const char* who) {
    std::vector<double> out(a.rows);
    for (size_t i = 0; i < a.rows; ++i) {
        out[i] = row_norm(a, i);
        if (out[i] == 0.0) {
            throw DegenerateInputError(std::string(who) + ": row " + std::to_string(i) +
                                       " is the zero vector");
        }
    }
    return out;
}

}  // namespace

SimilarityBatch build_pair_batch(const Matrix& x_batch, const Matrix& f_batch) {
    if (x_batch.rows != f_batch.rows) {
        throw ShapeError("build_pair_batch: feature and code batches differ in rows");
    }
    size_t b = x_batch.rows;
    if (b < 2) {
        throw DegenerateInputError("build_pair_batch: need at least 2 rows to form a pair");
    }
    Matrix xn = row_l2_normalize(x_batch);
    Matrix fn = row_l2_normalize(f_batch);

    SimilarityBatch batch;
    batch.codes = f_batch;
    size_t n_pairs = b * (b - 1) / 2;
    batch.t.reserve(n_pairs);
    batch.s.reserve(n_pairs);
    batch.pair_index.reserve(n_pairs);
    for (size_t i = 0; i < b; ++i) {
        for (size_t j = i + 1; j < b; ++j) {
            double t = 0.0, s = 0.0;
            const double* xi = xn.data.data() + i * xn.cols;
            const double* xj = xn.data.data() + j * xn.cols;
            for (size_t c = 0; c < xn.cols; ++c) t += xi[c] * xj[c];
            const double* fi = fn.data.data() + i * fn.cols;
            const double* fj = fn.data.data() + j * fn.cols;
            for (size_t c = 0; c < fn.cols; ++c) s += fi[c] * fj[c];
            batch.t.push_back(std::clamp(t, -1.0, 1.0));
            batch.s.push_back(std::clamp(s, -1.0, 1.0));
            batch.pair_index.emplace_back(uint32_t(i), uint32_t(j));
        }
    }
    return batch;
}

LossValueAndGrad sdc_loss_with_targets(const SimilarityBatch& batch,
                                       std::span<const double> targets) {
    size_t n = batch.size();
    if (n == 0) {
        throw DegenerateInputError("sdc_loss: empty batch");
    }
    if (targets.size() != n) {
        throw ShapeError("sdc_loss: target count does not match pair count");
    }

    // Stable sort by t keeps ties in original pair order.
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return batch.t[a] < batch.t[b]; });

    Matrix u = row_l2_normalize(batch.codes);
    std::vector<double> norms = row_norms(batch.codes, "sdc_loss");

    LossValueAndGrad out;
    out.grad_f = Matrix(batch.codes.rows, batch.codes.cols);
    double inv_n = 1.0 / double(n);
    for (size_t r = 0; r < n; ++r) {
        uint32_t p = order[r];
        double diff = batch.s[p] - targets[r];
        out.value += std::fabs(diff) * inv_n;
        if (diff == 0.0) continue;
        double g = (diff > 0.0 ? 1.0 : -1.0) * inv_n;
        auto [i, j] = batch.pair_index[p];
        accumulate_cosine_grad(out.grad_f, u, norms, i, j, batch.s[p], g);
    }
    return out;
}

LossValueAndGrad sdc_loss(const SimilarityBatch& batch, const BetaDistribution& calib) {
    const std::vector<double>& targets = cached_calibration_targets(calib, batch.size());
    return sdc_loss_with_targets(batch, targets);
}

LossValueAndGrad quantization_loss(const Matrix& f_batch) {
    size_t n = f_batch.rows;
    size_t k = f_batch.cols;
    if (n == 0) {
        throw DegenerateInputError("quantization_loss: empty batch");
    }
    LossValueAndGrad out;
    out.grad_f = Matrix(n, k);
    double sqrt_k = std::sqrt(double(k));
    double inv_n = 1.0 / double(n);
    for (size_t i = 0; i < n; ++i) {
        const double* f = f_batch.data.data() + i * k;
        double norm = row_norm(f_batch, i);
        if (norm == 0.0) {
            throw DegenerateInputError("quantization_loss: row " + std::to_string(i) +
                                       " is the zero vector");
        }
        // dot(f, sign(f)) = sum |f|
        double dot = 0.0;
        for (size_t c = 0; c < k; ++c) dot += std::fabs(f[c]);
        double cos = dot / (norm * sqrt_k);
        out.value += (1.0 - cos) * inv_n;
        double* g = out.grad_f.data.data() + i * k;
        for (size_t c = 0; c < k; ++c) {
            double b = f[c] >= 0.0 ? 1.0 : -1.0;
            g[c] = inv_n * (cos * f[c] / (norm * norm) - b / (norm * sqrt_k));
        }
    }
    return out;
}

LossValueAndGrad preservation_loss(const SimilarityBatch& batch, int p) {
    if (p != 1 && p != 2) {
        throw DomainError("preservation_loss: exponent must be 1 or 2");
    }
    size_t n = batch.size();
    if (n == 0) {
        throw DegenerateInputError("preservation_loss: empty batch");
    }
    Matrix u = row_l2_normalize(batch.codes);
    std::vector<double> norms = row_norms(batch.codes, "preservation_loss");

    LossValueAndGrad out;
    out.grad_f = Matrix(batch.codes.rows, batch.codes.cols);
    double inv_n = 1.0 / double(n);
    for (size_t idx = 0; idx < n; ++idx) {
        double e = batch.s[idx] - batch.t[idx];
        double g;
        if (p == 2) {
            out.value += e * e * inv_n;
            g = 2.0 * e * inv_n;
        } else {
            out.value += std::fabs(e) * inv_n;
            g = e == 0.0 ? 0.0 : (e > 0.0 ? 1.0 : -1.0) * inv_n;
        }
        if (g == 0.0) continue;
        auto [i, j] = batch.pair_index[idx];
        accumulate_cosine_grad(out.grad_f, u, norms, i, j, batch.s[idx], g);
    }
    return out;
}

ContrastiveLoss contrastive_loss(const Matrix& f_view1, const Matrix& f_view2,
                                 double temperature) {
    if (!f_view1.same_shape(f_view2)) {
        throw ShapeError("contrastive_loss: view shapes differ");
    }
    if (temperature <= 0.0) {
        throw DomainError("contrastive_loss: temperature must be positive");
    }
    size_t b = f_view1.rows;
    if (b < 2) {
        throw DegenerateInputError("contrastive_loss: need batch >= 2 for negatives");
    }
    size_t k = f_view1.cols;
    size_t m = 2 * b;

    Matrix f(m, k);
    std::copy(f_view1.data.begin(), f_view1.data.end(), f.data.begin());
    std::copy(f_view2.data.begin(), f_view2.data.end(), f.data.begin() + b * k);
    Matrix z = row_l2_normalize(f);
    std::vector<double> norms = row_norms(f, "contrastive_loss");

    // Similarity logits S_ab = z_a . z_b / tau.
    Matrix sim(m, m);
    for (size_t a = 0; a < m; ++a) {
        const double* za = z.data.data() + a * k;
        for (size_t c = a + 1; c < m; ++c) {
            const double* zc = z.data.data() + c * k;
            double dot = 0.0;
            for (size_t q = 0; q < k; ++q) dot += za[q] * zc[q];
            sim(a, c) = dot / temperature;
            sim(c, a) = sim(a, c);
        }
    }

    auto positive_of = [&](size_t a) { return (a + b) % m; };

    double value = 0.0;
    Matrix grad_s(m, m);  // dL/dS, zero on the diagonal
    double inv_m = 1.0 / double(m);
    for (size_t a = 0; a < m; ++a) {
        double mx = -1e300;
        for (size_t c = 0; c < m; ++c) {
            if (c != a) mx = std::max(mx, sim(a, c));
        }
        double denom = 0.0;
        for (size_t c = 0; c < m; ++c) {
            if (c != a) denom += std::exp(sim(a, c) - mx);
        }
        size_t pos = positive_of(a);
        value += (-sim(a, pos) + mx + std::log(denom)) * inv_m;
        for (size_t c = 0; c < m; ++c) {
            if (c == a) continue;
            double prob = std::exp(sim(a, c) - mx) / denom;
            grad_s(a, c) = inv_m * (prob - (c == pos ? 1.0 : 0.0));
        }
    }

    // dL/dz_a collects both roles of each pair term (a as anchor, a as other).
    Matrix grad_z(m, k);
    for (size_t a = 0; a < m; ++a) {
        double* ga = grad_z.data.data() + a * k;
        for (size_t c = 0; c < m; ++c) {
            if (c == a) continue;
            double w = (grad_s(a, c) + grad_s(c, a)) / temperature;
            if (w == 0.0) continue;
            const double* zc = z.data.data() + c * k;
            for (size_t q = 0; q < k; ++q) ga[q] += w * zc[q];
        }
    }

    ContrastiveLoss out;
    out.value = value;
    out.grad_view1 = Matrix(b, k);
    out.grad_view2 = Matrix(b, k);
    for (size_t a = 0; a < m; ++a) {
        const double* ga = grad_z.data.data() + a * k;
        const double* za = z.data.data() + a * k;
        double dot = 0.0;
        for (size_t q = 0; q < k; ++q) dot += ga[q] * za[q];
        Matrix& dst = a < b ? out.grad_view1 : out.grad_view2;
        double* df = dst.data.data() + (a < b ? a : a - b) * k;
        for (size_t q = 0; q < k; ++q) {
            df[q] = (ga[q] - dot * za[q]) / norms[a];
        }
    }
    return out;
}

TotalLossResult total_loss(const Matrix& f_batch, const Matrix& x_batch,
                           const BetaDistribution& calib, const TotalLossOptions& opts,
                           const ViewPair* views) {
    if (opts.lambda_q < 0.0 || opts.lambda_cl < 0.0) {
        throw DomainError("total_loss: component weights must be nonnegative");
    }
    SimilarityBatch batch = build_pair_batch(x_batch, f_batch);

    LossValueAndGrad align = opts.objective == Objective::sdc
                                 ? sdc_loss(batch, calib)
                                 : preservation_loss(batch, opts.preservation_p);

    TotalLossResult out;
    out.alignment = align.value;
    out.grad_f = std::move(align.grad_f);
    out.value = align.value;

    if (opts.lambda_q > 0.0) {
        LossValueAndGrad q = quantization_loss(f_batch);
        out.quantization = q.value;
        out.value += opts.lambda_q * q.value;
        for (size_t i = 0; i < out.grad_f.size(); ++i) {
            out.grad_f.data[i] += opts.lambda_q * q.grad_f.data[i];
        }
    }

    if (opts.lambda_cl > 0.0 && views != nullptr) {
        ContrastiveLoss cl = contrastive_loss(views->f_view1, views->f_view2, opts.temperature);
        out.contrastive = cl.value;
        out.value += opts.lambda_cl * cl.value;
        out.grad_view1 = std::move(cl.grad_view1);
        out.grad_view2 = std::move(cl.grad_view2);
        for (double& g : out.grad_view1.data) g *= opts.lambda_cl;
        for (double& g : out.grad_view2.data) g *= opts.lambda_cl;
    }
    return out;
}

}  // namespace sdc
