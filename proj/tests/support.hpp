#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sdc/matrix.hpp"

namespace oracle {

// ---- adaptive Simpson quadrature ----

inline double simpson_segment(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double eps,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_segment(a, m, fa, flm, fm);
    double right = simpson_segment(m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-13, int depth = 48) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson_segment(a, b, fa, fm, fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, depth);
}

// ---- quadrature-based beta CDF and its bisection inverse ----
// Built purely from the unnormalized density integral; shares nothing with
// the continued-fraction implementation.

struct QuadratureBetaCdf {
    double a, b, normalizer;

    QuadratureBetaCdf(double a_, double b_) : a(a_), b(b_) {
        // tolerances scale with the density peak so large shapes (with tiny
        // unnormalized mass) keep ~12 accurate digits in probability space
        double mode = (a > 1.0 && b > 1.0) ? (a - 1.0) / (a + b - 2.0) : 0.5;
        double scale = std::max(density(mode), 1e-300);
        normalizer =
            adaptive_simpson([this](double x) { return density(x); }, 0.0, 1.0, scale * 1e-14);
    }

    double density(double x) const {
        if (x <= 0.0 || x >= 1.0) {
            // a, b >= 1 in every oracle use; endpoint value is then finite.
            return (a == 1.0 && x <= 0.0) || (b == 1.0 && x >= 1.0)
                       ? std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0)
                       : 0.0;
        }
        return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0);
    }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return adaptive_simpson([this](double t) { return density(t); }, 0.0, x,
                                normalizer * 1e-12) /
               normalizer;
    }

    double icdf(double z) const {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (cdf(mid) < z) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
};

// ---- regularized lower incomplete gamma, for chi-square p-values ----

inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// p-value of a chi-square statistic with the given degrees of freedom.
inline double chi_square_pvalue(double stat, double dof) {
    return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

// ---- naive references ----

inline sdc::Matrix naive_matmul(const sdc::Matrix& a, const sdc::Matrix& b) {
    sdc::Matrix out(a.rows, b.cols);
    for (size_t i = 0; i < a.rows; ++i) {
        for (size_t j = 0; j < b.cols; ++j) {
            double s = 0.0;
            for (size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    }
    return out;
}

// Textbook AP over an explicitly ranked relevance list.
inline double naive_average_precision(const std::vector<bool>& rel, size_t total_relevant,
                                      size_t k) {
    if (total_relevant == 0) return 0.0;
    double sum = 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < rel.size() && i < k; ++i) {
        if (rel[i]) {
            ++hits;
            sum += double(hits) / double(i + 1);
        }
    }
    size_t denom = std::min(total_relevant, k);
    return sum / double(denom);
}

// Central finite differences d f / d x for a scalar function of a matrix.
inline sdc::Matrix finite_difference_grad(const std::function<double(const sdc::Matrix&)>& f,
                                          const sdc::Matrix& x, double h = 1e-5) {
    sdc::Matrix grad(x.rows, x.cols);
    sdc::Matrix probe = x;
    for (size_t i = 0; i < x.size(); ++i) {
        double orig = probe.data[i];
        probe.data[i] = orig + h;
        double fp = f(probe);
        probe.data[i] = orig - h;
        double fm = f(probe);
        probe.data[i] = orig;
        grad.data[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// Max elementwise relative gap between an analytic and a numeric gradient.
inline double gradient_gap(const sdc::Matrix& analytic, const sdc::Matrix& numeric) {
    double scale = 0.0;
    for (double v : numeric.data) scale = std::max(scale, std::fabs(v));
    scale = std::max(scale, 1e-8);
    double worst = 0.0;
    for (size_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, std::fabs(analytic.data[i] - numeric.data[i]) / scale);
    }
    return worst;
}

// Exact binomial coefficients via Pascal's triangle; fits uint64 for K <= 64.
inline std::vector<uint64_t> binomial_row(uint32_t k) {
    std::vector<uint64_t> row{1};
    for (uint32_t i = 1; i <= k; ++i) {
        std::vector<uint64_t> next(i + 1, 1);
        for (uint32_t j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    return row;
}

}  // namespace oracle
