#include "sdc/calibration.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "sdc/errors.hpp"

namespace sdc {

double log_gamma(double x) {
    static const double kCoef[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    if (x <= 0.0 && x == std::floor(x)) {
        throw DomainError("log_gamma: nonpositive integer argument");
    }
    if (x < 0.5) {
        // Reflection keeps the Lanczos series in its accurate range.
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    double xx = x - 1.0;
    double a = kCoef[0];
    for (int i = 1; i < 9; ++i) a += kCoef[i] / (xx + double(i));
    double t = xx + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (xx + 0.5) * std::log(t) - t + std::log(a);
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    const double kTiny = 1e-300;
    const double kEps = 1e-16;
    const int kMaxIter = 500;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) {
        throw DomainError("regularized_incomplete_beta: shape parameters must be positive");
    }
    if (x < 0.0 || x > 1.0) {
        throw DomainError("regularized_incomplete_beta: x outside [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

BetaDistribution::BetaDistribution(double a, double b) : alpha(a), beta(b) {
    if (a <= 0.0 || b <= 0.0) {
        throw DomainError("BetaDistribution: shape parameters must be positive");
    }
}

double BetaDistribution::pdf(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0 || x == 1.0) {
        // Interior evaluation only; endpoint densities can be infinite for
        // shapes < 1 and are never needed by the solver.
        return 0.0;
    }
    double ln_b = log_gamma(alpha) + log_gamma(beta) - log_gamma(alpha + beta);
    return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - ln_b);
}

double BetaDistribution::cdf(double x) const {
    return regularized_incomplete_beta(alpha, beta, x);
}

double beta_icdf(const BetaDistribution& dist, double z) {
    if (z < 0.0 || z > 1.0) {
        throw DomainError("beta_icdf: quantile outside [0, 1]");
    }
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;

    // Bisection brackets to width 1e-3.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-3) {
        double mid = 0.5 * (lo + hi);
        if (dist.cdf(mid) < z) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton refinement inside the bracket. Newton alone can overshoot for
    // extreme quantiles at large shapes, so out-of-bracket steps fall back
    // to bisection.
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fx = dist.cdf(x) - z;
        if (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        if (std::fabs(fx) < 1e-13 && hi - lo < 1e-12) break;
        double px = dist.pdf(x);
        double next;
        if (px > 0.0) {
            next = x - fx / px;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        if (std::fabs(next - x) < 5e-16) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double icdf_to_similarity(double u) {
    if (u < 0.0 || u > 1.0) {
        throw DomainError("icdf_to_similarity: argument outside [0, 1]");
    }
    return 2.0 * u - 1.0;
}

std::vector<double> calibration_targets(const BetaDistribution& dist, size_t n) {
    if (n == 0) {
        throw DomainError("calibration_targets: empty batch");
    }
    std::vector<double> out(n);
    for (size_t i = 1; i <= n; ++i) {
        double z = (2.0 * double(i) - 1.0) / (2.0 * double(n));
        out[i - 1] = icdf_to_similarity(beta_icdf(dist, z));
    }
    return out;
}

const std::vector<double>& cached_calibration_targets(const BetaDistribution& dist, size_t n) {
    using Key = std::tuple<double, double, size_t>;
    static std::map<Key, std::vector<double>> cache;
    static std::shared_mutex mutex;

    Key key{dist.alpha, dist.beta, n};
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<double> targets = calibration_targets(dist, n);
    std::unique_lock lock(mutex);
    return cache.emplace(key, std::move(targets)).first->second;
}

BinomialBucketDistribution::BinomialBucketDistribution(uint32_t k) : k_bits(k) {
    if (k == 0) {
        throw DomainError("BinomialBucketDistribution: code length must be >= 1");
    }
}

double BinomialBucketDistribution::pmf(uint32_t d) const {
    if (d > k_bits) {
        throw DomainError("binomial_bucket_pmf: d = " + std::to_string(d) +
                          " exceeds K = " + std::to_string(k_bits));
    }
    double k = double(k_bits);
    double ln_choose = log_gamma(k + 1.0) - log_gamma(double(d) + 1.0) -
                       log_gamma(k - double(d) + 1.0);
    return std::exp(ln_choose - k * std::log(2.0));
}

uint32_t BinomialBucketDistribution::icdf(double z) const {
    if (z < 0.0 || z > 1.0) {
        throw DomainError("binomial_bucket_icdf: quantile outside [0, 1]");
    }
    double acc = 0.0;
    for (uint32_t d = 0; d < k_bits; ++d) {
        acc += pmf(d);
        if (acc >= z) return d;
    }
    return k_bits;
}

}  // namespace sdc
