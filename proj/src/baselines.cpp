#include "sdc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "sdc/errors.hpp"
#include "sdc/rng.hpp"

namespace sdc {

SymmetricEigen symmetric_eigen(const Matrix& a) {
    if (a.rows != a.cols) {
        throw ShapeError("symmetric_eigen: matrix is not square");
    }
    size_t n = a.rows;
    Matrix m = a;
    Matrix v(n, n);
    for (size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        }
        if (off < 1e-24 * double(n) * double(n)) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double apq = m(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double mpi = m(p, i), mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
                for (size_t i = 0; i < n; ++i) {
                    double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return m(x, x) > m(y, y); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (size_t j = 0; j < n; ++j) {
        out.values[j] = m(order[j], order[j]);
        for (size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

namespace {

// One-sided Jacobi SVD of a square matrix: m = u * diag(sigma) * w^T.
struct SmallSvd {
    Matrix u;
    Matrix w;
    std::vector<double> sigma;
};

SmallSvd jacobi_svd(const Matrix& m_in) {
    size_t n = m_in.rows;
    Matrix m = m_in;  // columns become u * sigma
    Matrix w(n, n);
    for (size_t i = 0; i < n; ++i) w(i, i) = 1.0;

    const int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool converged = true;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    app += m(i, p) * m(i, p);
                    aqq += m(i, q) * m(i, q);
                    apq += m(i, p) * m(i, q);
                }
                if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                converged = false;
                double zeta = (aqq - app) / (2.0 * apq);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(zeta) + std::sqrt(zeta * zeta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double wip = w(i, p), wiq = w(i, q);
                    w(i, p) = c * wip - s * wiq;
                    w(i, q) = s * wip + c * wiq;
                }
            }
        }
        if (converged) break;
    }

    SmallSvd out;
    out.u = Matrix(n, n);
    out.w = std::move(w);
    out.sigma.resize(n);
    for (size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (size_t i = 0; i < n; ++i) norm += m(i, j) * m(i, j);
        norm = std::sqrt(norm);
        out.sigma[j] = norm;
        if (norm > 1e-300) {
            for (size_t i = 0; i < n; ++i) out.u(i, j) = m(i, j) / norm;
        }
    }
    // Complete any null columns of u to a full orthonormal basis.
    for (size_t j = 0; j < n; ++j) {
        if (out.sigma[j] > 1e-300) continue;
        for (size_t basis = 0; basis < n; ++basis) {
            for (size_t i = 0; i < n; ++i) out.u(i, j) = i == basis ? 1.0 : 0.0;
            for (size_t other = 0; other < n; ++other) {
                if (other == j) continue;
                double dot = 0.0;
                for (size_t i = 0; i < n; ++i) dot += out.u(i, j) * out.u(i, other);
                for (size_t i = 0; i < n; ++i) out.u(i, j) -= dot * out.u(i, other);
            }
            double norm = 0.0;
            for (size_t i = 0; i < n; ++i) norm += out.u(i, j) * out.u(i, j);
            norm = std::sqrt(norm);
            if (norm > 1e-8) {
                for (size_t i = 0; i < n; ++i) out.u(i, j) /= norm;
                break;
            }
        }
    }
    return out;
}

// Orthogonal maximizer of tr(R^T m): R = u w^T for m = u sigma w^T.
Matrix procrustes_rotation(const Matrix& m) {
    SmallSvd svd = jacobi_svd(m);
    size_t n = m.rows;
    Matrix r(n, n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t k = 0; k < n; ++k) s += svd.u(i, k) * svd.w(j, k);
            r(i, j) = s;
        }
    }
    return r;
}

Matrix random_orthogonal(size_t n, Rng& rng) {
    Matrix g(n, n);
    for (double& v : g.data) v = rng.next_gaussian();
    // Modified Gram-Schmidt on columns.
    for (size_t j = 0; j < n; ++j) {
        for (size_t prev = 0; prev < j; ++prev) {
            double dot = 0.0;
            for (size_t i = 0; i < n; ++i) dot += g(i, j) * g(i, prev);
            for (size_t i = 0; i < n; ++i) g(i, j) -= dot * g(i, prev);
        }
        double norm = 0.0;
        for (size_t i = 0; i < n; ++i) norm += g(i, j) * g(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            // A dependent Gaussian draw is vanishingly unlikely; restart column.
            for (size_t i = 0; i < n; ++i) g(i, j) = rng.next_gaussian();
            --j;
            continue;
        }
        for (size_t i = 0; i < n; ++i) g(i, j) /= norm;
    }
    return g;
}

double rotation_defect(const Matrix& r) {
    size_t n = r.rows;
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (size_t k = 0; k < n; ++k) dot += r(k, i) * r(k, j);
            worst = std::max(worst, std::fabs(dot - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double quantization_gap(const Matrix& v, const Matrix& r) {
    // ||sign(VR) - VR||^2 / (nK)
    Matrix vr = matmul(v, r);
    double sum = 0.0;
    for (double x : vr.data) {
        double b = x >= 0.0 ? 1.0 : -1.0;
        sum += (b - x) * (b - x);
    }
    return sum / double(vr.size());
}

}  // namespace

FitItqResult fit_itq(const FeatureMatrix& features, uint32_t k, const FitItqOptions& opts,
                     uint64_t seed) {
    size_t n = features.n();
    size_t d = features.dim();
    if (k == 0) throw DomainError("fit_itq: k must be >= 1");
    if (n <= k) {
        throw DegenerateInputError("fit_itq: need more samples than bits (" +
                                   std::to_string(n) + " <= " + std::to_string(k) + ")");
    }
    if (d < k) {
        throw DegenerateInputError("fit_itq: feature dim below code length");
    }

    ItqModel model;
    model.k_bits = k;
    model.mean.assign(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double* row = features.data.data.data() + i * d;
        for (size_t j = 0; j < d; ++j) model.mean[j] += row[j];
    }
    for (double& m : model.mean) m /= double(n);

    Matrix centered(n, d);
    for (size_t i = 0; i < n; ++i) {
        const double* src = features.data.data.data() + i * d;
        double* dst = centered.data.data() + i * d;
        for (size_t j = 0; j < d; ++j) dst[j] = src[j] - model.mean[j];
    }

    Matrix cov = matmul_at_b(centered, centered);
    for (double& c : cov.data) c /= double(n - 1);
    SymmetricEigen eig = symmetric_eigen(cov);

    double top = std::max(eig.values[0], 0.0);
    if (eig.values[k - 1] <= 1e-10 * std::max(top, 1e-30) && !opts.allow_rank_deficient) {
        throw DegenerateInputError(
            "fit_itq: covariance rank below requested bits; pass allow_rank_deficient to "
            "proceed with noise directions");
    }

    model.pca = Matrix(d, k);
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < k; ++j) model.pca(i, j) = eig.vectors(i, j);
    }

    Matrix v = matmul(centered, model.pca);
    Rng rng = derive_rng(seed, RngStream::model_init);
    model.rotation = random_orthogonal(k, rng);

    FitItqResult out;
    out.quantization_errors.push_back(quantization_gap(v, model.rotation));
    out.rotation_defects.push_back(rotation_defect(model.rotation));
    for (size_t it = 0; it < opts.iters; ++it) {
        Matrix b = sign_codes(matmul(v, model.rotation));
        model.rotation = procrustes_rotation(matmul_at_b(v, b));
        out.quantization_errors.push_back(quantization_gap(v, model.rotation));
        out.rotation_defects.push_back(rotation_defect(model.rotation));
    }
    out.model = std::move(model);
    return out;
}

PackedCodes encode_itq(const ItqModel& model, const FeatureMatrix& features) {
    size_t d = model.mean.size();
    if (features.dim() != d) {
        throw ShapeError("encode_itq: feature dim does not match model");
    }
    Matrix centered(features.n(), d);
    for (size_t i = 0; i < features.n(); ++i) {
        const double* src = features.data.data.data() + i * d;
        double* dst = centered.data.data() + i * d;
        for (size_t j = 0; j < d; ++j) dst[j] = src[j] - model.mean[j];
    }
    return pack(sign_codes(matmul(matmul(centered, model.pca), model.rotation)));
}

void save_itq(const std::string& path, const ItqModel& model) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path + " for writing");
    }
    uint32_t version = 1;
    uint32_t d = uint32_t(model.mean.size());
    uint32_t k = model.k_bits;
    out.write("SDCI", 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(&k), 4);
    out.write(reinterpret_cast<const char*>(model.mean.data()), std::streamsize(d * 8));
    out.write(reinterpret_cast<const char*>(model.pca.data.data()),
              std::streamsize(model.pca.size() * 8));
    out.write(reinterpret_cast<const char*>(model.rotation.data.data()),
              std::streamsize(model.rotation.size() * 8));
    if (!out) {
        throw FormatError("write failed for " + path);
    }
}

ItqModel load_itq(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    size_t size = size_t(in.tellg());
    in.seekg(0);
    char magic[4];
    uint32_t version = 0, d = 0, k = 0;
    if (size < 16 || !in.read(magic, 4) || std::memcmp(magic, "SDCI", 4) != 0) {
        throw FormatError(path + ": not an ITQ checkpoint (bad magic)");
    }
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&k), 4);
    if (version != 1) {
        throw FormatError(path + ": unsupported ITQ checkpoint version");
    }
    size_t expect = 16 + (size_t(d) + size_t(d) * k + size_t(k) * k) * 8;
    if (size != expect) {
        throw FormatError(path + ": expected " + std::to_string(expect) + " bytes, file has " +
                          std::to_string(size));
    }
    ItqModel model;
    model.mean.resize(d);
    model.pca = Matrix(d, k);
    model.rotation = Matrix(k, k);
    model.k_bits = k;
    in.read(reinterpret_cast<char*>(model.mean.data()), std::streamsize(d * 8));
    in.read(reinterpret_cast<char*>(model.pca.data.data()),
            std::streamsize(model.pca.size() * 8));
    in.read(reinterpret_cast<char*>(model.rotation.data.data()),
            std::streamsize(model.rotation.size() * 8));
    if (!in) {
        throw FormatError(path + ": truncated payload");
    }
    return model;
}

HashModel fit_lsh(size_t d, uint32_t k, uint64_t seed) {
    if (d == 0 || k == 0) {
        throw DomainError("fit_lsh: dimensions must be >= 1");
    }
    HashModel model;
    model.weights = Matrix(d, k);
    model.bias = Matrix(1, k);
    model.k_bits = k;
    Rng rng = derive_rng(seed, RngStream::model_init);
    for (double& w : model.weights.data) w = rng.next_gaussian();
    return model;
}

}  // namespace sdc
