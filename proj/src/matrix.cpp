#include "sdc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdc/errors.hpp"

namespace sdc {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols) +
                         " vs " + std::to_string(b.rows) + ")");
    }
    Matrix out(a.rows, b.cols);
    for (size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        double* orow = out.data.data() + i * out.cols;
        for (size_t k = 0; k < a.cols; ++k) {
            double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + k * b.cols;
            for (size_t j = 0; j < b.cols; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) {
        throw ShapeError("matmul_at_b: row counts differ (" + std::to_string(a.rows) +
                         " vs " + std::to_string(b.rows) + ")");
    }
    Matrix out(a.cols, b.cols);
    for (size_t r = 0; r < a.rows; ++r) {
        const double* arow = a.data.data() + r * a.cols;
        const double* brow = b.data.data() + r * b.cols;
        for (size_t i = 0; i < a.cols; ++i) {
            double ari = arow[i];
            if (ari == 0.0) continue;
            double* orow = out.data.data() + i * out.cols;
            for (size_t j = 0; j < b.cols; ++j) {
                orow[j] += ari * brow[j];
            }
        }
    }
    return out;
}

double row_norm(const Matrix& a, size_t r) {
    double s = 0.0;
    const double* p = a.data.data() + r * a.cols;
    for (size_t j = 0; j < a.cols; ++j) s += p[j] * p[j];
    return std::sqrt(s);
}

Matrix row_l2_normalize(const Matrix& a) {
    Matrix out = a;
    for (size_t i = 0; i < a.rows; ++i) {
        double n = row_norm(a, i);
        if (n == 0.0) {
            throw DegenerateInputError("row_l2_normalize: row " + std::to_string(i) +
                                       " is the zero vector");
        }
        double inv = 1.0 / n;
        double* p = out.data.data() + i * out.cols;
        for (size_t j = 0; j < out.cols; ++j) p[j] *= inv;
    }
    return out;
}

Matrix cosine_matrix(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) {
        throw ShapeError("cosine_matrix: column counts differ");
    }
    Matrix an = row_l2_normalize(a);
    Matrix bn = row_l2_normalize(b);
    Matrix out(a.rows, b.rows);
    for (size_t i = 0; i < a.rows; ++i) {
        const double* ai = an.data.data() + i * an.cols;
        for (size_t j = 0; j < b.rows; ++j) {
            const double* bj = bn.data.data() + j * bn.cols;
            double s = 0.0;
            for (size_t k = 0; k < an.cols; ++k) s += ai[k] * bj[k];
            out(i, j) = std::clamp(s, -1.0, 1.0);
        }
    }
    return out;
}

Matrix col_sums(const Matrix& a) {
    Matrix out(1, a.cols);
    for (size_t i = 0; i < a.rows; ++i) {
        const double* p = a.data.data() + i * a.cols;
        for (size_t j = 0; j < a.cols; ++j) out.data[j] += p[j];
    }
    return out;
}

bool all_finite(const Matrix& a) {
    for (double v : a.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix adam_update(const Matrix& param, const Matrix& grad, AdamState& state) {
    if (!param.same_shape(grad) || !param.same_shape(state.m) || !param.same_shape(state.v)) {
        throw ShapeError("adam_update: parameter, gradient and moment shapes differ");
    }
    state.step += 1;
    double b1t = 1.0 - std::pow(state.beta1, double(state.step));
    double b2t = 1.0 - std::pow(state.beta2, double(state.step));
    Matrix out = param;
    for (size_t i = 0; i < param.size(); ++i) {
        double g = grad.data[i];
        state.m.data[i] = state.beta1 * state.m.data[i] + (1.0 - state.beta1) * g;
        state.v.data[i] = state.beta2 * state.v.data[i] + (1.0 - state.beta2) * g * g;
        double mhat = state.m.data[i] / b1t;
        double vhat = state.v.data[i] / b2t;
        out.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
    return out;
}

}  // namespace sdc
