#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sdc {

// Dense row-major real64 matrix. All library math runs in 64-bit floats;
// file payloads (real32) are widened on read.
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
    double operator()(size_t r, size_t c) const { return data[r * cols + c]; }

    std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    size_t size() const { return data.size(); }
};

Matrix matmul(const Matrix& a, const Matrix& b);

// a^T * b without forming the transpose; shapes (m x n)^T (m x k) -> (n x k).
Matrix matmul_at_b(const Matrix& a, const Matrix& b);

Matrix row_l2_normalize(const Matrix& a);

// Pairwise cosine of rows of a against rows of b, clamped to [-1, 1].
Matrix cosine_matrix(const Matrix& a, const Matrix& b);

double row_norm(const Matrix& a, size_t r);

// Column sums as a 1 x cols matrix.
Matrix col_sums(const Matrix& a);

bool all_finite(const Matrix& a);

// Adam optimizer state for one parameter matrix.
struct AdamState {
    Matrix m;
    Matrix v;
    uint64_t step = 0;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(size_t rows, size_t cols, double learning_rate)
        : m(rows, cols), v(rows, cols), lr(learning_rate) {}
};

// One bias-corrected Adam step. Mutates `state` (moments, step counter) and
// returns the updated parameter.
Matrix adam_update(const Matrix& param, const Matrix& grad, AdamState& state);

}  // namespace sdc
