#include "sdc/hash_model.hpp"

#include <cmath>
#include <string>

#include "sdc/errors.hpp"
#include "sdc/rng.hpp"

namespace sdc {

Matrix forward(const HashModel& model, const Matrix& x) {
    if (x.cols != model.weights.rows) {
        throw ShapeError("forward: feature dim " + std::to_string(x.cols) +
                         " does not match model dim " + std::to_string(model.weights.rows));
    }
    Matrix f = matmul(x, model.weights);
    for (size_t i = 0; i < f.rows; ++i) {
        double* p = f.data.data() + i * f.cols;
        for (size_t j = 0; j < f.cols; ++j) p[j] += model.bias.data[j];
    }
    return f;
}

Matrix sign_codes(const Matrix& f) {
    Matrix out(f.rows, f.cols);
    for (size_t i = 0; i < f.size(); ++i) {
        out.data[i] = f.data[i] >= 0.0 ? 1.0 : -1.0;
    }
    return out;
}

PackedCodes pack(const Matrix& codes) {
    PackedCodes out(codes.rows, uint32_t(codes.cols));
    for (size_t i = 0; i < codes.rows; ++i) {
        auto row = out.row(i);
        for (size_t j = 0; j < codes.cols; ++j) {
            double v = codes(i, j);
            if (v != 1.0 && v != -1.0) {
                throw EncodingError("pack: entry at row " + std::to_string(i) + ", col " +
                                    std::to_string(j) + " is not +/-1");
            }
            if (v == 1.0) {
                row[j / 64] |= uint64_t(1) << (j % 64);
            }
        }
    }
    return out;
}

Matrix unpack(const PackedCodes& codes) {
    Matrix out(codes.n, codes.k_bits);
    for (size_t i = 0; i < codes.n; ++i) {
        auto row = codes.row(i);
        for (size_t j = 0; j < codes.k_bits; ++j) {
            bool bit = (row[j / 64] >> (j % 64)) & 1;
            out(i, j) = bit ? 1.0 : -1.0;
        }
    }
    return out;
}

HashModel init_model(size_t d, uint32_t k, uint64_t seed) {
    if (d == 0 || k == 0) {
        throw DomainError("init_model: dimensions must be >= 1");
    }
    HashModel model;
    model.weights = Matrix(d, k);
    model.bias = Matrix(1, k);
    model.k_bits = k;
    Rng rng = derive_rng(seed, RngStream::model_init);
    double scale = 1.0 / std::sqrt(double(d));
    for (double& w : model.weights.data) {
        w = scale * rng.next_gaussian();
    }
    return model;
}

}  // namespace sdc
