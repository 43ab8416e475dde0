#pragma once

#include <cstdint>
#include <span>

#include "sdc/matrix.hpp"

namespace sdc {

// Linear hash layer: f = xW + bias, codes = sign(f).
struct HashModel {
    Matrix weights;  // d x K
    Matrix bias;     // 1 x K
    uint32_t k_bits = 0;

    size_t input_dim() const { return weights.rows; }
};

// N x K binary codes packed least-significant-bit first into 64-bit words.
// Bit j of row i lives in word j / 64 at position j % 64 and is 1 iff the
// code entry is +1. Bits past k_bits in the last word are zero.
struct PackedCodes {
    size_t n = 0;
    uint32_t k_bits = 0;
    size_t words_per_row = 0;
    std::vector<uint64_t> words;

    PackedCodes() = default;
    PackedCodes(size_t n_, uint32_t k_bits_)
        : n(n_), k_bits(k_bits_), words_per_row((k_bits_ + 63) / 64),
          words(n_ * words_per_row, 0) {}

    std::span<const uint64_t> row(size_t i) const {
        return {words.data() + i * words_per_row, words_per_row};
    }
    std::span<uint64_t> row(size_t i) {
        return {words.data() + i * words_per_row, words_per_row};
    }
};

// Continuous codes f = xW + bias (bias broadcast over rows). Not yet signed.
Matrix forward(const HashModel& model, const Matrix& x);

// Entrywise sign with sign(0) := +1, so codes are deterministic.
Matrix sign_codes(const Matrix& f);

// Pack a matrix of exact +/-1 entries. Rejects anything else.
PackedCodes pack(const Matrix& codes);

Matrix unpack(const PackedCodes& codes);

// Gaussian init scaled by 1/sqrt(d), zero bias, deterministic under seed.
HashModel init_model(size_t d, uint32_t k, uint64_t seed);

}  // namespace sdc
