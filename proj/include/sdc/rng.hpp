#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sdc {

// SplitMix64 generator. Self-contained so that streams are bit-reproducible
// across standard libraries and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n).
    uint64_t next_below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller. Uncached: two uniforms per draw,
    // so the consumption pattern is stream-position independent.
    double next_gaussian() {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// Named substreams derived from one master seed, so toggling a consumer of
// one stream (e.g. view noise) does not shift the draws of the others.
enum class RngStream : uint64_t {
    model_init = 1,
    shuffle = 2,
    view_noise = 3,
    sampling = 4,
};

inline Rng derive_rng(uint64_t master_seed, RngStream stream) {
    uint64_t z = master_seed ^ (0xD1B54A32D192ED03ull * (uint64_t(stream) + 1));
    z = (z ^ (z >> 29)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 32)) * 0xC4CEB9FE1A85EC53ull;
    return Rng(z ^ (z >> 29));
}

}  // namespace sdc
