#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace muss {

// Deterministic, platform-independent randomness. The toolkit never uses
// <random> distributions because their streams differ across standard
// library implementations; every draw below is defined purely in terms of
// 64-bit integer arithmetic and IEEE doubles.

/// SplitMix64 step (Steele, Lea, Flood 2014). Used for seeding and for
/// deriving independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and a list of stream tags.
/// Mixing is a chained SplitMix64, so derive_seed(s, {a, b}) and
/// derive_seed(s, {b, a}) give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t tag : tags) {
        state ^= tag + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
        out = splitmix64(state);
    }
    return out;
}

/// FNV-1a over a byte string; used to tag seed streams by method name.
inline std::uint64_t fnv1a(const char* s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256** 1.0 (Blackman, Vigna 2018). State is seeded via SplitMix64
/// so any 64-bit value, including 0, is a valid seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via the basic Box-Muller transform (one value per
    /// call, no cached state, identical sequence on every platform).
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::uint32_t> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
        // Partial Fisher-Yates: first k slots are the sample.
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(ids[i], ids[j]);
        }
        ids.resize(k < n ? k : n);
        return ids;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace muss
