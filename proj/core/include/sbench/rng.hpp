#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sbench {

// SplitMix64 finalizer; used both for seeding and for substream derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic substream derivation: mix(master, tag) is stable across
// platforms and independent of evaluation order elsewhere.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = a;
    for (std::uint64_t t : tags) s = mix_seed(s, t);
    return s;
}

// FNV-1a, for hashing string identifiers into seed tags.
inline std::uint64_t fnv1a(const char* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256++ with hand-rolled uniform/normal so that streams are
// bit-reproducible (std:: distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) {
            sm = splitmix64(sm);
            w = sm;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (one value per call, no cached spare).
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        // Rejection-free modulo bias is negligible for n << 2^64; use
        // multiply-shift which is exact enough and deterministic.
        return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform integer in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace sbench
