#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace fsat {

// splitmix64 step; used to fan one user seed out into independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic combination of a seed with stream labels / indices.
inline std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x5851f42d4c957f2dULL;
    for (std::uint64_t p : parts) {
        state ^= splitmix64(state) ^ p;
        state = splitmix64(state);
    }
    return splitmix64(state);
}

// Small counter-free PRNG with explicit, platform-stable distributions.
// std::<distribution> implementations vary between standard libraries, so
// uniform/gaussian draws are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fsat
