#pragma once

// Small deterministic RNG (splitmix64 core, Box-Muller normals). Hand-rolled
// instead of <random> distributions so that seeded outputs are bit-identical
// across standard libraries.

#include <cmath>
#include <cstdint>

namespace mdiew {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Independent stream for (seed, index) pairs; used by sweeps and multi-seed
// Monte Carlo batches so every unit of work owns its own generator.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(detail::mix64(seed ^ detail::mix64(index + 0xD1B54A32D192ED03ull)));
}

}  // namespace mdiew
