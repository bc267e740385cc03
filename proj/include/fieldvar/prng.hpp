#pragma once

#include <cstddef>
#include <cstdint>

namespace fieldvar {

// SplitMix64. Every seeded code path in the project draws from this
// generator, so fixed-seed runs are bit-reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t next_index(std::size_t n) {
        auto i = static_cast<std::size_t>(next_double() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

}  // namespace fieldvar
