#pragma once

#include <cstdint>

namespace daosim {

/// Portable 64-bit generator used everywhere randomness is needed, so that
/// runs are reproducible bit-for-bit across platforms and across language
/// ports. The update rule is splitmix64:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Derived draws are defined on top of nextU64():
///   nextDouble()       = (nextU64() >> 11) * 2^-53          in [0, 1)
///   nextBelow(m)       = nextU64() % m                      in [0, m)
///   nextInRange(a, b)  = a + nextDouble() * (b - a)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t nextU64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double nextDouble() {
        return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, bound). bound must be > 0. The modulo bias is
    /// irrelevant at the bounds used here (tens of agents) and keeps the
    /// recipe trivial to reproduce in other languages.
    std::uint64_t nextBelow(std::uint64_t bound) {
        return nextU64() % bound;
    }

    double nextInRange(double lo, double hi) {
        return lo + nextDouble() * (hi - lo);
    }

private:
    std::uint64_t state_;
};

}  // namespace daosim
