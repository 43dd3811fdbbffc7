#pragma once

#include <cstdint>

namespace zenoguard {

// SplitMix64 (Steele, Lea, Flood 2014). Children are derived with split(i),
// which seeds a fresh stream from mix(state ^ mix(i + 1)); the parent stream
// is not advanced, so child seeds depend only on (seed, i).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

    SplitMix64 split(std::uint64_t index) const noexcept { return SplitMix64(mix(state_ ^ mix(index + 1))); }

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace zenoguard
