#pragma once

#include <cstdint>

namespace fairwin {

// Counter-based pseudo-randomness.
//
// Every sampling decision in the streaming code is a pure function of
// (seed, timestamp, stream id).  Two runs over the same prefix therefore make
// identical decisions regardless of what arrives later, which is what makes
// the prefix property of the online coreset an exact set equality rather than
// a distributional statement.

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

// Uniform 64-bit value keyed by (seed, a, b).  Two mixing rounds; adjacent
// keys decorrelate fully.
inline std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = detail::mix64(seed ^ 0x5851f42d4c957f2dULL);
    h = detail::mix64(h ^ detail::mix64(a));
    h = detail::mix64(h ^ detail::mix64(b ^ 0xda3e39cb94b95bdbULL));
    return h;
}

// Uniform draw in [0,1) with 53 random bits.
inline double keyed_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return static_cast<double>(keyed_u64(seed, a, b) >> 11) * 0x1.0p-53;
}

// Small sequential generator for the solver layer (seeding, shuffles).
// Not std::mt19937 + std::uniform_*_distribution: distribution output is
// implementation-defined and the harness promises byte-identical replays.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(detail::mix64(seed ^ 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n).  n must be positive.
    std::uint64_t next_index(std::uint64_t n) {
        // rejection-free modulo is fine here: n is tiny relative to 2^64
        return next_u64() % n;
    }

private:
    std::uint64_t state_;
};

} // namespace fairwin
