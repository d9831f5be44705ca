#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fairwin {

// Points live on an integer grid.  Coordinates are signed 64-bit; generators
// use [0, Delta] or [1, Delta] interchangeably, nothing assumes positivity.
struct GridPoint {
    std::vector<std::int64_t> coords;

    GridPoint() = default;
    explicit GridPoint(std::vector<std::int64_t> c) : coords(std::move(c)) {}
    GridPoint(std::initializer_list<std::int64_t> c) : coords(c) {}

    std::size_t dim() const { return coords.size(); }

    bool operator==(const GridPoint& o) const { return coords == o.coords; }
    bool operator!=(const GridPoint& o) const { return coords != o.coords; }
};

struct ClusteringParams {
    int k = 1;           // number of centers
    int z = 1;           // cost exponent: 1 = k-median, 2 = k-means
    std::int64_t delta = 1 << 16;  // grid side length Delta
    int dim = 2;
    double epsilon = 0.5;
    double failure_prob = 0.01;    // delta in the probabilistic guarantees
};

namespace detail {

inline void check_same_dim(const GridPoint& a, const GridPoint& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("GridPoint dimension mismatch");
}

} // namespace detail

// Exact squared Euclidean distance.  __int128 accumulation: coordinate
// differences up to ~3e9 square without overflow, far beyond any grid here.
inline unsigned __int128 dist2_exact(const GridPoint& a, const GridPoint& b) {
    detail::check_same_dim(a, b);
    unsigned __int128 s = 0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
        const std::int64_t d = a.coords[i] - b.coords[i];
        s += static_cast<unsigned __int128>(static_cast<__int128>(d) * d);
    }
    return s;
}

inline double dist(const GridPoint& a, const GridPoint& b) {
    return std::sqrt(static_cast<double>(dist2_exact(a, b)));
}

// dist(a,b)^z.  z=1 and z=2 are the supported cost exponents; z=2 avoids the
// sqrt entirely so both stay exact for in-range integer inputs.
inline double dist_z(const GridPoint& a, const GridPoint& b, int z) {
    if (z == 2) return static_cast<double>(dist2_exact(a, b));
    if (z == 1) return dist(a, b);
    return std::pow(dist(a, b), z);
}

// Ring index of p around center q.
//   kInnerRing  dist == 0 (the center itself; stored verbatim, never sampled)
//   0           0 < dist <= 1
//   j >= 1      2^(j-1) < dist <= 2^j
// Exact integer comparison on dist^2 vs 4^j, so boundary points are stable.
inline constexpr int kInnerRing = -1;

inline int ring_index(const GridPoint& p, const GridPoint& q) {
    const unsigned __int128 d2 = dist2_exact(p, q);
    if (d2 == 0) return kInnerRing;
    int j = 0;
    unsigned __int128 bound = 1;  // 4^j
    while (d2 > bound) {
        ++j;
        if (j >= 127) throw std::overflow_error("ring_index: distance out of range");
        bound <<= 2;
    }
    return j;
}

// Largest ring index that can occur between two points of [0,Delta]^d.
inline int max_ring_index(std::int64_t delta, int dim) {
    const double r = static_cast<double>(delta) * std::sqrt(static_cast<double>(dim));
    return static_cast<int>(std::ceil(std::log2(std::max(r, 1.0))));
}

// Index of the nearest center, ties to the lowest index.  Exact squared
// distances make the tie-break deterministic across platforms.
inline std::size_t nearest_center(const GridPoint& p, const std::vector<GridPoint>& centers) {
    if (centers.empty())
        throw std::invalid_argument("nearest_center: empty center list");
    std::size_t best = 0;
    unsigned __int128 best_d2 = dist2_exact(p, centers[0]);
    for (std::size_t i = 1; i < centers.size(); ++i) {
        const unsigned __int128 d2 = dist2_exact(p, centers[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

} // namespace fairwin
