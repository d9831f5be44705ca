#pragma once

// Test-only reference implementations.  Each one recomputes a quantity the
// library also computes, by a deliberately different route, so the two sides
// can check each other.

#include <algorithm>
#include <numeric>
#include <vector>

#include "fairwin/geometry.hpp"
#include "fairwin/points.hpp"

namespace testutil {

inline fairwin::TimedPoint tp(std::int64_t ts, std::vector<std::int64_t> xy, double w = 1.0,
                              fairwin::GroupMask g = 0) {
    return fairwin::TimedPoint{fairwin::GridPoint{std::move(xy)}, ts, w, g};
}

// Exact two-center transportation cost by the greedy exchange argument:
// charge everything to center 1, then move gamma0 mass to center 0 in
// ascending order of the per-unit saving d0^z - d1^z.  Optimal because the
// objective is linear and the feasible set is a box plus one sum constraint.
inline double transport_cost_k2(const std::vector<fairwin::TimedPoint>& pts,
                                const fairwin::GridPoint& c0, const fairwin::GridPoint& c1,
                                double gamma0, int z) {
    double base = 0.0;
    std::vector<std::pair<double, double>> items;  // (d0^z - d1^z, weight)
    for (const auto& p : pts) {
        const double d0 = fairwin::dist_z(p.location, c0, z);
        const double d1 = fairwin::dist_z(p.location, c1, z);
        base += p.weight * d1;
        items.emplace_back(d0 - d1, p.weight);
    }
    std::sort(items.begin(), items.end());
    double cost = base, left = gamma0;
    for (const auto& [delta, w] : items) {
        if (left <= 0.0) break;
        const double take = std::min(left, w);
        cost += take * delta;
        left -= take;
    }
    return cost;
}

} // namespace testutil
