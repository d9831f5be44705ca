#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "fairwin/geometry.hpp"
#include "fairwin/points.hpp"

namespace fairwin {

// Per-center mass targets.  An assignment constraint for constrained_cost
// must sum to the total point weight; partial_cost takes the entries as
// capacities instead and routes whatever the smaller side allows.
using AssignmentConstraint = std::vector<double>;

struct Flow {
    std::size_t point;
    std::size_t center;
    double amount;
};

struct TransportResult {
    double cost = 0.0;        // plan evaluated at exact dist^z
    double cost_bound = 0.0;  // optimum of the rounded-cost instance
    double quantum = 0.0;     // |cost - true optimum| <= quantum (rounding slack)
    std::vector<Flow> plan;
    std::vector<double> center_duals;  // subgradient of cost_bound wrt demands
};

// Min-cost transportation between weighted points and centers, solved by
// successive shortest augmenting paths with node potentials.
//
// Distances are scaled to integers, cost_int = round(dist^z / max * 2^26),
// so path comparisons inside Dijkstra are exact and termination does not
// depend on floating-point luck.  The returned plan is optimal for the
// rounded costs; against exact costs it is optimal up to
//     quantum = routed_mass * max_dist^z * 2^-26,
// which the caller can read off the result.  Masses stay real-valued; each
// augmentation exactly exhausts a point or a center, so there are at most
// n + k augmentations.
class TransportInstance {
public:
    TransportInstance(const std::vector<TimedPoint>& pts,
                      const std::vector<GridPoint>& centers,
                      int z)
        : n_(pts.size()), k_(centers.size()), z_(z) {
        if (k_ == 0) throw std::invalid_argument("transport: no centers");
        supplies_.reserve(n_);
        cost_.resize(n_ * k_);
        for (std::size_t i = 0; i < n_; ++i) {
            supplies_.push_back(pts[i].weight);
            total_supply_ += pts[i].weight;
            for (std::size_t c = 0; c < k_; ++c) {
                const double d = dist_z(pts[i].location, centers[c], z_);
                cost_[i * k_ + c] = d;
                if (d > max_cost_) max_cost_ = d;
            }
        }
        const double scale = max_cost_ > 0.0 ? kScale / max_cost_ : 1.0;
        scale_ = scale;
        icost_.resize(n_ * k_);
        for (std::size_t e = 0; e < n_ * k_; ++e)
            icost_[e] = static_cast<std::int64_t>(std::llround(cost_[e] * scale));
    }

    double total_supply() const { return total_supply_; }
    double max_cost() const { return max_cost_; }
    std::size_t size() const { return n_; }
    std::size_t centers() const { return k_; }

    // Routes min(total supply, total demand) at minimum cost; the smaller
    // side ends up saturated.  Balance checks belong to the callers.
    TransportResult solve(const AssignmentConstraint& demands) const {
        if (demands.size() != k_)
            throw std::invalid_argument("transport: demand count != center count");
        for (double g : demands)
            if (g < 0.0 || !std::isfinite(g))
                throw std::invalid_argument("transport: demand must be finite and >= 0");

        std::vector<double> rs = supplies_;     // remaining supply
        std::vector<double> rd = demands;       // remaining demand
        std::vector<double> flow(n_ * k_, 0.0);
        std::vector<std::int64_t> pot(n_ + k_, 0);

        // Each augmentation subtracts the bottleneck entity's own value from
        // it, which is exact in doubles, so supplies and demands drain to a
        // hard 0.0 and the loop ends after at most n + k rounds.
        double routed = 0.0;
        while (augment(rs, rd, flow, pot, routed)) {
        }

        TransportResult out;
        out.center_duals.resize(k_);
        for (std::size_t c = 0; c < k_; ++c)
            out.center_duals[c] = static_cast<double>(pot[n_ + c]) / scale_;
        double ibound = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t c = 0; c < k_; ++c) {
                const double f = flow[i * k_ + c];
                if (f > 0.0) {
                    out.plan.push_back({i, c, f});
                    out.cost += f * cost_[i * k_ + c];
                    ibound += f * static_cast<double>(icost_[i * k_ + c]);
                }
            }
        out.cost_bound = ibound / scale_;
        out.quantum = routed * max_cost_ / kScale;
        return out;
    }

private:
    static constexpr double kScale = 67108864.0;  // 2^26
    static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

    // One shortest-path augmentation.  Returns false if no deficit center is
    // reachable from a surplus point (cannot happen on a complete bipartite
    // graph unless everything is already routed).
    bool augment(std::vector<double>& rs, std::vector<double>& rd,
                 std::vector<double>& flow, std::vector<std::int64_t>& pot,
                 double& routed) const {
        const std::size_t nodes = n_ + k_;
        std::vector<std::int64_t> dist(nodes, kInf);
        std::vector<std::int32_t> parent(nodes, -1);  // for centers: point fed from; for points: center fed from
        std::vector<bool> settled(nodes, false);

        using Item = std::pair<std::int64_t, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        for (std::size_t i = 0; i < n_; ++i)
            if (rs[i] > 0.0) {
                dist[i] = 0;
                pq.push({0, i});
            }
        if (pq.empty()) return false;

        std::int64_t best_sink_dist = kInf;
        std::size_t best_sink = nodes;

        while (!pq.empty()) {
            const auto [d, u] = pq.top();
            pq.pop();
            if (settled[u] || d != dist[u]) continue;
            settled[u] = true;
            if (d >= best_sink_dist) break;  // nothing closer remains
            if (u < n_) {
                // point -> every center
                for (std::size_t c = 0; c < k_; ++c) {
                    const std::size_t v = n_ + c;
                    const std::int64_t rc = icost_[u * k_ + c] + pot[u] - pot[v];
                    if (d + rc < dist[v]) {
                        dist[v] = d + rc;
                        parent[v] = static_cast<std::int32_t>(u);
                        pq.push({dist[v], v});
                        if (rd[c] > 0.0 && dist[v] < best_sink_dist) {
                            best_sink_dist = dist[v];
                            best_sink = v;
                        }
                    }
                }
            } else {
                // center -> points it currently feeds (residual arcs)
                const std::size_t c = u - n_;
                for (std::size_t i = 0; i < n_; ++i) {
                    if (flow[i * k_ + c] <= 0.0) continue;
                    const std::int64_t rc = -icost_[i * k_ + c] + pot[u] - pot[i];
                    if (d + rc < dist[i]) {
                        dist[i] = d + rc;
                        parent[i] = static_cast<std::int32_t>(c);
                        pq.push({dist[i], i});
                    }
                }
            }
        }
        if (best_sink == nodes) return false;

        for (std::size_t v = 0; v < nodes; ++v)
            if (dist[v] < best_sink_dist) pot[v] += dist[v] - best_sink_dist;
        // nodes at or beyond the sink distance keep pot unchanged; combined
        // with the line above this is the standard pot[v] += min(dist, D) - D
        // shift, which preserves nonnegative reduced costs.

        // Trace the path back from the sink, find the bottleneck.
        double bottleneck = rd[best_sink - n_];
        {
            std::size_t v = best_sink;
            while (true) {
                if (v >= n_) {
                    const std::size_t p = static_cast<std::size_t>(parent[v]);
                    if (parent[p] < 0) {  // p is the source point
                        bottleneck = std::min(bottleneck, rs[p]);
                        break;
                    }
                    v = p;
                } else {
                    const std::size_t c = static_cast<std::size_t>(parent[v]);
                    bottleneck = std::min(bottleneck, flow[v * k_ + c]);
                    v = n_ + c;
                }
            }
        }

        // Apply the augmentation.  The bottleneck equals one entity's stored
        // value, so that entity lands on exactly 0.0.
        {
            std::size_t v = best_sink;
            rd[best_sink - n_] -= bottleneck;
            while (true) {
                const std::size_t p = static_cast<std::size_t>(parent[v]);
                flow[p * k_ + (v - n_)] += bottleneck;
                if (parent[p] < 0) {
                    rs[p] -= bottleneck;
                    break;
                }
                const std::size_t c = static_cast<std::size_t>(parent[p]);
                flow[p * k_ + c] -= bottleneck;
                v = n_ + c;
            }
        }
        routed += bottleneck;
        return true;
    }

    std::size_t n_, k_;
    int z_;
    std::vector<double> supplies_;
    std::vector<double> cost_;
    std::vector<std::int64_t> icost_;
    double total_supply_ = 0.0;
    double max_cost_ = 0.0;
    double scale_ = 1.0;
};

// Minimum cost of moving P onto C with exactly constraint(c) mass per center.
// The constraint must balance the total weight to 1e-9 relative.
inline TransportResult constrained_cost(const std::vector<TimedPoint>& pts,
                                        const std::vector<GridPoint>& centers,
                                        const AssignmentConstraint& constraint,
                                        int z) {
    TransportInstance inst(pts, centers, z);
    double total_demand = 0.0;
    for (double g : constraint) total_demand += g;
    const double ref = std::max({inst.total_supply(), total_demand, 1.0});
    if (std::abs(total_demand - inst.total_supply()) > 1e-9 * ref)
        throw std::invalid_argument("constrained_cost: constraint does not balance total weight");
    return inst.solve(constraint);
}

// Partial-assignment cost: supplies and capacities need not balance, the
// smaller side is saturated, and on balanced inputs this coincides with
// constrained_cost.
inline TransportResult partial_cost(const std::vector<TimedPoint>& pts,
                                    const std::vector<GridPoint>& centers,
                                    const AssignmentConstraint& capacities,
                                    int z) {
    TransportInstance inst(pts, centers, z);
    return inst.solve(capacities);
}

} // namespace fairwin
