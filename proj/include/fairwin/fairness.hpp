#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "fairwin/points.hpp"
#include "fairwin/simplex.hpp"
#include "fairwin/transport.hpp"

namespace fairwin {

// Per-group fraction bounds: a clustering is fair when, in every non-empty
// cluster, the weight share of group j lies in [alpha[j], beta[j]].
struct FairnessSpec {
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t num_groups() const { return alpha.size(); }

    void validate() const {
        if (alpha.size() != beta.size())
            throw std::invalid_argument("FairnessSpec: alpha/beta size mismatch");
        for (std::size_t j = 0; j < alpha.size(); ++j)
            if (!(alpha[j] >= 0.0) || !(beta[j] <= 1.0) || !(alpha[j] <= beta[j]))
                throw std::invalid_argument("FairnessSpec: need 0 <= alpha <= beta <= 1");
    }

    // Widened bounds ((1-eps)*alpha, (1+eps)*beta), capped into [0, 1].
    FairnessSpec relaxed(double eps) const {
        FairnessSpec out = *this;
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            out.alpha[j] = alpha[j] * (1.0 - eps);
            out.beta[j] = std::min(1.0, beta[j] * (1.0 + eps));
        }
        return out;
    }
};

inline constexpr double kFracTol = 1e-9;

// Checks the fraction bounds on explicit clusters.  Empty clusters pass
// vacuously.  Points may sit fractionally in several clusters when the
// caller built them from an assignment plan.
struct ClusterMass {
    double total = 0.0;
    std::vector<double> per_group;  // indexed by group bit
};

inline bool fairness_feasible(const std::vector<ClusterMass>& clusters, const FairnessSpec& spec) {
    spec.validate();
    for (const auto& cl : clusters) {
        if (cl.total <= 0.0) continue;
        for (std::size_t j = 0; j < spec.num_groups(); ++j) {
            const double got = j < cl.per_group.size() ? cl.per_group[j] : 0.0;
            const double frac = got / cl.total;
            if (frac < spec.alpha[j] - kFracTol || frac > spec.beta[j] + kFracTol) return false;
        }
    }
    return true;
}

inline bool fairness_feasible(const std::vector<std::vector<TimedPoint>>& clusters,
                              const FairnessSpec& spec) {
    std::vector<ClusterMass> masses;
    for (const auto& cl : clusters) {
        ClusterMass m;
        m.per_group.assign(spec.num_groups(), 0.0);
        for (const auto& p : cl) {
            m.total += p.weight;
            for (std::size_t j = 0; j < spec.num_groups(); ++j)
                if (p.groups >> j & 1) m.per_group[j] += p.weight;
        }
        masses.push_back(std::move(m));
    }
    return fairness_feasible(masses, spec);
}

// Clusters induced by a (possibly fractional) assignment plan.
inline std::vector<ClusterMass> plan_clusters(const std::vector<TimedPoint>& pts,
                                              const std::vector<Flow>& plan, std::size_t k,
                                              std::size_t num_groups) {
    std::vector<ClusterMass> out(k);
    for (auto& c : out) c.per_group.assign(num_groups, 0.0);
    for (const auto& f : plan) {
        out[f.center].total += f.amount;
        for (std::size_t j = 0; j < num_groups; ++j)
            if (pts[f.point].groups >> j & 1) out[f.center].per_group[j] += f.amount;
    }
    return out;
}

enum class FairStatus { kOptimal, kInfeasible };

struct FairCostResult {
    FairStatus status = FairStatus::kInfeasible;
    double cost = 0.0;        // plan evaluated at exact dist^z
    double cost_bound = 0.0;  // optimum of the rounded-cost relaxation
    std::vector<Flow> plan;
    bool converged = true;
};

// Cheapest assignment of P onto the centers subject to the fairness spec,
// with cluster sizes free.
//
// Decomposition: fix, per group-combination mask g and center c, the mass
// m[g][c] the mask sends to the center.  The fairness rows constrain only
// these totals, and for fixed totals the remaining problem splits into one
// transportation instance per mask.  The outer problem -- minimize the sum
// of the per-mask transport costs over the fairness polytope -- is convex
// piecewise-linear in m, so a cutting-plane loop over a small LP master
// converges finitely; transport duals supply the cuts.  Feasibility is
// decided exactly by the master polytope, which only sees mask totals.
inline FairCostResult fair_cost(const std::vector<TimedPoint>& pts,
                                const std::vector<GridPoint>& centers,
                                const FairnessSpec& spec, int z) {
    spec.validate();
    if (centers.empty()) throw std::invalid_argument("fair_cost: no centers");
    const std::size_t k = centers.size();
    const std::size_t ell = spec.num_groups();

    FairCostResult out;
    if (pts.empty()) {
        out.status = FairStatus::kOptimal;
        return out;
    }
    const GroupMask allowed = ell >= 64 ? ~GroupMask{0} : ((GroupMask{1} << ell) - 1);
    for (const auto& p : pts)
        if ((p.groups & ~allowed) != 0)
            throw std::invalid_argument("fair_cost: point group bit outside the spec");

    // partition by mask
    std::map<GroupMask, std::vector<std::size_t>> parts;
    for (std::size_t i = 0; i < pts.size(); ++i) parts[pts[i].groups].push_back(i);
    const std::size_t L = parts.size();

    std::vector<GroupMask> masks;
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> part_weight;
    std::vector<TransportInstance> instances;
    instances.reserve(L);
    for (auto& [mask, idx] : parts) {
        masks.push_back(mask);
        double w = 0.0;
        std::vector<TimedPoint> sub;
        sub.reserve(idx.size());
        for (auto i : idx) {
            sub.push_back(pts[i]);
            w += pts[i].weight;
        }
        part_weight.push_back(w);
        instances.emplace_back(sub, centers, z);
        members.push_back(std::move(idx));
    }

    // master variables: m[g*k + c], then theta[g]
    const std::size_t nm = L * k;
    const std::size_t nvars = nm + L;
    struct Cut {
        std::size_t g;
        std::vector<double> lambda;  // per center
        double rhs;
    };
    std::vector<Cut> cuts;

    double best_ub = std::numeric_limits<double>::infinity();
    std::vector<TransportResult> best_parts(L);
    out.converged = false;

    constexpr int kMaxIters = 400;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        LpProblem lp(nvars);
        std::vector<double> obj(nvars, 0.0);
        for (std::size_t g = 0; g < L; ++g) obj[nm + g] = 1.0;
        lp.set_objective(obj);
        for (std::size_t g = 0; g < L; ++g) {
            std::vector<std::pair<std::size_t, double>> row;
            for (std::size_t c = 0; c < k; ++c) row.push_back({g * k + c, 1.0});
            lp.add_row(row, '=', part_weight[g]);
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < ell; ++j) {
                std::vector<std::pair<std::size_t, double>> hi, lo;
                for (std::size_t g = 0; g < L; ++g) {
                    const double member = masks[g] >> j & 1 ? 1.0 : 0.0;
                    hi.push_back({g * k + c, member - spec.beta[j]});
                    lo.push_back({g * k + c, spec.alpha[j] - member});
                }
                lp.add_row(hi, '<', 0.0);
                lp.add_row(lo, '<', 0.0);
            }
        for (const auto& cut : cuts) {
            std::vector<std::pair<std::size_t, double>> row;
            row.push_back({nm + cut.g, -1.0});
            for (std::size_t c = 0; c < k; ++c) row.push_back({cut.g * k + c, cut.lambda[c]});
            lp.add_row(row, '<', cut.rhs);
        }

        const auto master = lp.solve();
        if (master.status == LpStatus::kInfeasible) {
            out.status = FairStatus::kInfeasible;
            return out;
        }
        if (master.status != LpStatus::kOptimal)
            throw std::runtime_error("fair_cost: master LP unbounded");

        // evaluate the proposed profile exactly
        double ub = 0.0;
        std::vector<TransportResult> cur(L);
        bool cut_added = false;
        for (std::size_t g = 0; g < L; ++g) {
            AssignmentConstraint demands(k, 0.0);
            double s = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                demands[c] = std::max(0.0, master.x[g * k + c]);
                s += demands[c];
            }
            if (s > 0.0) {
                const double fix = part_weight[g] / s;
                for (auto& d : demands) d *= fix;
            }
            cur[g] = instances[g].solve(demands);
            ub += cur[g].cost_bound;

            const double theta = master.x[nm + g];
            if (cur[g].cost_bound > theta + 1e-9 * (1.0 + std::abs(cur[g].cost_bound))) {
                Cut cut;
                cut.g = g;
                cut.lambda = cur[g].center_duals;
                double r = -cur[g].cost_bound;
                for (std::size_t c = 0; c < k; ++c) r += cut.lambda[c] * demands[c];
                cut.rhs = r;
                cuts.push_back(std::move(cut));
                cut_added = true;
            }
        }
        if (ub < best_ub) {
            best_ub = ub;
            best_parts = cur;
        }
        const double lb = master.objective;
        if (!cut_added || best_ub - lb <= 1e-8 * (1.0 + std::abs(best_ub))) {
            out.converged = true;
            break;
        }
    }

    out.status = FairStatus::kOptimal;
    out.cost_bound = best_ub;
    for (std::size_t g = 0; g < L; ++g) {
        for (const auto& f : best_parts[g].plan) {
            out.plan.push_back({members[g][f.point], f.center, f.amount});
            out.cost += f.amount * dist_z(pts[members[g][f.point]].location, centers[f.center], z);
        }
    }
    return out;
}

} // namespace fairwin
