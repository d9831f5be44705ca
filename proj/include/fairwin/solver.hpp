#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairwin/fairness.hpp"
#include "fairwin/geometry.hpp"
#include "fairwin/points.hpp"
#include "fairwin/prng.hpp"
#include "fairwin/transport.hpp"

namespace fairwin {

struct FairSolution {
    std::vector<GridPoint> centers;
    std::vector<Flow> plan;  // point indices refer to the solved point vector
    double cost = 0.0;
    bool feasible = false;
    FairStatus status = FairStatus::kInfeasible;
    FairnessSpec relaxation;  // the spec the plan actually satisfies
};

namespace detail {

inline std::vector<GridPoint> unique_locations(const std::vector<TimedPoint>& pts) {
    std::map<std::vector<std::int64_t>, bool> seen;
    std::vector<GridPoint> out;
    for (const auto& p : pts) {
        auto [it, fresh] = seen.emplace(p.location.coords, true);
        if (fresh) out.push_back(p.location);
    }
    return out;
}

inline double plan_cost(const std::vector<TimedPoint>& pts, const std::vector<GridPoint>& centers,
                        const std::vector<Flow>& plan, int z) {
    double c = 0.0;
    for (const auto& f : plan) c += f.amount * dist_z(pts[f.point].location, centers[f.center], z);
    return c;
}

// Mass-weighted D^z seeding over candidate locations.
inline std::vector<GridPoint> seed_centers(const std::vector<TimedPoint>& pts,
                                           const std::vector<GridPoint>& candidates,
                                           std::size_t k, int z, Rng& rng) {
    std::vector<GridPoint> centers;
    std::vector<bool> used(candidates.size(), false);

    auto pick_first = [&]() {
        double total = 0.0;
        for (const auto& p : pts) total += p.weight;
        double r = rng.next_unit() * total;
        const GridPoint* chosen = &pts.front().location;
        for (const auto& p : pts) {
            r -= p.weight;
            if (r <= 0) {
                chosen = &p.location;
                break;
            }
        }
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (candidates[c].coords == chosen->coords) {
                used[c] = true;
                break;
            }
        centers.push_back(*chosen);
    };
    pick_first();

    while (centers.size() < k) {
        double total = 0.0;
        std::vector<double> score(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::size_t nc = nearest_center(pts[i].location, centers);
            score[i] = pts[i].weight * dist_z(pts[i].location, centers[nc], z);
            total += score[i];
        }
        std::size_t pick = candidates.size();
        if (total > 0) {
            double r = rng.next_unit() * total;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                r -= score[i];
                if (r <= 0) {
                    for (std::size_t c = 0; c < candidates.size(); ++c)
                        if (!used[c] && candidates[c].coords == pts[i].location.coords) {
                            pick = c;
                            break;
                        }
                    break;
                }
            }
        }
        if (pick == candidates.size()) {
            // degenerate mass: fall back to the first unused candidate
            for (std::size_t c = 0; c < candidates.size(); ++c)
                if (!used[c]) {
                    pick = c;
                    break;
                }
        }
        if (pick == candidates.size()) break;  // fewer distinct locations than k
        used[pick] = true;
        centers.push_back(candidates[pick]);
    }
    return centers;
}

} // namespace detail

// Recompute the plan cost from scratch; solvers guarantee this matches the
// stored cost within 1e-6 relative.
inline double evaluate_solution(const std::vector<TimedPoint>& pts, const FairSolution& sol,
                                int z) {
    return detail::plan_cost(pts, sol.centers, sol.plan, z);
}

inline void assert_solution_valid(const std::vector<TimedPoint>& pts, const FairSolution& sol,
                                  int z) {
    if (!sol.feasible) return;
    const auto clusters =
        plan_clusters(pts, sol.plan, sol.centers.size(), sol.relaxation.num_groups());
    if (!fairness_feasible(clusters, sol.relaxation))
        throw std::logic_error("solver: plan violates its recorded relaxation");
    const double re = evaluate_solution(pts, sol, z);
    if (std::abs(re - sol.cost) > 1e-6 * (1.0 + std::abs(re)))
        throw std::logic_error("solver: stored cost does not re-evaluate");
}

// Exact discrete-center optimum by exhaustive center enumeration.  Ground
// truth for ratio tests; guarded to tiny instances.
inline FairSolution brute_force_fair(const std::vector<TimedPoint>& pts, const FairnessSpec& spec,
                                     std::size_t k, int z,
                                     const std::vector<TimedPoint>& candidate_centers) {
    spec.validate();
    if (pts.size() > 64) throw std::invalid_argument("brute force: instance too large");
    if (k < 1) throw std::invalid_argument("brute force: k must be positive");
    auto cand = detail::unique_locations(candidate_centers);
    if (cand.empty()) throw std::invalid_argument("brute force: no candidate centers");
    const std::size_t kk = std::min(k, cand.size());

    double combos = 1.0;
    for (std::size_t i = 0; i < kk; ++i) combos = combos * (cand.size() - i) / (i + 1);
    if (combos > 1e5) throw std::invalid_argument("brute force: too many center subsets");

    FairSolution best;
    best.relaxation = spec;
    if (pts.empty()) {
        best.feasible = true;
        best.status = FairStatus::kOptimal;
        for (std::size_t i = 0; i < kk; ++i) best.centers.push_back(cand[i]);
        return best;
    }

    std::vector<std::size_t> idx(kk);
    for (std::size_t i = 0; i < kk; ++i) idx[i] = i;
    bool more = true;
    while (more) {
        std::vector<GridPoint> centers;
        for (std::size_t i : idx) centers.push_back(cand[i]);
        const auto r = fair_cost(pts, centers, spec, z);
        if (r.status == FairStatus::kOptimal &&
            (!best.feasible || r.cost < best.cost)) {
            best.centers = centers;
            best.plan = r.plan;
            best.cost = r.cost;
            best.feasible = true;
            best.status = FairStatus::kOptimal;
        }
        // next k-combination in lexicographic order
        more = false;
        for (std::size_t i = kk; i-- > 0;) {
            if (idx[i] + (kk - i) < cand.size()) {
                ++idx[i];
                for (std::size_t j = i + 1; j < kk; ++j) idx[j] = idx[j - 1] + 1;
                more = true;
                break;
            }
        }
    }
    assert_solution_valid(pts, best, z);
    return best;
}

// Single-swap local search with LP assignment.  Swaps are scored by
// fair_cost under the relaxed spec; the best strictly improving swap
// (lowest index on ties) is accepted while the relative decrease is at
// least 1e-4.  Feasibility depends only on group masses, so one infeasible
// evaluation settles the whole search.
inline FairSolution local_search_fair(const std::vector<TimedPoint>& pts,
                                      const FairnessSpec& spec, std::size_t k, int z,
                                      std::size_t max_iters, std::uint64_t seed,
                                      double relax_eps = 0.0,
                                      std::vector<double>* cost_trace = nullptr) {
    const FairnessSpec used = relax_eps > 0 ? spec.relaxed(relax_eps) : spec;
    used.validate();
    if (pts.empty()) throw std::invalid_argument("local search: empty input");
    if (k < 1) throw std::invalid_argument("local search: k must be positive");

    auto cand = detail::unique_locations(pts);
    Rng rng(seed);
    std::vector<GridPoint> centers = detail::seed_centers(pts, cand, std::min(k, cand.size()), z, rng);

    FairSolution sol;
    sol.relaxation = used;
    auto cur = fair_cost(pts, centers, used, z);
    if (cur.status == FairStatus::kInfeasible) {
        sol.centers = centers;
        return sol;  // no center set can satisfy the spec
    }
    if (cost_trace) cost_trace->push_back(cur.cost);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        double best_cost = cur.cost;
        std::size_t best_slot = centers.size(), best_cand = cand.size();
        FairCostResult best_eval;
        for (std::size_t slot = 0; slot < centers.size(); ++slot) {
            for (std::size_t c = 0; c < cand.size(); ++c) {
                bool present = false;
                for (const auto& ctr : centers)
                    if (ctr.coords == cand[c].coords) {
                        present = true;
                        break;
                    }
                if (present) continue;
                auto trial = centers;
                trial[slot] = cand[c];
                auto r = fair_cost(pts, trial, used, z);
                if (r.cost < best_cost) {
                    best_cost = r.cost;
                    best_slot = slot;
                    best_cand = c;
                    best_eval = std::move(r);
                }
            }
        }
        if (best_slot == centers.size()) break;
        if (cur.cost - best_cost < 1e-4 * cur.cost) break;
        centers[best_slot] = cand[best_cand];
        cur = std::move(best_eval);
        if (cost_trace) cost_trace->push_back(cur.cost);
    }

    sol.centers = centers;
    sol.plan = cur.plan;
    sol.cost = cur.cost;
    sol.feasible = true;
    sol.status = FairStatus::kOptimal;
    assert_solution_valid(pts, sol, z);
    return sol;
}

// Weighted k-median/means local search without fairness constraints.
// Assignment is nearest-center; used directly as a baseline solver and as
// the clustering step of the fairlet pipeline.
inline FairSolution kmedian_local_search(const std::vector<TimedPoint>& pts, std::size_t k,
                                         int z, std::size_t max_iters, std::uint64_t seed) {
    if (pts.empty()) throw std::invalid_argument("kmedian: empty input");
    if (k < 1) throw std::invalid_argument("kmedian: k must be positive");
    auto cand = detail::unique_locations(pts);
    Rng rng(seed);
    std::vector<GridPoint> centers = detail::seed_centers(pts, cand, std::min(k, cand.size()), z, rng);

    // distance cache: cand x pts
    std::vector<std::vector<double>> cd(cand.size(), std::vector<double>(pts.size()));
    for (std::size_t c = 0; c < cand.size(); ++c)
        for (std::size_t i = 0; i < pts.size(); ++i)
            cd[c][i] = dist_z(cand[c], pts[i].location, z);

    std::vector<std::size_t> center_cand(centers.size());
    for (std::size_t s = 0; s < centers.size(); ++s)
        for (std::size_t c = 0; c < cand.size(); ++c)
            if (cand[c].coords == centers[s].coords) {
                center_cand[s] = c;
                break;
            }

    auto total_cost = [&](const std::vector<std::size_t>& cc) {
        double t = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double b = cd[cc[0]][i];
            for (std::size_t s = 1; s < cc.size(); ++s) b = std::min(b, cd[cc[s]][i]);
            t += pts[i].weight * b;
        }
        return t;
    };

    double cur = total_cost(center_cand);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // best and second-best assignment under the current centers
        std::vector<double> d1(pts.size()), d2(pts.size());
        std::vector<std::size_t> a1(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d1[i] = d2[i] = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < center_cand.size(); ++s) {
                const double d = cd[center_cand[s]][i];
                if (d < d1[i]) {
                    d2[i] = d1[i];
                    d1[i] = d;
                    a1[i] = s;
                } else if (d < d2[i]) {
                    d2[i] = d;
                }
            }
        }
        double best_cost = cur;
        std::size_t best_slot = center_cand.size(), best_c = cand.size();
        for (std::size_t slot = 0; slot < center_cand.size(); ++slot) {
            for (std::size_t c = 0; c < cand.size(); ++c) {
                bool present = false;
                for (std::size_t s = 0; s < center_cand.size(); ++s)
                    if (center_cand[s] == c) {
                        present = true;
                        break;
                    }
                if (present) continue;
                double t = 0.0;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    const double keep = (a1[i] == slot) ? d2[i] : d1[i];
                    t += pts[i].weight * std::min(keep, cd[c][i]);
                }
                if (t < best_cost) {
                    best_cost = t;
                    best_slot = slot;
                    best_c = c;
                }
            }
        }
        if (best_slot == center_cand.size() || cur - best_cost < 1e-4 * cur) break;
        center_cand[best_slot] = best_c;
        cur = best_cost;
    }

    FairSolution sol;
    sol.centers.clear();
    for (std::size_t c : center_cand) sol.centers.push_back(cand[c]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double b = cd[center_cand[0]][i];
        std::size_t bs = 0;
        for (std::size_t s = 1; s < center_cand.size(); ++s)
            if (cd[center_cand[s]][i] < b) {
                b = cd[center_cand[s]][i];
                bs = s;
            }
        sol.plan.push_back({i, bs, pts[i].weight});
        sol.cost += pts[i].weight * b;
    }
    sol.feasible = true;
    sol.status = FairStatus::kOptimal;
    // an unconstrained solution vacuously satisfies the all-free spec
    sol.relaxation.alpha.assign(1, 0.0);
    sol.relaxation.beta.assign(1, 1.0);
    assert_solution_valid(pts, sol, z);
    return sol;
}

// Two-group fairlet pipeline.  Each point of the lighter group anchors a
// fairlet; the heavier group's mass is routed to anchors by min-cost
// transport so that every fairlet carries the two groups in the stream's
// global proportion.  Clustering the anchors then yields clusters whose
// group fractions all equal that proportion exactly, which is recorded as
// the relaxation actually satisfied; the requested spec only decides the
// feasible flag.
inline FairSolution fairlet_decompose(const std::vector<TimedPoint>& pts,
                                      const FairnessSpec& spec, std::size_t k, int z,
                                      std::uint64_t seed = 1) {
    spec.validate();
    if (spec.num_groups() != 2)
        throw std::invalid_argument("fairlet: exactly two groups required");
    if (pts.empty()) throw std::invalid_argument("fairlet: empty input");
    for (const auto& p : pts)
        if (p.groups != 1 && p.groups != 2)
            throw std::invalid_argument("fairlet: every point must be in exactly one group");

    const bool vacuous = spec.alpha[0] <= kFracTol && spec.alpha[1] <= kFracTol &&
                         spec.beta[0] >= 1.0 - kFracTol && spec.beta[1] >= 1.0 - kFracTol;

    const bool exact_balance = !vacuous &&
                               std::abs(spec.alpha[0] - spec.beta[0]) <= kFracTol &&
                               std::abs(spec.alpha[1] - spec.beta[1]) <= kFracTol;
    if (exact_balance) {
        // documented precondition: balance must be a small rational
        bool ok = false;
        for (int q = 1; q <= 10 && !ok; ++q)
            if (std::abs(spec.alpha[0] * q - std::round(spec.alpha[0] * q)) <= 1e-6) ok = true;
        if (!ok) throw std::invalid_argument("fairlet: balance must be p/q with q <= 10");
    }

    if (vacuous) {
        FairSolution sol = kmedian_local_search(pts, k, z, 200, seed);
        sol.relaxation = spec;
        assert_solution_valid(pts, sol, z);
        return sol;
    }

    double w1 = 0.0, w2 = 0.0;
    for (const auto& p : pts) (p.groups == 1 ? w1 : w2) += p.weight;
    const double total = w1 + w2;
    const double f1 = w1 / total, f2 = w2 / total;

    FairnessSpec achieved;
    achieved.alpha = {f1, f2};
    achieved.beta = {f1, f2};
    const bool fits = f1 >= spec.alpha[0] - kFracTol && f1 <= spec.beta[0] + kFracTol &&
                      f2 >= spec.alpha[1] - kFracTol && f2 <= spec.beta[1] + kFracTol;

    if (w1 <= 0.0 || w2 <= 0.0) {
        // single-group stream: clusters are pure, fractions are 0/1
        FairSolution sol = kmedian_local_search(pts, k, z, 200, seed);
        sol.relaxation = achieved;
        sol.feasible = fits;
        sol.status = fits ? FairStatus::kOptimal : FairStatus::kInfeasible;
        assert_solution_valid(pts, sol, z);
        return sol;
    }

    // anchors = lighter group
    const GroupMask amask = (w1 <= w2) ? 1u : 2u;
    const double ratio = (amask == 1 ? w2 / w1 : w1 / w2);
    std::vector<std::size_t> anchor_idx, other_idx;
    for (std::size_t i = 0; i < pts.size(); ++i)
        (pts[i].groups == amask ? anchor_idx : other_idx).push_back(i);

    std::vector<TimedPoint> suppliers;
    for (std::size_t j : other_idx) suppliers.push_back(pts[j]);
    std::vector<GridPoint> anchors;
    for (std::size_t i : anchor_idx) anchors.push_back(pts[i].location);

    AssignmentConstraint demands(anchors.size());
    double dsum = 0.0;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        demands[a] = pts[anchor_idx[a]].weight * ratio;
        dsum += demands[a];
    }
    double ssum = 0.0;
    for (const auto& s : suppliers) ssum += s.weight;
    demands.back() += ssum - dsum;  // absorb rounding dust exactly

    TransportInstance ti(suppliers, anchors, z);
    const auto routed = ti.solve(demands);

    // cluster the anchors, each carrying its whole fairlet's mass
    std::vector<TimedPoint> anchor_pts;
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        TimedPoint t = pts[anchor_idx[a]];
        t.weight = t.weight * (1.0 + ratio);
        anchor_pts.push_back(std::move(t));
    }
    FairSolution inner = kmedian_local_search(anchor_pts, k, z, 200, seed);

    std::vector<std::size_t> anchor_center(anchors.size());
    for (const auto& f : inner.plan) anchor_center[f.point] = f.center;

    FairSolution sol;
    sol.centers = inner.centers;
    sol.relaxation = achieved;
    sol.feasible = fits;
    sol.status = fits ? FairStatus::kOptimal : FairStatus::kInfeasible;
    for (std::size_t a = 0; a < anchors.size(); ++a)
        sol.plan.push_back({anchor_idx[a], anchor_center[a], pts[anchor_idx[a]].weight});
    for (const auto& f : routed.plan)
        sol.plan.push_back({other_idx[f.point], anchor_center[f.center], f.amount});
    sol.cost = detail::plan_cost(pts, sol.centers, sol.plan, z);
    assert_solution_valid(pts, sol, z);
    return sol;
}

// JSON form consumed by the harness and the CLI.
inline nlohmann::json to_json(const FairSolution& sol) {
    nlohmann::json j;
    j["centers"] = nlohmann::json::array();
    for (const auto& c : sol.centers) j["centers"].push_back(c.coords);
    j["plan"] = nlohmann::json::array();
    for (const auto& f : sol.plan)
        j["plan"].push_back({{"point", f.point}, {"center", f.center}, {"mass", f.amount}});
    j["cost"] = sol.cost;
    j["feasible"] = sol.feasible;
    j["status"] = sol.status == FairStatus::kOptimal ? "optimal" : "infeasible";
    j["relaxation"] = {{"alpha", sol.relaxation.alpha}, {"beta", sol.relaxation.beta}};
    return j;
}

inline FairSolution solution_from_json(const nlohmann::json& j) {
    FairSolution sol;
    for (const auto& c : j.at("centers"))
        sol.centers.push_back(GridPoint(c.get<std::vector<std::int64_t>>()));
    for (const auto& f : j.at("plan"))
        sol.plan.push_back({f.at("point").get<std::size_t>(), f.at("center").get<std::size_t>(),
                            f.at("mass").get<double>()});
    sol.cost = j.at("cost").get<double>();
    sol.feasible = j.at("feasible").get<bool>();
    sol.status = j.at("status").get<std::string>() == "optimal" ? FairStatus::kOptimal
                                                                : FairStatus::kInfeasible;
    sol.relaxation.alpha = j.at("relaxation").at("alpha").get<std::vector<double>>();
    sol.relaxation.beta = j.at("relaxation").at("beta").get<std::vector<double>>();
    return sol;
}

} // namespace fairwin
