#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fairwin/geometry.hpp"
#include "fairwin/points.hpp"
#include "fairwin/prng.hpp"

namespace fairwin {

// Stream id tags for the keyed PRF.  The facility-opening coin and the ring
// samplers draw from disjoint key spaces.
inline constexpr std::uint64_t kMeyersonStream = std::uint64_t{1} << 63;

inline std::uint64_t ring_stream_id(std::size_t center, int ring) {
    // ring -1 (inner) is never sampled; shift keeps ids clear of the tag bit
    return (static_cast<std::uint64_t>(center) << 12) |
           static_cast<std::uint64_t>(ring + 1);
}

// Online facility location in the guess-and-double regime.  Every point is
// permanently assigned on arrival: either to itself (it opens a center) or
// to its nearest existing center.  The opening coin for point p is
//     min(1, w(p) * dist(p, centers)^z * budget / guess),
// with a fresh phase (guess doubled, phase budget reset) started whenever
// the current phase is full.  Assignments are never revisited, so the
// logged cost only overestimates the cost against the final center set.
class MeyersonSketch {
public:
    struct Assignment {
        std::size_t center = 0;
        bool opened = false;
        double cost = 0.0;  // w * dist^z to the assigned center at arrival
    };

    MeyersonSketch(const ClusteringParams& params, std::uint64_t seed)
        : params_(params), seed_(seed) {
        if (params.k < 1) throw std::invalid_argument("meyerson: k must be positive");
        if (params.delta < 2) throw std::invalid_argument("meyerson: delta must be >= 2");
        budget_ = static_cast<std::size_t>(
            std::ceil(8.0 * params.k * (1.0 + std::log2(static_cast<double>(params.delta)))));
    }

    Assignment insert(const TimedPoint& p) {
        Assignment out;
        if (centers_.empty()) {
            guess_ = p.weight;  // first nonzero cost scale
            out = open(p, 0.0);
        } else {
            const std::size_t nc = nearest_center(p.location, centers_);
            const double dz = dist_z(p.location, centers_[nc], params_.z);
            const double prob =
                std::min(1.0, p.weight * dz * static_cast<double>(budget_) / guess_);
            const double u = keyed_unit(seed_, static_cast<std::uint64_t>(p.timestamp),
                                        kMeyersonStream);
            if (u < prob) {
                out = open(p, dz);
            } else {
                out.center = nc;
                out.opened = false;
                out.cost = p.weight * dz;
            }
        }
        logged_cost_ += out.cost;
        log_.push_back({out.center, out.cost});
        return out;
    }

    const std::vector<GridPoint>& centers() const { return centers_; }
    std::size_t budget() const { return budget_; }
    // completed phases + the running one
    std::size_t phases() const { return doublings_ + 1; }
    double guess() const { return guess_; }
    double logged_cost() const { return logged_cost_; }
    const std::vector<std::pair<std::size_t, double>>& assignment_log() const { return log_; }

private:
    Assignment open(const TimedPoint& p, double /*dz*/) {
        if (phase_centers_ == budget_) {
            guess_ *= 2.0;
            phase_centers_ = 0;
            ++doublings_;
        }
        centers_.push_back(p.location);
        ++phase_centers_;
        return {centers_.size() - 1, true, 0.0};
    }

    ClusteringParams params_;
    std::uint64_t seed_;
    std::size_t budget_ = 0;
    double guess_ = 1.0;
    std::size_t phase_centers_ = 0;
    std::size_t doublings_ = 0;
    double logged_cost_ = 0.0;
    std::vector<GridPoint> centers_;
    std::vector<std::pair<std::size_t, double>> log_;
};

} // namespace fairwin
