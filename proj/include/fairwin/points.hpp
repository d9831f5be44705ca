#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fairwin/geometry.hpp"

namespace fairwin {

// Bit g set means membership in group g.  A point may carry several groups
// (overlapping sensitive attributes) or none.
using GroupMask = std::uint64_t;

struct TimedPoint {
    GridPoint location;
    std::int64_t timestamp = 0;  // unique identity within a set
    double weight = 1.0;
    GroupMask groups = 0;
};

// A weighted multiset of timed points.  Identity is the timestamp: inserting
// a duplicate timestamp is a contract violation, removal is by timestamp.
// Total weight is maintained incrementally and periodically recomputed to
// keep float drift below the 1e-9 comparison band used by callers.
class WeightedPointSet {
public:
    WeightedPointSet() = default;

    explicit WeightedPointSet(std::vector<TimedPoint> pts) {
        for (auto& p : pts) insert(std::move(p));
    }

    void insert(TimedPoint p) {
        if (p.weight <= 0.0)
            throw std::invalid_argument("WeightedPointSet: weight must be positive");
        auto [it, fresh] = index_.emplace(p.timestamp, points_.size());
        (void)it;
        if (!fresh)
            throw std::invalid_argument("WeightedPointSet: duplicate timestamp");
        total_weight_ += p.weight;
        points_.push_back(std::move(p));
        if (++mutations_since_resum_ >= kResumEvery) resum();
    }

    // Removes the point with this timestamp; false if absent.
    bool remove(std::int64_t timestamp) {
        auto it = index_.find(timestamp);
        if (it == index_.end()) return false;
        const std::size_t pos = it->second;
        total_weight_ -= points_[pos].weight;
        index_.erase(it);
        if (pos + 1 != points_.size()) {
            points_[pos] = std::move(points_.back());
            index_[points_[pos].timestamp] = pos;
        }
        points_.pop_back();
        if (++mutations_since_resum_ >= kResumEvery) resum();
        return true;
    }

    const TimedPoint* find(std::int64_t timestamp) const {
        auto it = index_.find(timestamp);
        return it == index_.end() ? nullptr : &points_[it->second];
    }

    bool contains(std::int64_t timestamp) const { return index_.count(timestamp) != 0; }

    const std::vector<TimedPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    double total_weight() const { return total_weight_; }

    double group_weight(int group_bit) const {
        double w = 0.0;
        for (const auto& p : points_)
            if (p.groups >> group_bit & 1) w += p.weight;
        return w;
    }

    // Timestamp-keyed union; duplicate timestamps are a contract violation.
    static WeightedPointSet set_union(const WeightedPointSet& a, const WeightedPointSet& b) {
        WeightedPointSet out;
        for (const auto& p : a.points_) out.insert(p);
        for (const auto& p : b.points_) out.insert(p);
        return out;
    }

    // Points of a whose timestamp also occurs in b (a's payloads kept).
    static WeightedPointSet set_intersection(const WeightedPointSet& a, const WeightedPointSet& b) {
        WeightedPointSet out;
        for (const auto& p : a.points_)
            if (b.contains(p.timestamp)) out.insert(p);
        return out;
    }

private:
    static constexpr std::size_t kResumEvery = 1 << 14;

    void resum() {
        double s = 0.0;
        for (const auto& p : points_) s += p.weight;
        total_weight_ = s;
        mutations_since_resum_ = 0;
    }

    std::vector<TimedPoint> points_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    double total_weight_ = 0.0;
    std::size_t mutations_since_resum_ = 0;
};

// One merged point per (location, group mask), weights summed.  Solvers run
// on the merged instance; expand_plan-style callers split results back by
// weight share, which is cost-exact because merged points are co-located.
struct DedupEntry {
    TimedPoint rep;                      // timestamp of the first member
    std::vector<std::size_t> members;    // indices into the source vector
};

inline std::vector<DedupEntry> dedup_by_location(const std::vector<TimedPoint>& pts) {
    std::map<std::pair<std::vector<std::int64_t>, GroupMask>, std::size_t> seen;
    std::vector<DedupEntry> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto key = std::make_pair(pts[i].location.coords, pts[i].groups);
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(std::move(key), out.size());
            out.push_back({pts[i], {i}});
        } else {
            out[it->second].rep.weight += pts[i].weight;
            out[it->second].members.push_back(i);
        }
    }
    return out;
}

} // namespace fairwin
