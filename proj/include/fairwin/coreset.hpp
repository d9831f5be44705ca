#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "fairwin/geometry.hpp"
#include "fairwin/meyerson.hpp"
#include "fairwin/points.hpp"
#include "fairwin/prng.hpp"

namespace fairwin {

// One retained coreset point together with where it came from.  prob is the
// coin it survived (1 for points stored verbatim); the effective weight of
// the record is point.weight / prob.
struct CoresetRecord {
    TimedPoint point;
    double prob = 1.0;
    std::size_t ring_center = 0;
    int ring = kInnerRing;

    double effective_weight() const { return point.weight / prob; }
};

// Reservoir-free streaming sampler for one ring.  With running mass
// sum_i = w_1 + ... + w_i, point i is kept with probability
//     p_i = min(rate * w_i / sum_i, 1)
// and stored at weight w_i / p_i, so every prefix is an unbiased estimate
// of the ring's mass.  Kept points are never evicted.
class RingSampler {
public:
    RingSampler(double rate, std::uint64_t seed, std::uint64_t stream_id)
        : rate_(rate), seed_(seed), stream_(stream_id) {
        if (!(rate >= 1.0)) throw std::invalid_argument("ring sampler: rate must be >= 1");
    }

    bool insert(const TimedPoint& p) {
        mass_ += p.weight;
        min_weight_ = std::min(min_weight_, p.weight);
        ++offered_;
        const double prob = std::min(rate_ * p.weight / mass_, 1.0);
        prob_sum_ += prob;
        const double u =
            keyed_unit(seed_, static_cast<std::uint64_t>(p.timestamp), stream_);
        if (u < prob) {
            kept_.push_back({p, prob});
            return true;
        }
        return false;
    }

    struct Kept {
        TimedPoint point;
        double prob;
    };

    const std::vector<Kept>& kept() const { return kept_; }
    double mass() const { return mass_; }
    double prob_sum() const { return prob_sum_; }
    std::size_t offered() const { return offered_; }

    // Expected retained count never exceeds rate * ln(mass/min weight) + 1.
    double expected_size_bound() const {
        if (offered_ == 0) return 0.0;
        const double ratio = std::max(mass_ / min_weight_, 1.0);
        return rate_ * std::log(ratio) + 1.0;
    }

private:
    double rate_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    double mass_ = 0.0;
    double min_weight_ = std::numeric_limits<double>::infinity();
    double prob_sum_ = 0.0;
    std::size_t offered_ = 0;
    std::vector<Kept> kept_;
};

// Sampling rate matching the accuracy analysis: eps is first discounted for
// the bi-criteria assignment (2^z) and its approximation factor (2^(2z+4)),
// the failure budget is split over centers and rings, and a union bound over
// center profiles adds k*d*log(k/eps') to the log term.  Computed in log
// space; the net-of-constants count the caller multiplies by is per ring.
inline double derived_rate(const ClusteringParams& params, double n_estimate,
                           double center_estimate = 0.0) {
    if (n_estimate < 2) n_estimate = 2;
    const double alpha_bound = std::pow(2.0, 2.0 * params.z + 4.0);
    const double eps_p =
        params.epsilon / (std::pow(2.0, static_cast<double>(params.z)) * alpha_bound);
    double ell = center_estimate;
    if (ell <= 0)
        ell = 8.0 * params.k * (1.0 + std::log2(static_cast<double>(params.delta)));
    const double rings =
        static_cast<double>(max_ring_index(params.delta, params.dim)) + 2.0;
    const double kd = static_cast<double>(params.k) * static_cast<double>(params.dim);
    double log_term = std::log(n_estimate * static_cast<double>(params.delta) / eps_p);
    log_term += kd * std::log(static_cast<double>(params.k) / eps_p);
    log_term += std::log(ell * rings / params.failure_prob);
    return std::max(1.0, kd / (eps_p * eps_p) * log_term);
}

struct CoresetParams {
    ClusteringParams base;
    double rate = 0.0;  // sampling rate per ring; must be set by the caller
    std::uint64_t seed = 0;
};

// Streaming coreset for one insertion-only stream.  Arriving points are fed
// to the facility sketch; a point landing at distance zero from its center
// (including the openers themselves) is stored verbatim, everything else
// goes to the sampler of its (center, ring) pair.  Because every decision is
// a pure function of (seed, timestamp) and state only grows, the extract of
// a prefix equals the extract after the full stream filtered to that prefix.
class OnlineCoreset {
public:
    explicit OnlineCoreset(const CoresetParams& params)
        : params_(params),
          sketch_(params.base, detail::mix64(params.seed ^ 0x9e3779b97f4a7c15ull)) {
        if (!(params.rate >= 1.0))
            throw std::invalid_argument("online coreset: rate must be >= 1");
    }

    void insert(const TimedPoint& p) {
        if (p.location.coords.size() != static_cast<std::size_t>(params_.base.dim))
            throw std::invalid_argument("online coreset: dimension mismatch");
        const auto a = sketch_.insert(p);
        ++inserted_;
        if (a.opened) {
            inner_.push_back({p, 1.0, a.center, kInnerRing});
            return;
        }
        const int j = ring_index(p.location, sketch_.centers()[a.center]);
        if (j == kInnerRing) {
            inner_.push_back({p, 1.0, a.center, kInnerRing});
            return;
        }
        const auto key = std::make_pair(a.center, j);
        auto it = rings_.find(key);
        if (it == rings_.end()) {
            it = rings_
                     .emplace(key, RingSampler(params_.rate, params_.seed,
                                               ring_stream_id(a.center, j)))
                     .first;
        }
        it->second.insert(p);
    }

    // Retained records with provenance, ordered by timestamp.
    std::vector<CoresetRecord> extract_records() const {
        std::vector<CoresetRecord> out = inner_;
        for (const auto& [key, sampler] : rings_) {
            for (const auto& kd : sampler.kept())
                out.push_back({kd.point, kd.prob, key.first, key.second});
        }
        std::sort(out.begin(), out.end(), [](const CoresetRecord& a, const CoresetRecord& b) {
            return a.point.timestamp < b.point.timestamp;
        });
        return out;
    }

    // Coreset proper: records collapsed to reweighted points.
    std::vector<TimedPoint> extract() const {
        std::vector<TimedPoint> out;
        for (auto& rec : extract_records()) {
            TimedPoint p = rec.point;
            p.weight = rec.effective_weight();
            out.push_back(std::move(p));
        }
        return out;
    }

    const MeyersonSketch& sketch() const { return sketch_; }
    std::size_t inserted() const { return inserted_; }
    std::size_t inner_size() const { return inner_.size(); }

    std::size_t size() const {
        std::size_t n = inner_.size();
        for (const auto& [key, sampler] : rings_) n += sampler.kept().size();
        return n;
    }

    double prob_sum() const {
        double s = 0.0;
        for (const auto& [key, sampler] : rings_) s += sampler.prob_sum();
        return s;
    }

    const std::map<std::pair<std::size_t, int>, RingSampler>& rings() const { return rings_; }

private:
    CoresetParams params_;
    MeyersonSketch sketch_;
    std::vector<CoresetRecord> inner_;
    std::map<std::pair<std::size_t, int>, RingSampler> rings_;
    std::size_t inserted_ = 0;
};

} // namespace fairwin
