#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fairwin/coreset.hpp"
#include "fairwin/coreset_io.hpp"
#include "fairwin/points.hpp"
#include "fairwin/prng.hpp"

namespace fairwin {

struct WindowParams {
    ClusteringParams base;   // epsilon here is the end-to-end accuracy target
    std::size_t window = 0;  // m
    double rate = 0.0;       // per-reduction sampling rate; 0 derives it from base
    std::uint64_t seed = 0;
};

// Dyadic merge-and-reduce hierarchy over one sub-stream.  The i-th arrival
// (globally counted) is stored at internal timestamp -i, so feeding each
// reduction in ascending timestamp order runs the online coreset newest
// point first.  The active window [-t, -t+m) is then a prefix of every
// block's run, which is exactly the slice the online property protects.
//
// Level j, when occupied, covers 2^j consecutive arrivals of this
// sub-stream; occupancy follows binary-counter dynamics until the hierarchy
// overflows, after which new carries merge into the top block together with
// its old content (dropping it would lose window coverage).
class WindowSketch {
public:
    WindowSketch(const WindowParams& params, std::uint64_t stream_seed)
        : params_(params), stream_seed_(stream_seed) {
        if (params.window < 1) throw std::invalid_argument("window sketch: window must be >= 1");
        const std::size_t m = params.window;
        ell_ = (m <= 1) ? 0 : static_cast<std::size_t>(std::bit_width(m - 1));
        blocks_.assign(ell_ + 1, std::nullopt);
    }

    // p.timestamp must already be the internal (negated arrival index) time.
    void insert_reversed(const TimedPoint& p) {
        ++count_;
        std::size_t j = 0;
        while (j <= ell_ && blocks_[j].has_value()) ++j;
        const bool forced = j > ell_;
        if (forced) j = ell_;

        std::vector<TimedPoint> merged;
        merged.push_back(p);
        for (std::size_t i = 0; i < j; ++i) {
            auto& b = blocks_[i];
            merged.insert(merged.end(), b->begin(), b->end());
            b.reset();
        }
        if (forced) {
            merged.insert(merged.end(), blocks_[ell_]->begin(), blocks_[ell_]->end());
            blocks_[ell_].reset();
        }
        std::sort(merged.begin(), merged.end(),
                  [](const TimedPoint& a, const TimedPoint& b) { return a.timestamp < b.timestamp; });

        CoresetParams cp;
        cp.base = level_base();
        cp.rate = reduction_rate();
        cp.seed = detail::mix64(stream_seed_ * 0x9e3779b97f4a7c15ull + (++reductions_));
        OnlineCoreset oc(cp);
        for (const auto& q : merged) oc.insert(q);
        blocks_[j] = oc.extract();
    }

    // Convenience for standalone use: assigns internal time by its own count.
    void insert(TimedPoint p) {
        p.timestamp = -static_cast<std::int64_t>(count_ + 1);
        insert_reversed(p);
    }

    // Window coreset relative to a global arrival count.
    std::vector<TimedPoint> extract(std::int64_t now) const {
        const std::int64_t lo = -now;
        const std::int64_t hi = -now + static_cast<std::int64_t>(params_.window);
        std::vector<TimedPoint> out;
        for (const auto& b : blocks_) {
            if (!b) continue;
            for (const auto& p : *b)
                if (p.timestamp >= lo && p.timestamp < hi) out.push_back(p);
        }
        std::sort(out.begin(), out.end(),
                  [](const TimedPoint& a, const TimedPoint& b) { return a.timestamp < b.timestamp; });
        return out;
    }

    std::vector<TimedPoint> extract() const { return extract(static_cast<std::int64_t>(count_)); }

    std::size_t levels() const { return ell_ + 1; }
    std::size_t count() const { return count_; }
    std::uint64_t reductions() const { return reductions_; }

    std::vector<bool> occupancy() const {
        std::vector<bool> occ(ell_ + 1);
        for (std::size_t i = 0; i <= ell_; ++i) occ[i] = blocks_[i].has_value();
        return occ;
    }

    std::vector<std::size_t> level_sizes() const {
        std::vector<std::size_t> s(ell_ + 1, 0);
        for (std::size_t i = 0; i <= ell_; ++i)
            if (blocks_[i]) s[i] = blocks_[i]->size();
        return s;
    }

    std::size_t retained() const {
        std::size_t n = 0;
        for (const auto& b : blocks_)
            if (b) n += b->size();
        return n;
    }

    double reduction_rate() const {
        if (params_.rate > 0) return std::max(params_.rate, 1.0);
        return derived_rate(level_base(), 2.0 * static_cast<double>(params_.window));
    }

    // Accuracy and failure budget per reduction; the distortions compound to
    // (1 + eps/(2 log m))^(levels) <= 1 + eps across the hierarchy.
    ClusteringParams level_base() const {
        ClusteringParams b = params_.base;
        const double m = static_cast<double>(std::max<std::size_t>(params_.window, 2));
        b.epsilon = params_.base.epsilon / (2.0 * std::log2(m));
        b.failure_prob = params_.base.failure_prob / (4.0 * m * m);
        return b;
    }

    // serialization hooks
    const std::vector<std::optional<std::vector<TimedPoint>>>& blocks() const { return blocks_; }
    void restore(std::size_t count, std::uint64_t reductions,
                 std::vector<std::optional<std::vector<TimedPoint>>> blocks) {
        if (blocks.size() != ell_ + 1)
            throw std::runtime_error("window sketch: level count mismatch on restore");
        count_ = count;
        reductions_ = reductions;
        blocks_ = std::move(blocks);
    }

private:
    WindowParams params_;
    std::uint64_t stream_seed_;
    std::size_t ell_ = 0;
    std::size_t count_ = 0;
    std::uint64_t reductions_ = 0;
    std::vector<std::optional<std::vector<TimedPoint>>> blocks_;
};

struct HierarchyStats {
    GroupMask mask = 0;
    std::size_t processed = 0;
    std::size_t retained = 0;
    std::vector<std::size_t> level_points;
};

// Group-aware window sketch: one independent hierarchy per distinct group
// mask, all sharing the global arrival counter so the window filter lines
// up across hierarchies.  Extraction is the union of the per-mask extracts.
class FairWindowSketch {
public:
    explicit FairWindowSketch(const WindowParams& params) : params_(params) {
        if (params.window < 1)
            throw std::invalid_argument("fair window sketch: window must be >= 1");
    }

    void insert(TimedPoint p) {
        p.timestamp = -(++t_);
        hierarchy(p.groups).insert_reversed(p);
    }

    std::vector<TimedPoint> extract() const {
        std::vector<TimedPoint> out;
        for (const auto& [mask, sk] : hier_) {
            auto part = sk.extract(t_);
            out.insert(out.end(), part.begin(), part.end());
        }
        std::sort(out.begin(), out.end(),
                  [](const TimedPoint& a, const TimedPoint& b) { return a.timestamp < b.timestamp; });
        return out;
    }

    std::vector<TimedPoint> extract_mask(GroupMask mask) const {
        auto it = hier_.find(mask);
        if (it == hier_.end()) return {};
        return it->second.extract(t_);
    }

    std::int64_t processed() const { return t_; }
    std::size_t hierarchy_count() const { return hier_.size(); }
    const std::map<GroupMask, WindowSketch>& hierarchies() const { return hier_; }
    const WindowParams& params() const { return params_; }

    std::size_t retained() const {
        std::size_t n = 0;
        for (const auto& [mask, sk] : hier_) n += sk.retained();
        return n;
    }

    std::vector<HierarchyStats> stats() const {
        std::vector<HierarchyStats> out;
        for (const auto& [mask, sk] : hier_)
            out.push_back({mask, sk.count(), sk.retained(), sk.level_sizes()});
        return out;
    }

    // checkpoint hooks
    void restore_counter(std::int64_t t) { t_ = t; }
    WindowSketch& hierarchy(GroupMask mask) {
        auto it = hier_.find(mask);
        if (it == hier_.end())
            it = hier_.emplace(mask, WindowSketch(params_, detail::mix64(params_.seed ^ mask)))
                     .first;
        return it->second;
    }

private:
    WindowParams params_;
    std::int64_t t_ = 0;
    std::map<GroupMask, WindowSketch> hier_;
};

// Checkpoint container, little-endian:
//   "FWWS" | u16 version | params | global count | hierarchies with blocks
inline constexpr std::uint16_t kWindowFormatVersion = 1;

inline void save_sketch(std::ostream& os, const FairWindowSketch& sk) {
    using detail::put_le;
    const WindowParams& wp = sk.params();
    os.write("FWWS", 4);
    put_le<std::uint16_t>(os, kWindowFormatVersion);
    put_le<std::uint64_t>(os, wp.window);
    put_le<double>(os, wp.rate);
    put_le<std::uint64_t>(os, wp.seed);
    put_le<std::int32_t>(os, wp.base.k);
    put_le<std::int32_t>(os, wp.base.z);
    put_le<std::int64_t>(os, wp.base.delta);
    put_le<std::int32_t>(os, wp.base.dim);
    put_le<double>(os, wp.base.epsilon);
    put_le<double>(os, wp.base.failure_prob);
    put_le<std::int64_t>(os, sk.processed());
    put_le<std::uint64_t>(os, sk.hierarchies().size());
    for (const auto& [mask, h] : sk.hierarchies()) {
        put_le<std::uint64_t>(os, mask);
        put_le<std::uint64_t>(os, h.count());
        put_le<std::uint64_t>(os, h.reductions());
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(h.blocks().size()));
        for (const auto& b : h.blocks()) {
            put_le<std::uint8_t>(os, b.has_value() ? 1 : 0);
            if (!b) continue;
            put_le<std::uint64_t>(os, b->size());
            for (const auto& p : *b) {
                put_le<std::int64_t>(os, p.timestamp);
                for (std::int64_t c : p.location.coords) put_le<std::int64_t>(os, c);
                put_le<double>(os, p.weight);
                put_le<std::uint64_t>(os, p.groups);
            }
        }
    }
    if (!os) throw std::runtime_error("window io: write failed");
}

inline FairWindowSketch load_sketch(std::istream& is) {
    using detail::get_le;
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "FWWS", 4) != 0)
        throw std::runtime_error("window io: bad magic");
    const auto version = get_le<std::uint16_t>(is);
    if (version != kWindowFormatVersion)
        throw std::runtime_error("window io: unsupported version");
    WindowParams wp;
    wp.window = get_le<std::uint64_t>(is);
    wp.rate = get_le<double>(is);
    wp.seed = get_le<std::uint64_t>(is);
    wp.base.k = get_le<std::int32_t>(is);
    wp.base.z = get_le<std::int32_t>(is);
    wp.base.delta = get_le<std::int64_t>(is);
    wp.base.dim = get_le<std::int32_t>(is);
    wp.base.epsilon = get_le<double>(is);
    wp.base.failure_prob = get_le<double>(is);
    FairWindowSketch sk(wp);
    const auto t = get_le<std::int64_t>(is);
    const auto nh = get_le<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < nh; ++i) {
        const auto mask = get_le<std::uint64_t>(is);
        const auto count = get_le<std::uint64_t>(is);
        const auto reductions = get_le<std::uint64_t>(is);
        const auto nlevels = get_le<std::uint16_t>(is);
        std::vector<std::optional<std::vector<TimedPoint>>> blocks(nlevels);
        for (std::uint16_t lv = 0; lv < nlevels; ++lv) {
            if (get_le<std::uint8_t>(is) == 0) continue;
            const auto npts = get_le<std::uint64_t>(is);
            std::vector<TimedPoint> pts;
            pts.reserve(npts);
            for (std::uint64_t q = 0; q < npts; ++q) {
                TimedPoint p;
                p.timestamp = get_le<std::int64_t>(is);
                p.location.coords.resize(wp.base.dim);
                for (int c = 0; c < wp.base.dim; ++c)
                    p.location.coords[c] = get_le<std::int64_t>(is);
                p.weight = get_le<double>(is);
                p.groups = get_le<std::uint64_t>(is);
                pts.push_back(std::move(p));
            }
            blocks[lv] = std::move(pts);
        }
        sk.hierarchy(mask).restore(count, reductions, std::move(blocks));
    }
    sk.restore_counter(t);
    return sk;
}

} // namespace fairwin
