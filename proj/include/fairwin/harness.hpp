#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairwin/coreset.hpp"
#include "fairwin/fairness.hpp"
#include "fairwin/points.hpp"
#include "fairwin/prng.hpp"
#include "fairwin/solver.hpp"
#include "fairwin/window.hpp"

namespace fairwin {

// One replay: where the stream comes from, the sketch dimensions, and how
// the benchmark evaluates it.  Field names double as config-file keys.
struct StreamConfig {
    std::string input;      // CSV path; empty when a generator is used
    std::string generator;  // mixture | drift | augindex
    std::size_t n = 1000;   // generated stream length
    std::size_t window = 100;
    int k = 2;
    int z = 1;
    std::int64_t grid = 1 << 16;
    std::size_t dim = 2;
    std::size_t modes = 4;
    double epsilon = 0.5;
    double failure_prob = 0.01;
    std::uint64_t seed = 1;
    double target_size = 0.0;  // > 0 pins the sampling rate instead of deriving it
    FairnessSpec fairness;
    std::string method = "all";  // ours|benchmark|uniform|unconstrained|all
    std::size_t stride = 0;      // checkpoint cadence; 0 means window/10
    bool deterministic_timing = false;  // zero the timing columns for replays
    std::vector<std::string> features;  // CSV feature columns; empty = all non-group
    std::vector<std::string> group_cols = {"group"};
    // hard-instance generator knobs
    std::size_t aug_n = 8;
    std::size_t aug_i = 1;
    std::string aug_bits;  // 2*aug_n chars of 0/1; empty = alternating

    StreamConfig() {
        fairness.alpha = {0.2, 0.2};
        fairness.beta = {0.8, 0.8};
    }

    std::size_t effective_stride() const {
        if (stride > 0) return stride;
        return std::max<std::size_t>(1, window / 10);
    }

    void validate() const {
        if (window < 1) throw std::invalid_argument("config: window must be >= 1");
        if (k < 1) throw std::invalid_argument("config: k must be >= 1");
        if (z != 1 && z != 2) throw std::invalid_argument("config: z must be 1 or 2");
        if (grid < 2) throw std::invalid_argument("config: grid must be >= 2");
        if (input.empty() == generator.empty())
            throw std::invalid_argument("config: need exactly one of input and generator");
        if (!generator.empty() && generator != "mixture" && generator != "drift" &&
            generator != "augindex")
            throw std::invalid_argument("config: unknown generator " + generator);
        if (method != "ours" && method != "benchmark" && method != "uniform" &&
            method != "unconstrained" && method != "all")
            throw std::invalid_argument("config: unknown method " + method);
        fairness.validate();
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty() || !s.empty()) out.push_back(cur);
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

struct IngestResult {
    std::vector<TimedPoint> points;
    std::size_t skipped = 0;     // malformed rows dropped
    std::size_t num_groups = 0;  // bitmask width actually used
};

// Feature columns are min-max scaled onto the grid [0, grid); each group
// column's distinct values (sorted) claim consecutive mask bits.  Rows with
// unparsable features or empty group cells are counted and skipped.
inline IngestResult ingest_csv(std::istream& in, const std::vector<std::string>& features,
                               const std::vector<std::string>& group_cols, std::int64_t grid) {
    if (grid < 2) throw std::invalid_argument("ingest: grid must be >= 2");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest: empty input");
    const auto header = detail::split_csv_line(line);
    auto col_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("ingest: missing column " + name);
    };

    std::vector<std::string> feat = features;
    if (feat.empty()) {
        for (const auto& h : header)
            if (std::find(group_cols.begin(), group_cols.end(), h) == group_cols.end())
                feat.push_back(h);
    }
    if (feat.empty()) throw std::runtime_error("ingest: no feature columns");
    std::vector<std::size_t> fidx, gidx;
    for (const auto& f : feat) fidx.push_back(col_of(f));
    for (const auto& g : group_cols) gidx.push_back(col_of(g));

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::string>> row_groups;
    IngestResult res;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            ++res.skipped;
            continue;
        }
        std::vector<double> vals(fidx.size());
        bool ok = true;
        for (std::size_t j = 0; j < fidx.size(); ++j)
            if (!detail::parse_double(cells[fidx[j]], vals[j])) {
                ok = false;
                break;
            }
        std::vector<std::string> groups(gidx.size());
        for (std::size_t j = 0; j < gidx.size() && ok; ++j) {
            groups[j] = cells[gidx[j]];
            if (groups[j].empty()) ok = false;
        }
        if (!ok) {
            ++res.skipped;
            continue;
        }
        rows.push_back(std::move(vals));
        row_groups.push_back(std::move(groups));
    }
    if (rows.empty()) throw std::runtime_error("ingest: no usable rows");

    // per-column value -> bit assignment, bits allocated column by column
    std::vector<std::map<std::string, std::size_t>> bit_of(gidx.size());
    std::size_t bits = 0;
    for (std::size_t j = 0; j < gidx.size(); ++j) {
        std::set<std::string> vals;
        for (const auto& rg : row_groups) vals.insert(rg[j]);
        for (const auto& v : vals) bit_of[j][v] = bits++;
    }
    if (bits > 16) throw std::runtime_error("ingest: too many distinct group values");
    res.num_groups = bits;

    std::vector<double> lo(fidx.size(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(fidx.size(), -std::numeric_limits<double>::infinity());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < r.size(); ++j) {
            lo[j] = std::min(lo[j], r[j]);
            hi[j] = std::max(hi[j], r[j]);
        }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        TimedPoint p;
        p.timestamp = static_cast<std::int64_t>(i + 1);
        p.weight = 1.0;
        p.location.coords.resize(fidx.size());
        for (std::size_t j = 0; j < fidx.size(); ++j) {
            const double range = std::max(hi[j] - lo[j], 1e-300);  // degenerate scale clamp
            const double scaled = (rows[i][j] - lo[j]) / range * static_cast<double>(grid - 1);
            p.location.coords[j] = static_cast<std::int64_t>(std::llround(scaled));
        }
        for (std::size_t j = 0; j < gidx.size(); ++j)
            p.groups |= GroupMask{1} << bit_of[j][row_groups[i][j]];
        res.points.push_back(std::move(p));
    }
    return res;
}

inline IngestResult ingest_csv_file(const std::string& path,
                                    const std::vector<std::string>& features,
                                    const std::vector<std::string>& group_cols,
                                    std::int64_t grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    return ingest_csv(in, features, group_cols, grid);
}

namespace detail {

inline double gaussian(Rng& rng) {
    // Box-Muller; the 1-u shift keeps the log argument in (0, 1]
    const double u = 1.0 - rng.next_unit();
    const double v = rng.next_unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

} // namespace detail

// Gaussian mixture with group-correlated modes: even modes lean towards
// group one, odd modes towards group two.  With drift enabled the second
// half of the stream flips the group bias and shifts every mode, so a
// recency-aware summary and a whole-stream summary disagree.
inline std::vector<TimedPoint> gen_mixture(std::size_t n, std::size_t dim, std::size_t modes,
                                           std::int64_t grid, std::uint64_t seed,
                                           bool drift = false) {
    if (n < 1 || dim < 1 || modes < 1) throw std::invalid_argument("mixture: bad shape");
    Rng rng(seed);
    std::vector<std::vector<double>> mu(modes, std::vector<double>(dim));
    for (auto& m : mu)
        for (auto& c : m)
            c = grid / 4.0 + rng.next_unit() * (grid / 2.0);
    const double sigma = grid / 32.0;

    std::vector<TimedPoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool late = drift && i >= n / 2;
        const std::size_t m = rng.next_index(modes);
        // without drift the biases average out to a balanced stream; with
        // drift the aggregate proportion itself swings from 0.7 to 0.3
        double lean = drift ? (m % 2 == 0 ? 0.85 : 0.55) : (m % 2 == 0 ? 0.8 : 0.2);
        if (late) lean = 1.0 - lean;
        TimedPoint p;
        p.timestamp = static_cast<std::int64_t>(i + 1);
        p.weight = 1.0;
        p.groups = rng.next_unit() < lean ? 1 : 2;
        p.location.coords.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            double c = mu[m][d] + sigma * detail::gaussian(rng);
            if (late) c += grid / 8.0;
            c = std::clamp(c, 0.0, static_cast<double>(grid - 1));
            p.location.coords[d] = static_cast<std::int64_t>(std::llround(c));
        }
        out.push_back(std::move(p));
    }
    return out;
}

// Adversarial two-location stream on the line.  The first player streams
// the bitstring as points at bit*delta; the second appends copies of the
// prefix, one guess point at the origin, and finally 2n counterweight
// points of the other group split between the two locations.  With window
// 4n the surviving window holds exactly 2n points of each group, and the
// exact fair cost against centers {0, delta} with a one-half floor on the
// second group is 0 or >= delta depending on the queried bit.
inline std::vector<TimedPoint> gen_augindex_instance(std::size_t n, std::size_t i,
                                                     const std::vector<int>& bits,
                                                     std::int64_t delta) {
    if (n < 1) throw std::invalid_argument("augindex: n must be >= 1");
    if (bits.size() != 2 * n) throw std::invalid_argument("augindex: need 2n bits");
    if (i < 1 || i > 2 * n) throw std::invalid_argument("augindex: index out of range");
    std::size_t ones = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("augindex: bits must be 0/1");
        ones += static_cast<std::size_t>(b);
    }
    if (ones != n) throw std::invalid_argument("augindex: bitstring must have weight n");
    if (delta < 1) throw std::invalid_argument("augindex: delta must be positive");

    std::vector<TimedPoint> out;
    std::int64_t ts = 0;
    auto push = [&](std::int64_t x, GroupMask g) {
        TimedPoint p;
        p.location = {x};
        p.timestamp = ++ts;
        p.weight = 1.0;
        p.groups = g;
        out.push_back(std::move(p));
    };
    for (std::size_t j = 0; j < 2 * n; ++j) push(bits[j] * delta, 1);
    for (std::size_t j = 0; j + 1 < i; ++j) push(bits[j] * delta, 1);
    push(0, 1);  // the guess for position i
    for (std::size_t j = 0; j < n; ++j) push(0, 2);
    for (std::size_t j = 0; j < n; ++j) push(delta, 2);
    return out;
}

inline std::vector<TimedPoint> make_stream(const StreamConfig& cfg) {
    cfg.validate();
    if (!cfg.input.empty()) {
        auto res = ingest_csv_file(cfg.input, cfg.features, cfg.group_cols, cfg.grid);
        return std::move(res.points);
    }
    if (cfg.generator == "mixture")
        return gen_mixture(cfg.n, cfg.dim, cfg.modes, cfg.grid, cfg.seed, false);
    if (cfg.generator == "drift")
        return gen_mixture(cfg.n, cfg.dim, cfg.modes, cfg.grid, cfg.seed, true);
    std::vector<int> bits;
    if (cfg.aug_bits.empty()) {
        for (std::size_t j = 0; j < 2 * cfg.aug_n; ++j) bits.push_back(j % 2 == 0 ? 1 : 0);
    } else {
        for (char c : cfg.aug_bits) bits.push_back(c == '1' ? 1 : 0);
    }
    return gen_augindex_instance(cfg.aug_n, cfg.aug_i, bits, cfg.grid);
}

// Streams are written with one coordinate column per axis plus the group
// mask, the same schema ingest_csv reads back.
inline void write_stream_csv(const std::vector<TimedPoint>& pts, std::ostream& os) {
    if (pts.empty()) throw std::invalid_argument("write stream: empty");
    const std::size_t d = pts.front().location.dim();
    for (std::size_t j = 0; j < d; ++j) os << "x" << j << ",";
    os << "group\n";
    for (const auto& p : pts) {
        for (std::size_t j = 0; j < d; ++j) os << p.location.coords[j] << ",";
        os << p.groups << "\n";
    }
}

// Flat key=value file; unknown keys are an error, '#' starts a comment.
inline void apply_config_entry(StreamConfig& cfg, const std::string& key,
                               const std::string& value) {
    auto as_u64 = [&] { return std::stoull(value); };
    auto as_d = [&] { return std::stod(value); };
    auto as_list = [&] {
        std::vector<double> out;
        for (const auto& s : detail::split_list(value)) out.push_back(std::stod(s));
        return out;
    };
    if (key == "input") cfg.input = value;
    else if (key == "generator") cfg.generator = value;
    else if (key == "n") cfg.n = as_u64();
    else if (key == "window") cfg.window = as_u64();
    else if (key == "k") cfg.k = static_cast<int>(as_u64());
    else if (key == "z") cfg.z = static_cast<int>(as_u64());
    else if (key == "grid") cfg.grid = static_cast<std::int64_t>(as_u64());
    else if (key == "dim") cfg.dim = as_u64();
    else if (key == "modes") cfg.modes = as_u64();
    else if (key == "epsilon") cfg.epsilon = as_d();
    else if (key == "failure-prob") cfg.failure_prob = as_d();
    else if (key == "seed") cfg.seed = as_u64();
    else if (key == "target-size") cfg.target_size = as_d();
    else if (key == "method") cfg.method = value;
    else if (key == "stride") cfg.stride = as_u64();
    else if (key == "deterministic-timing") cfg.deterministic_timing = value == "1" || value == "true";
    else if (key == "features") cfg.features = detail::split_list(value);
    else if (key == "groups") cfg.group_cols = detail::split_list(value);
    else if (key == "alpha") cfg.fairness.alpha = as_list();
    else if (key == "beta") cfg.fairness.beta = as_list();
    else if (key == "aug-n") cfg.aug_n = as_u64();
    else if (key == "aug-i") cfg.aug_i = as_u64();
    else if (key == "aug-bits") cfg.aug_bits = value;
    else throw std::invalid_argument("config: unknown key " + key);
}

inline void load_config_file(StreamConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        if (start >= line.size()) continue;
        const auto eq = line.find('=', start);
        if (eq == std::string::npos) throw std::runtime_error("config: expected key=value");
        apply_config_entry(cfg, line.substr(start, eq - start), line.substr(eq + 1));
    }
}

struct RunRow {
    std::size_t t = 0;
    std::string method;
    std::size_t coreset_size = 0;
    long long insert_us = 0;
    long long solve_us = 0;
    double cost = 0.0;
    bool feasible = false;
};

inline const char* run_csv_header() { return "t,method,coreset_size,insert_us,solve_us,cost,feasible"; }

inline std::string run_row_csv(const RunRow& r) {
    std::string s;
    s += std::to_string(r.t);
    s += ',';
    s += r.method;
    s += ',';
    s += std::to_string(r.coreset_size);
    s += ',';
    s += std::to_string(r.insert_us);
    s += ',';
    s += std::to_string(r.solve_us);
    s += ',';
    s += detail::fmt_double(r.cost);
    s += ',';
    s += r.feasible ? '1' : '0';
    return s;
}

// Fresh uniform subsample of the exact window, allocated proportionally per
// group mask, each kept point inflated so every group's mass is preserved
// exactly.
inline std::vector<TimedPoint> uniform_group_sample(const std::vector<TimedPoint>& window,
                                                    std::size_t target, std::uint64_t seed) {
    if (window.empty() || target == 0) return {};
    std::map<GroupMask, std::vector<std::size_t>> by_mask;
    for (std::size_t i = 0; i < window.size(); ++i) by_mask[window[i].groups].push_back(i);

    Rng rng(seed);
    std::vector<TimedPoint> out;
    for (auto& [mask, idx] : by_mask) {
        double mass = 0.0;
        for (std::size_t i : idx) mass += window[i].weight;
        std::size_t want = static_cast<std::size_t>(std::llround(
            static_cast<double>(target) * static_cast<double>(idx.size()) /
            static_cast<double>(window.size())));
        want = std::clamp<std::size_t>(want, 1, idx.size());
        // partial Fisher-Yates draw of `want` distinct indices
        for (std::size_t j = 0; j < want; ++j) {
            const std::size_t pick = j + rng.next_index(idx.size() - j);
            std::swap(idx[j], idx[pick]);
        }
        double picked_mass = 0.0;
        for (std::size_t j = 0; j < want; ++j) picked_mass += window[idx[j]].weight;
        for (std::size_t j = 0; j < want; ++j) {
            TimedPoint p = window[idx[j]];
            p.weight = p.weight / picked_mass * mass;
            out.push_back(std::move(p));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TimedPoint& a, const TimedPoint& b) { return a.timestamp < b.timestamp; });
    return out;
}

// Downstream solver shared by every method: the fairlet pipeline when the
// input is the standard two-group layout, swap-based search otherwise.
inline FairSolution harness_solve(const std::vector<TimedPoint>& S, const StreamConfig& cfg) {
    FairSolution empty;
    if (S.empty()) return empty;
    bool two = cfg.fairness.num_groups() == 2;
    for (const auto& p : S)
        if (p.groups != 1 && p.groups != 2) two = false;
    if (two)
        return fairlet_decompose(S, cfg.fairness, static_cast<std::size_t>(cfg.k), cfg.z,
                                 cfg.seed);
    return local_search_fair(S, cfg.fairness, static_cast<std::size_t>(cfg.k), cfg.z, 30,
                             cfg.seed, cfg.epsilon);
}

struct BenchmarkResult {
    std::vector<RunRow> rows;
    std::size_t stream_length = 0;
};

// Replays the stream once, maintaining each selected method's summary, and
// evaluates all of them on the same checkpoints.  Methods are emitted in a
// fixed order so runs are reproducible line by line.
inline BenchmarkResult run_benchmark(const StreamConfig& cfg, std::ostream* out = nullptr) {
    cfg.validate();
    const auto stream = make_stream(cfg);
    const std::size_t stride = cfg.effective_stride();

    const bool all = cfg.method == "all";
    const bool want_ours = all || cfg.method == "ours";
    const bool want_bench = all || cfg.method == "benchmark";
    const bool want_uniform = all || cfg.method == "uniform";
    const bool want_uncon = all || cfg.method == "unconstrained";
    const bool need_window = want_bench || want_uniform;

    ClusteringParams base;
    base.k = cfg.k;
    base.z = cfg.z;
    base.delta = cfg.grid;
    base.dim = static_cast<int>(stream.empty() ? cfg.dim : stream.front().location.dim());
    base.epsilon = cfg.epsilon;
    base.failure_prob = cfg.failure_prob;

    WindowParams wp;
    wp.base = base;
    wp.window = cfg.window;
    wp.rate = cfg.target_size > 0 ? std::max(1.0, cfg.target_size) : 0.0;
    wp.seed = cfg.seed;

    std::optional<FairWindowSketch> ours;
    if (want_ours) ours.emplace(wp);
    std::optional<WindowSketch> uncon;
    if (want_uncon) uncon.emplace(wp, detail::mix64(cfg.seed ^ 0x5bd1e995u));
    std::deque<TimedPoint> window;

    using clock = std::chrono::steady_clock;
    long long ours_ins = 0, bench_ins = 0, uncon_ins = 0;

    BenchmarkResult res;
    res.stream_length = stream.size();
    if (out) *out << run_csv_header() << "\n";

    auto emit = [&](RunRow row) {
        if (cfg.deterministic_timing) {
            row.insert_us = 0;
            row.solve_us = 0;
        }
        if (out) *out << run_row_csv(row) << "\n";
        res.rows.push_back(std::move(row));
    };

    for (std::size_t t = 1; t <= stream.size(); ++t) {
        const auto& p = stream[t - 1];
        if (want_ours) {
            const auto t0 = clock::now();
            ours->insert(p);
            ours_ins += std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0)
                            .count();
        }
        if (want_uncon) {
            const auto t0 = clock::now();
            uncon->insert(p);
            uncon_ins += std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0)
                             .count();
        }
        if (need_window) {
            const auto t0 = clock::now();
            window.push_back(p);
            if (window.size() > cfg.window) window.pop_front();
            bench_ins += std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0)
                             .count();
        }
        if (t % stride != 0) continue;

        std::size_t ours_size = 0;
        if (want_ours) {
            const auto S = ours->extract();
            ours_size = S.size();
            const auto t0 = clock::now();
            const auto sol = harness_solve(S, cfg);
            const auto us =
                std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
            emit({t, "ours", S.size(), ours_ins, us, sol.cost, sol.feasible});
            ours_ins = 0;
        }
        if (want_bench) {
            std::vector<TimedPoint> S(window.begin(), window.end());
            const auto t0 = clock::now();
            const auto sol = harness_solve(S, cfg);
            const auto us =
                std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
            emit({t, "benchmark", S.size(), bench_ins, us, sol.cost, sol.feasible});
            bench_ins = 0;
        }
        if (want_uniform) {
            std::size_t target = cfg.target_size > 0
                                     ? static_cast<std::size_t>(std::llround(cfg.target_size))
                                     : (want_ours ? ours_size
                                                  : std::max<std::size_t>(1, cfg.window / 10));
            const auto t0 = clock::now();
            const std::vector<TimedPoint> win(window.begin(), window.end());
            const auto S = uniform_group_sample(win, target, detail::mix64(cfg.seed ^ t));
            const auto sol = harness_solve(S, cfg);
            const auto us =
                std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
            emit({t, "uniform", S.size(), 0, us, sol.cost, sol.feasible});
        }
        if (want_uncon) {
            const auto S = uncon->extract();
            const auto t0 = clock::now();
            const auto sol = harness_solve(S, cfg);
            const auto us =
                std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
            emit({t, "unconstrained", S.size(), uncon_ins, us, sol.cost, sol.feasible});
            uncon_ins = 0;
        }
    }
    return res;
}

// Memory/size report for the group-aware sketch after replaying a stream.
inline void inspect_report(const StreamConfig& cfg, std::ostream& os) {
    cfg.validate();
    const auto stream = make_stream(cfg);
    ClusteringParams base;
    base.k = cfg.k;
    base.z = cfg.z;
    base.delta = cfg.grid;
    base.dim = static_cast<int>(stream.empty() ? cfg.dim : stream.front().location.dim());
    base.epsilon = cfg.epsilon;
    base.failure_prob = cfg.failure_prob;
    WindowParams wp;
    wp.base = base;
    wp.window = cfg.window;
    wp.rate = cfg.target_size > 0 ? std::max(1.0, cfg.target_size) : 0.0;
    wp.seed = cfg.seed;

    FairWindowSketch sk(wp);
    for (const auto& p : stream) sk.insert(p);

    const std::size_t rec_bytes = base.dim * 8 + 40;  // coords + bookkeeping per point
    os << "stream_points: " << stream.size() << "\n";
    os << "window: " << cfg.window << "\n";
    os << "hierarchies: " << sk.hierarchies().size() << "\n";
    std::size_t total = 0;
    for (const auto& h : sk.stats()) {
        os << "hierarchy mask=" << h.mask << " processed=" << h.processed
           << " retained=" << h.retained << " levels=";
        for (std::size_t j = 0; j < h.level_points.size(); ++j) {
            if (j) os << "/";
            os << h.level_points[j];
        }
        os << "\n";
        total += h.retained;
    }
    os << "retained_points: " << total << "\n";
    os << "approx_bytes: " << total * rec_bytes << "\n";
}

} // namespace fairwin
