#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "fairwin/coreset.hpp"
#include "fairwin/coreset_io.hpp"
#include "fairwin/prng.hpp"
#include "oracles.hpp"

using namespace fairwin;

namespace {

ClusteringParams stream_params(int k, std::int64_t delta) {
    ClusteringParams p;
    p.k = k;
    p.z = 1;
    p.delta = delta;
    p.dim = 2;
    p.epsilon = 0.5;
    p.failure_prob = 0.1;
    return p;
}

std::vector<TimedPoint> grid_stream(std::size_t n, std::int64_t delta, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TimedPoint> out;
    for (std::size_t t = 0; t < n; ++t) {
        GridPoint loc{{static_cast<std::int64_t>(rng.next_index(delta)),
                       static_cast<std::int64_t>(rng.next_index(delta))}};
        out.push_back({loc, static_cast<std::int64_t>(t), 1.0, rng.next_index(2) ? 1u : 2u});
    }
    return out;
}

bool records_equal(const CoresetRecord& a, const CoresetRecord& b) {
    return a.point.timestamp == b.point.timestamp &&
           a.point.location.coords == b.point.location.coords &&
           a.point.weight == b.point.weight && a.point.groups == b.point.groups &&
           a.prob == b.prob && a.ring_center == b.ring_center && a.ring == b.ring;
}

} // namespace

TEST_CASE("ring sampler keeps the first point with certainty") {
    RingSampler s(4.0, 9, ring_stream_id(0, 3));
    CHECK(s.insert({{{1, 2}}, 0, 3.0, 0}));
    REQUIRE(s.kept().size() == 1);
    CHECK(s.kept()[0].prob == 1.0);
    CHECK(s.kept()[0].point.weight == 3.0);
    CHECK(s.prob_sum() == 1.0);
}

TEST_CASE("ring sampler rejects rates below one") {
    CHECK_THROWS_AS(RingSampler(0.5, 1, 0), std::invalid_argument);
}

TEST_CASE("probability mass obeys the harmonic bound") {
    // unit weights: sum of coin probabilities is at most rate * ln n + 1
    for (double rate : {1.0, 4.0, 16.0}) {
        for (std::size_t n : {10u, 100u, 1000u, 5000u}) {
            RingSampler s(rate, 33, ring_stream_id(1, 2));
            for (std::size_t t = 0; t < n; ++t) s.insert({{{0, 0}}, static_cast<std::int64_t>(t), 1.0, 0});
            CHECK(s.mass() == static_cast<double>(n));
            CHECK(s.prob_sum() <= rate * std::log(static_cast<double>(n)) + 1.0);
            CHECK(s.prob_sum() <= s.expected_size_bound());
        }
    }
}

TEST_CASE("kept weight is an unbiased estimate of ring mass") {
    // one fixed weighted stream, many seeds; the estimator mean must land
    // within four standard errors of the true mass
    Rng rng(404);
    std::vector<TimedPoint> stream;
    double mass = 0.0;
    for (int t = 0; t < 30; ++t) {
        const double w = 0.5 + 3.0 * rng.next_unit();
        stream.push_back({{{t, 0}}, t, w, 0});
        mass += w;
    }
    const std::size_t trials = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t seed = 0; seed < trials; ++seed) {
        RingSampler s(2.0, seed, ring_stream_id(0, 1));
        for (const auto& p : stream) s.insert(p);
        double est = 0.0;
        for (const auto& kd : s.kept()) est += kd.point.weight / kd.prob;
        sum += est;
        sumsq += est * est;
    }
    const double mean = sum / trials;
    const double var = sumsq / trials - mean * mean;
    const double se = std::sqrt(var / trials);
    CHECK(std::abs(mean - mass) <= 4.0 * se + 1e-9);
}

TEST_CASE("stream ids for rings stay clear of the facility tag") {
    CHECK((ring_stream_id(0, kInnerRing) & kMeyersonStream) == 0);
    CHECK((ring_stream_id(1000000, 40) & kMeyersonStream) == 0);
    std::map<std::uint64_t, int> seen;
    for (std::size_t c = 0; c < 50; ++c)
        for (int j = -1; j < 40; ++j) ++seen[ring_stream_id(c, j)];
    for (const auto& [id, count] : seen) CHECK(count == 1);
}

TEST_CASE("online coreset rejects bad parameters") {
    CoresetParams cp;
    cp.base = stream_params(2, 64);
    cp.rate = 0.0;
    CHECK_THROWS_AS(OnlineCoreset(cp), std::invalid_argument);
    cp.rate = 4.0;
    OnlineCoreset oc(cp);
    CHECK_THROWS_AS(oc.insert({{{1, 2, 3}}, 0, 1.0, 0}), std::invalid_argument);
}

TEST_CASE("duplicate locations are stored verbatim") {
    CoresetParams cp;
    cp.base = stream_params(2, 64);
    cp.rate = 4.0;
    cp.seed = 5;
    OnlineCoreset oc(cp);
    for (int t = 0; t < 10; ++t) oc.insert({{{7, 9}}, t, 1.5, 1});
    REQUIRE(oc.inner_size() == 10);  // opener plus nine zero-distance copies
    for (const auto& rec : oc.extract_records()) {
        CHECK(rec.prob == 1.0);
        CHECK(rec.ring == kInnerRing);
        CHECK(rec.point.weight == 1.5);
        CHECK(rec.point.groups == 1);
    }
    const auto pts = oc.extract();
    double total = 0.0;
    for (const auto& p : pts) total += p.weight;
    CHECK(total == 15.0);
}

TEST_CASE("extract of a prefix equals the filtered full extract") {
    // the defining replay property: stopping early and filtering late give
    // byte-identical contents
    CoresetParams cp;
    cp.base = stream_params(2, 256);
    cp.rate = 6.0;
    for (std::uint64_t seed : {1ull, 9ull, 42ull}) {
        cp.seed = seed;
        const auto stream = grid_stream(300, 256, seed * 13 + 1);
        OnlineCoreset full(cp);
        for (const auto& p : stream) full.insert(p);
        const auto all = full.extract_records();
        for (std::int64_t cut : {1, 37, 150, 300}) {
            OnlineCoreset prefix(cp);
            for (const auto& p : stream)
                if (p.timestamp < cut) prefix.insert(p);
            const auto got = prefix.extract_records();
            std::vector<CoresetRecord> want;
            for (const auto& r : all)
                if (r.point.timestamp < cut) want.push_back(r);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                REQUIRE(records_equal(got[i], want[i]));
        }
    }
}

namespace {

// stream engineered to exercise the sampling path: the heavy opener sets a
// large cost guess, so later unit points rarely open and the rings around
// the first center fill up
std::vector<TimedPoint> anchored_stream(std::size_t n, std::uint64_t seed) {
    std::vector<TimedPoint> out;
    out.push_back({{{32, 32}}, 0, 1e5, 0});
    Rng rng(seed + 100);
    for (std::size_t t = 1; t < n; ++t) {
        GridPoint loc{{static_cast<std::int64_t>(rng.next_index(64)),
                       static_cast<std::int64_t>(rng.next_index(64))}};
        out.push_back({loc, static_cast<std::int64_t>(t), 1.0, 0});
    }
    return out;
}

} // namespace

TEST_CASE("extracted weight tracks the stream mass under real subsampling") {
    CoresetParams cp;
    cp.base = stream_params(1, 64);
    cp.rate = 8.0;
    const std::size_t n = 2000;
    for (std::uint64_t seed : {2ull, 6ull, 11ull, 19ull, 27ull}) {
        cp.seed = seed;
        OnlineCoreset oc(cp);
        for (const auto& p : anchored_stream(n, seed)) oc.insert(p);
        double total = 0.0;
        for (const auto& p : oc.extract()) total += p.weight;
        const double unit_mass = static_cast<double>(n - 1);
        const double unit_kept = total - 1e5;  // heavy opener is stored verbatim
        CHECK(unit_kept >= 0.5 * unit_mass);
        CHECK(unit_kept <= 1.5 * unit_mass);
        CHECK(oc.size() < (3 * n) / 4);          // genuine compression
        CHECK(oc.size() - oc.inner_size() > 100);  // via the samplers, not dedup
    }
}

TEST_CASE("retained count stays near its expectation") {
    CoresetParams cp;
    cp.base = stream_params(1, 64);
    cp.rate = 4.0;
    for (std::uint64_t seed : {3ull, 7ull, 13ull}) {
        cp.seed = seed;
        OnlineCoreset oc(cp);
        for (const auto& p : anchored_stream(1500, seed + 55)) oc.insert(p);
        std::size_t sampled = oc.size() - oc.inner_size();
        CHECK(static_cast<double>(sampled) <=
              3.0 * oc.prob_sum() + static_cast<double>(oc.rings().size()));
    }
}

TEST_CASE("derived rate reacts to accuracy and scale the right way") {
    auto p = stream_params(4, 1 << 16);
    p.epsilon = 0.2;
    const double base = derived_rate(p, 1e4);
    CHECK(base >= 1.0);
    auto tighter = p;
    tighter.epsilon = 0.1;
    CHECK(derived_rate(tighter, 1e4) > base);
    CHECK(derived_rate(p, 1e6) > base);
    auto surer = p;
    surer.failure_prob = 0.01;
    CHECK(derived_rate(surer, 1e4) > base);
}

TEST_CASE("binary round trip preserves records exactly") {
    CoresetParams cp;
    cp.base = stream_params(2, 256);
    cp.rate = 5.0;
    cp.seed = 77;
    OnlineCoreset oc(cp);
    for (const auto& p : grid_stream(250, 256, 31)) oc.insert(p);
    const auto recs = oc.extract_records();
    REQUIRE(!recs.empty());

    std::stringstream buf;
    write_records(buf, 2, recs);
    const auto back = read_records(buf);
    CHECK(back.dim == 2);
    REQUIRE(back.records.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        REQUIRE(records_equal(back.records[i], recs[i]));
}

TEST_CASE("csv round trip preserves records exactly") {
    CoresetParams cp;
    cp.base = stream_params(2, 256);
    cp.rate = 5.0;
    cp.seed = 78;
    OnlineCoreset oc(cp);
    for (const auto& p : grid_stream(200, 256, 32)) oc.insert(p);
    const auto recs = oc.extract_records();
    REQUIRE(!recs.empty());

    std::stringstream buf;
    write_records_csv(buf, 2, recs);
    const auto back = read_records_csv(buf);
    CHECK(back.dim == 2);
    REQUIRE(back.records.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        REQUIRE(records_equal(back.records[i], recs[i]));
}

TEST_CASE("malformed binary input is refused") {
    std::stringstream bad("NOPE");
    CHECK_THROWS_AS(read_records(bad), std::runtime_error);

    std::stringstream trunc;
    write_records(trunc, 2, {CoresetRecord{{{{1, 2}}, 0, 1.0, 0}, 1.0, 0, kInnerRing}});
    std::string bytes = trunc.str();
    bytes.resize(bytes.size() - 3);
    std::stringstream cut(bytes);
    CHECK_THROWS_AS(read_records(cut), std::runtime_error);

    std::stringstream wrong;
    wrong.write("FWCS", 4);
    const std::uint16_t v = 999;
    wrong.write(reinterpret_cast<const char*>(&v), 2);
    CHECK_THROWS_AS(read_records(wrong), std::runtime_error);
}
