#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fairwin/meyerson.hpp"
#include "fairwin/prng.hpp"
#include "oracles.hpp"

using namespace fairwin;

namespace {

ClusteringParams small_params(int k, std::int64_t delta) {
    ClusteringParams p;
    p.k = k;
    p.z = 1;
    p.delta = delta;
    p.dim = 2;
    p.epsilon = 0.5;
    p.failure_prob = 0.1;
    return p;
}

std::vector<TimedPoint> random_stream(std::size_t n, std::int64_t delta, std::uint64_t seed,
                                      bool unit_weights = true) {
    Rng rng(seed);
    std::vector<TimedPoint> out;
    for (std::size_t t = 0; t < n; ++t) {
        GridPoint loc{{static_cast<std::int64_t>(rng.next_index(delta)),
                       static_cast<std::int64_t>(rng.next_index(delta))}};
        const double w = unit_weights ? 1.0 : 1.0 + 4.0 * rng.next_unit();
        out.push_back({loc, static_cast<std::int64_t>(t), w, 0});
    }
    return out;
}

} // namespace

TEST_CASE("phase budget matches the closed form") {
    CHECK(MeyersonSketch(small_params(5, 1024), 1).budget() == 440);   // 8*5*(1+10)
    CHECK(MeyersonSketch(small_params(2, 1 << 16), 1).budget() == 272); // 16*17
}

TEST_CASE("first point opens a center and is assigned to itself") {
    MeyersonSketch sk(small_params(2, 64), 7);
    auto a = sk.insert({{{3, 4}}, 0, 2.5, 0});
    CHECK(a.opened);
    CHECK(a.center == 0);
    CHECK(a.cost == 0.0);
    CHECK(sk.guess() == 2.5);
    CHECK(sk.centers().size() == 1);
}

TEST_CASE("a point at an existing center never opens") {
    MeyersonSketch sk(small_params(2, 64), 7);
    sk.insert({{{3, 4}}, 0, 1.0, 0});
    for (int t = 1; t <= 20; ++t) {
        auto a = sk.insert({{{3, 4}}, t, 1.0, 0});
        CHECK_FALSE(a.opened);
        CHECK(a.center == 0);
        CHECK(a.cost == 0.0);
    }
    CHECK(sk.centers().size() == 1);
    CHECK(sk.logged_cost() == 0.0);
}

TEST_CASE("replays are identical for a fixed seed") {
    const auto stream = random_stream(400, 256, 11, false);
    MeyersonSketch a(small_params(3, 256), 99);
    MeyersonSketch b(small_params(3, 256), 99);
    for (const auto& p : stream) {
        auto ra = a.insert(p);
        auto rb = b.insert(p);
        REQUIRE(ra.center == rb.center);
        REQUIRE(ra.opened == rb.opened);
        REQUIRE(ra.cost == rb.cost);
    }
    CHECK(a.centers().size() == b.centers().size());
    CHECK(a.logged_cost() == b.logged_cost());
}

TEST_CASE("center count stays within budget times phases") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        auto params = small_params(2, 128);
        MeyersonSketch sk(params, seed);
        const auto stream = random_stream(2000, 128, seed * 31 + 5);
        for (const auto& p : stream) {
            sk.insert(p);
            REQUIRE(sk.centers().size() <= sk.budget() * sk.phases());
        }
        CHECK(sk.centers().size() >= 1);
        CHECK(sk.centers().size() <= stream.size());
    }
}

TEST_CASE("log entries price each assignment at arrival") {
    auto params = small_params(3, 256);
    params.z = 2;
    MeyersonSketch sk(params, 5);
    const auto stream = random_stream(500, 256, 17, false);
    double total = 0.0;
    for (const auto& p : stream) {
        auto a = sk.insert(p);
        if (a.opened) {
            CHECK(a.cost == 0.0);
        } else {
            CHECK(a.cost ==
                  Catch::Approx(p.weight * dist_z(p.location, sk.centers()[a.center], 2))
                      .epsilon(1e-12));
        }
        total += a.cost;
    }
    CHECK(sk.logged_cost() == Catch::Approx(total).epsilon(1e-12));
    REQUIRE(sk.assignment_log().size() == stream.size());
}

TEST_CASE("logged cost dominates reassignment to the final centers") {
    // centers only accumulate, so the arrival-time nearest distance upper
    // bounds the distance to the final set
    for (std::uint64_t seed : {3ull, 8ull, 21ull}) {
        auto params = small_params(4, 512);
        MeyersonSketch sk(params, seed);
        const auto stream = random_stream(1500, 512, seed + 40, false);
        for (const auto& p : stream) sk.insert(p);
        double final_cost = 0.0;
        for (const auto& p : stream) {
            const std::size_t nc = nearest_center(p.location, sk.centers());
            final_cost += p.weight * dist_z(p.location, sk.centers()[nc], params.z);
        }
        CHECK(final_cost <= sk.logged_cost() * (1.0 + 1e-12));
    }
}

TEST_CASE("assigned centers existed at arrival time") {
    auto params = small_params(2, 256);
    MeyersonSketch sk(params, 23);
    const auto stream = random_stream(800, 256, 77);
    std::size_t centers_so_far = 0;
    for (const auto& p : stream) {
        auto a = sk.insert(p);
        if (a.opened) ++centers_so_far;
        REQUIRE(a.center < centers_so_far);
    }
}
