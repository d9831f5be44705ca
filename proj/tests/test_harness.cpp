#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "fairwin/fairness.hpp"
#include "fairwin/harness.hpp"

using namespace fairwin;

namespace {

IngestResult ingest_string(const std::string& text, const std::vector<std::string>& features,
                           const std::vector<std::string>& groups, std::int64_t grid) {
    std::istringstream in(text);
    return ingest_csv(in, features, groups, grid);
}

} // namespace

TEST_CASE("ingest maps rows to grid points and group bits") {
    const auto res = ingest_string(
        "age,income,sex\n"
        "20,1000,f\n"
        "40,3000,m\n"
        "30,2000,f\n",
        {"age", "income"}, {"sex"}, 1 << 8);
    REQUIRE(res.points.size() == 3);
    REQUIRE(res.skipped == 0);
    REQUIRE(res.num_groups == 2);
    // sorted distinct values: f -> bit 0, m -> bit 1
    REQUIRE(res.points[0].groups == 1);
    REQUIRE(res.points[1].groups == 2);
    REQUIRE(res.points[2].groups == 1);
    // min-max endpoints land on the grid edges
    REQUIRE(res.points[0].location.coords[0] == 0);
    REQUIRE(res.points[1].location.coords[0] == 255);
    REQUIRE(res.points[2].location.coords[0] == 128);
    for (const auto& p : res.points) REQUIRE(p.location.dim() == 2);
    REQUIRE(res.points[0].timestamp == 1);
    REQUIRE(res.points[2].timestamp == 3);
}

TEST_CASE("ingest handles degenerate and malformed input") {
    const auto flat = ingest_string("a,g\n5,x\n5,y\n5,x\n", {"a"}, {"g"}, 1 << 16);
    for (const auto& p : flat.points) REQUIRE(p.location.coords[0] == 0);

    const auto messy = ingest_string(
        "a,b,g\n"
        "1,2,x\n"
        "oops,2,y\n"
        "3,,y\n"
        "4,5\n"
        "6,7,y\n",
        {"a", "b"}, {"g"}, 1 << 8);
    REQUIRE(messy.points.size() == 2);
    REQUIRE(messy.skipped == 3);

    REQUIRE_THROWS_AS(ingest_string("a,g\n1,x\n", {"missing"}, {"g"}, 256), std::runtime_error);
    REQUIRE_THROWS_AS(ingest_string("a,g\n", {"a"}, {"g"}, 256), std::runtime_error);
    REQUIRE_THROWS_AS(ingest_string("a,g\nbad,x\n", {"a"}, {"g"}, 256), std::runtime_error);
}

TEST_CASE("quantization error stays within one grid cell") {
    Rng rng(42);
    std::ostringstream csv;
    csv << "v,g\n";
    std::vector<double> vals;
    for (int i = 0; i < 200; ++i) {
        const double v = -50.0 + 300.0 * rng.next_unit();
        vals.push_back(v);
        csv << v << "," << (i % 2) << "\n";
    }
    const std::int64_t grid = 1 << 12;
    const auto res = ingest_string(csv.str(), {"v"}, {"g"}, grid);
    REQUIRE(res.points.size() == vals.size());
    const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    const double lo = *lo_it, range = *hi_it - *lo_it;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double back =
            lo + static_cast<double>(res.points[i].location.coords[0]) / (grid - 1) * range;
        REQUIRE(std::abs(back - vals[i]) <= range / grid);
    }
}

TEST_CASE("mixture generator is deterministic and group-correlated") {
    const auto a = gen_mixture(500, 2, 4, 1 << 12, 9);
    const auto b = gen_mixture(500, 2, 4, 1 << 12, 9);
    REQUIRE(a.size() == 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].location == b[i].location);
        REQUIRE(a[i].groups == b[i].groups);
        REQUIRE(a[i].timestamp == static_cast<std::int64_t>(i + 1));
        REQUIRE(a[i].groups >= 1);
        REQUIRE(a[i].groups <= 2);
        for (auto c : a[i].location.coords) {
            REQUIRE(c >= 0);
            REQUIRE(c < (1 << 12));
        }
    }
    const auto c = gen_mixture(500, 2, 4, 1 << 12, 10);
    bool differs = false;
    for (std::size_t i = 0; i < a.size() && !differs; ++i)
        differs = !(a[i].location == c[i].location);
    REQUIRE(differs);
}

TEST_CASE("drift flips the group balance mid-stream") {
    const auto s = gen_mixture(2000, 2, 4, 1 << 12, 3, true);
    std::size_t early1 = 0, late1 = 0;
    for (std::size_t i = 0; i < 1000; ++i) early1 += s[i].groups == 1;
    for (std::size_t i = 1000; i < 2000; ++i) late1 += s[i].groups == 1;
    // bias 0.8/0.2 in front, inverted behind; the gap is far outside noise
    REQUIRE(early1 > 550);
    REQUIRE(late1 < 450);
}

TEST_CASE("hard instance window separates the queried bit") {
    const std::int64_t delta = 1024;
    const FairnessSpec spec{{0.0, 0.5}, {1.0, 1.0}};
    const std::vector<GridPoint> centers = {{0}, {delta}};
    for (std::size_t n : {1ull, 2ull, 3ull, 5ull}) {
        std::vector<int> bits;
        for (std::size_t j = 0; j < 2 * n; ++j) bits.push_back(j % 2 == 0 ? 1 : 0);
        for (std::size_t i = 1; i <= 2 * n; ++i) {
            const auto stream = gen_augindex_instance(n, i, bits, delta);
            REQUIRE(stream.size() == 4 * n + i);
            std::vector<TimedPoint> win(stream.end() - 4 * n, stream.end());
            std::size_t c1 = 0, c2 = 0;
            for (const auto& p : win) {
                REQUIRE((p.location.coords[0] == 0 || p.location.coords[0] == delta));
                (p.groups == 1 ? c1 : c2)++;
            }
            REQUIRE(c1 == 2 * n);
            REQUIRE(c2 == 2 * n);
            const auto r = fair_cost(win, centers, spec, 1);
            REQUIRE(r.status == FairStatus::kOptimal);
            if (bits[i - 1] == 0) {
                REQUIRE(r.cost <= 1e-6);
            } else {
                REQUIRE(r.cost >= static_cast<double>(delta) * (1 - 1e-9));
            }
        }
    }
    REQUIRE_THROWS_AS(gen_augindex_instance(2, 1, {1, 0, 1}, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(gen_augindex_instance(2, 1, {1, 1, 1, 0}, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(gen_augindex_instance(2, 5, {1, 0, 1, 0}, 64), std::invalid_argument);
}

TEST_CASE("stream csv round trips through ingest") {
    const auto s = gen_mixture(60, 2, 3, 1 << 10, 17);
    std::ostringstream os;
    write_stream_csv(s, os);
    std::istringstream in(os.str());
    const auto back = ingest_csv(in, {}, {"group"}, 1 << 10);
    REQUIRE(back.points.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(back.points[i].groups == s[i].groups);
}

TEST_CASE("config file keys apply and flags win") {
    const std::string path = "harness_cfg_test.tmp";
    {
        std::ofstream f(path);
        f << "# comment\n";
        f << "generator=mixture\n";
        f << "n=123\n";
        f << "window=32\n";
        f << "alpha=0.1,0.3\n";
        f << "beta=0.9,0.7\n";
        f << "target-size=12\n";
    }
    StreamConfig cfg;
    load_config_file(cfg, path);
    std::remove(path.c_str());
    REQUIRE(cfg.generator == "mixture");
    REQUIRE(cfg.n == 123);
    REQUIRE(cfg.window == 32);
    REQUIRE(cfg.fairness.alpha[1] == Catch::Approx(0.3));
    REQUIRE(cfg.target_size == Catch::Approx(12));
    apply_config_entry(cfg, "n", "77");  // later entries (flags) override
    REQUIRE(cfg.n == 77);
    REQUIRE_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
    cfg.validate();
    cfg.input = "also.csv";
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("uniform sample preserves group masses") {
    const auto win = gen_mixture(300, 2, 3, 1 << 10, 5);
    const auto S = uniform_group_sample(win, 40, 99);
    REQUIRE(!S.empty());
    REQUIRE(S.size() <= 42);
    std::map<GroupMask, double> want, got;
    std::map<GroupMask, std::size_t> count;
    for (const auto& p : win) want[p.groups] += p.weight;
    for (const auto& p : S) {
        got[p.groups] += p.weight;
        count[p.groups]++;
    }
    for (const auto& [mask, mass] : want) {
        REQUIRE(got[mask] == Catch::Approx(mass).epsilon(1e-9));
        // proportional allocation: share of sample tracks share of window
        const double frac = mass / 300.0;
        REQUIRE(static_cast<double>(count[mask]) >= 40 * frac - 2);
        REQUIRE(static_cast<double>(count[mask]) <= 40 * frac + 2);
    }
}

TEST_CASE("benchmark replay is byte-identical under a fixed seed") {
    StreamConfig cfg;
    cfg.generator = "mixture";
    cfg.n = 260;
    cfg.window = 64;
    cfg.k = 2;
    cfg.target_size = 24;
    cfg.stride = 64;
    cfg.seed = 31;
    cfg.deterministic_timing = true;
    std::ostringstream a, b;
    const auto ra = run_benchmark(cfg, &a);
    const auto rb = run_benchmark(cfg, &b);
    REQUIRE(a.str() == b.str());
    REQUIRE(ra.rows.size() == rb.rows.size());
    REQUIRE(!ra.rows.empty());
    REQUIRE(a.str().rfind(run_csv_header(), 0) == 0);

    std::map<std::string, std::size_t> last_t;
    for (const auto& row : ra.rows) {
        if (last_t.count(row.method)) REQUIRE(row.t > last_t[row.method]);
        last_t[row.method] = row.t;
        REQUIRE(row.coreset_size > 0);
    }
    REQUIRE(last_t.size() == 4);
}

TEST_CASE("oversampled sketch matches the benchmark row by row") {
    StreamConfig cfg;
    cfg.generator = "mixture";
    cfg.n = 300;
    cfg.window = 48;
    cfg.k = 2;
    cfg.target_size = 1e6;  // rate so high every coin is certain
    cfg.stride = 48;
    cfg.seed = 7;
    cfg.method = "all";
    const auto res = run_benchmark(cfg, nullptr);
    std::map<std::size_t, double> ours_cost, bench_cost;
    std::map<std::size_t, std::size_t> ours_size, bench_size;
    for (const auto& row : res.rows) {
        if (row.method == "ours") {
            ours_cost[row.t] = row.cost;
            ours_size[row.t] = row.coreset_size;
        } else if (row.method == "benchmark") {
            bench_cost[row.t] = row.cost;
            bench_size[row.t] = row.coreset_size;
        }
    }
    REQUIRE(!ours_cost.empty());
    for (const auto& [t, c] : ours_cost) {
        REQUIRE(ours_size[t] == bench_size[t]);
        REQUIRE(c >= bench_cost[t] / (1 + cfg.epsilon) - 1e-9);
        REQUIRE(c <= bench_cost[t] * (1 + cfg.epsilon) + 1e-9);
    }
}

TEST_CASE("per-insert cost does not scale linearly with the window") {
    const std::size_t n = 6000;
    const auto stream = gen_mixture(n, 2, 4, 1 << 16, 12);
    auto mean_insert_us = [&](std::size_t m) {
        ClusteringParams base;
        base.k = 2;
        base.z = 1;
        base.delta = 1 << 16;
        base.dim = 2;
        WindowParams wp;
        wp.base = base;
        wp.window = m;
        wp.rate = 64;
        wp.seed = 12;
        FairWindowSketch sk(wp);
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& p : stream) sk.insert(p);
        const auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        return static_cast<double>(us) / static_cast<double>(n);
    };
    const double small = mean_insert_us(256);
    const double big = mean_insert_us(2048);
    // window grew 8x; per-insert work must stay within the polylog band
    REQUIRE(big <= 4.0 * small + 5.0);
}

TEST_CASE("inspect reports every hierarchy") {
    StreamConfig cfg;
    cfg.generator = "mixture";
    cfg.n = 200;
    cfg.window = 32;
    cfg.target_size = 16;
    std::ostringstream os;
    inspect_report(cfg, os);
    const auto text = os.str();
    REQUIRE(text.find("stream_points: 200") != std::string::npos);
    REQUIRE(text.find("hierarchies: 2") != std::string::npos);
    REQUIRE(text.find("retained_points:") != std::string::npos);
    REQUIRE(text.find("approx_bytes:") != std::string::npos);
}
