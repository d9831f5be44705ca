// fairwin command line: benchmark replays, stream generation, one-shot
// solves, and sketch inspection.  All subcommands share the same option set
// and config-file keys; command-line flags override file values.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairwin/harness.hpp"

namespace {

struct CliState {
    fairwin::StreamConfig cfg;
    std::string config_path;
    std::string out_path;
    std::string alpha, beta, features, groups;
    bool exact = false;

    // file first, then every flag the user actually passed
    void finalize(const CLI::App& cmd) {
        fairwin::StreamConfig merged;
        if (!config_path.empty()) fairwin::load_config_file(merged, config_path);
        auto touch = [&](const char* flag, const char* key, const std::string& value) {
            if (cmd.count(flag) > 0) fairwin::apply_config_entry(merged, key, value);
        };
        touch("--input", "input", cfg.input);
        touch("--generator", "generator", cfg.generator);
        touch("--n", "n", std::to_string(cfg.n));
        touch("--window", "window", std::to_string(cfg.window));
        touch("--k", "k", std::to_string(cfg.k));
        touch("--z", "z", std::to_string(cfg.z));
        touch("--grid", "grid", std::to_string(cfg.grid));
        touch("--dim", "dim", std::to_string(cfg.dim));
        touch("--modes", "modes", std::to_string(cfg.modes));
        touch("--epsilon", "epsilon", std::to_string(cfg.epsilon));
        touch("--failure-prob", "failure-prob", std::to_string(cfg.failure_prob));
        touch("--seed", "seed", std::to_string(cfg.seed));
        touch("--target-size", "target-size", std::to_string(cfg.target_size));
        touch("--method", "method", cfg.method);
        touch("--stride", "stride", std::to_string(cfg.stride));
        touch("--deterministic-timing", "deterministic-timing",
              cfg.deterministic_timing ? "1" : "0");
        touch("--alpha", "alpha", alpha);
        touch("--beta", "beta", beta);
        touch("--features", "features", features);
        touch("--groups", "groups", groups);
        touch("--aug-n", "aug-n", std::to_string(cfg.aug_n));
        touch("--aug-i", "aug-i", std::to_string(cfg.aug_i));
        touch("--aug-bits", "aug-bits", cfg.aug_bits);
        cfg = std::move(merged);
    }
};

void add_common_options(CLI::App& cmd, CliState& st) {
    cmd.add_option("--config", st.config_path, "flat key=value config file");
    cmd.add_option("--input", st.cfg.input, "input stream CSV");
    cmd.add_option("--generator", st.cfg.generator, "mixture|drift|augindex");
    cmd.add_option("--n", st.cfg.n, "generated stream length");
    cmd.add_option("--window", st.cfg.window, "sliding window size");
    cmd.add_option("--k", st.cfg.k, "number of centers");
    cmd.add_option("--z", st.cfg.z, "cost exponent (1 or 2)");
    cmd.add_option("--grid", st.cfg.grid, "coordinate grid side");
    cmd.add_option("--dim", st.cfg.dim, "generated dimension");
    cmd.add_option("--modes", st.cfg.modes, "mixture mode count");
    cmd.add_option("--epsilon", st.cfg.epsilon, "accuracy target");
    cmd.add_option("--failure-prob", st.cfg.failure_prob, "failure probability budget");
    cmd.add_option("--seed", st.cfg.seed, "stream and solver seed");
    cmd.add_option("--target-size", st.cfg.target_size, "pinned per-reduction sampling rate");
    cmd.add_option("--method", st.cfg.method, "ours|benchmark|uniform|unconstrained|all");
    cmd.add_option("--stride", st.cfg.stride, "checkpoint stride (0 = window/10)");
    cmd.add_flag("--deterministic-timing", st.cfg.deterministic_timing,
                 "zero timing columns for byte-stable replays");
    cmd.add_option("--alpha", st.alpha, "per-group lower fractions, comma separated");
    cmd.add_option("--beta", st.beta, "per-group upper fractions, comma separated");
    cmd.add_option("--features", st.features, "feature columns, comma separated");
    cmd.add_option("--groups", st.groups, "group columns, comma separated");
    cmd.add_option("--aug-n", st.cfg.aug_n, "hard instance n");
    cmd.add_option("--aug-i", st.cfg.aug_i, "hard instance query index");
    cmd.add_option("--aug-bits", st.cfg.aug_bits, "hard instance bitstring");
    cmd.add_option("--out", st.out_path, "output file (default stdout)");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path);
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair clustering over sliding windows"};
    app.require_subcommand(1);

    CliState run_st, gen_st, solve_st, inspect_st;
    auto* run = app.add_subcommand("run", "replay a stream and emit benchmark rows");
    add_common_options(*run, run_st);
    auto* gen = app.add_subcommand("gen", "write a synthetic stream as CSV");
    add_common_options(*gen, gen_st);
    auto* solve = app.add_subcommand("solve", "one-shot fair clustering of a CSV");
    add_common_options(*solve, solve_st);
    solve->add_flag("--exact", solve_st.exact, "exhaustive center search (tiny inputs only)");
    auto* inspect = app.add_subcommand("inspect", "sketch size report after a replay");
    add_common_options(*inspect, inspect_st);

    CLI11_PARSE(app, argc, argv);

    try {
        std::ofstream file;
        if (run->parsed()) {
            run_st.finalize(*run);
            run_st.cfg.validate();
            auto& os = open_out(run_st.out_path, file);
            fairwin::run_benchmark(run_st.cfg, &os);
        } else if (gen->parsed()) {
            gen_st.finalize(*gen);
            gen_st.cfg.validate();
            if (gen_st.cfg.generator.empty())
                throw std::runtime_error("gen: --generator is required");
            auto& os = open_out(gen_st.out_path, file);
            fairwin::write_stream_csv(fairwin::make_stream(gen_st.cfg), os);
        } else if (solve->parsed()) {
            solve_st.finalize(*solve);
            if (solve_st.cfg.input.empty())
                throw std::runtime_error("solve: --input is required");
            auto ing = fairwin::ingest_csv_file(solve_st.cfg.input, solve_st.cfg.features,
                                               solve_st.cfg.group_cols, solve_st.cfg.grid);
            fairwin::FairSolution sol;
            if (solve_st.exact) {
                sol = fairwin::brute_force_fair(ing.points, solve_st.cfg.fairness,
                                                static_cast<std::size_t>(solve_st.cfg.k),
                                                solve_st.cfg.z, ing.points);
            } else {
                sol = fairwin::harness_solve(ing.points, solve_st.cfg);
            }
            auto& os = open_out(solve_st.out_path, file);
            os << fairwin::to_json(sol).dump(2) << "\n";
        } else if (inspect->parsed()) {
            inspect_st.finalize(*inspect);
            inspect_st.cfg.validate();
            auto& os = open_out(inspect_st.out_path, file);
            fairwin::inspect_report(inspect_st.cfg, os);
        }
    } catch (const std::exception& e) {
        std::cerr << "fairwin: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
