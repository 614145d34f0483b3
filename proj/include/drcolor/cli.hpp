#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drcolor/bench.hpp"
#include "drcolor/dr.hpp"
#include "drcolor/instances.hpp"

namespace drcolor {

namespace cli_detail {

constexpr int exit_solved = 0;
constexpr int exit_unsolved = 1;
constexpr int exit_usage = 2;

struct InstanceOptions {
    std::string dimacs_path;
    std::string sudoku_line;
    int queens_n = 0;
    std::vector<int> windmill; // a,b
    std::vector<int> random;   // n,m
    int colors = 0;            // 0 = instance default
};

inline void add_instance_flags(CLI::App& cmd, InstanceOptions& opt, bool with_sudoku) {
    auto* dimacs = cmd.add_option("--dimacs", opt.dimacs_path, "DIMACS .col file");
    auto* queens = cmd.add_option("--queens", opt.queens_n, "queens graph on an NxN board");
    auto* windmill = cmd.add_option("--windmill", opt.windmill, "windmill graph Wd(A,B)")
                         ->delimiter(',')
                         ->expected(2);
    auto* random = cmd.add_option("--random", opt.random,
                                  "random M-colorable graph with N vertices (N,M)")
                       ->delimiter(',')
                       ->expected(2);
    std::vector<CLI::Option*> kinds{dimacs, queens, windmill, random};
    if (with_sudoku)
        kinds.push_back(cmd.add_option("--sudoku", opt.sudoku_line, "81-character puzzle line"));
    for (CLI::Option* a : kinds)
        for (CLI::Option* b : kinds)
            if (a != b) a->excludes(b);
    cmd.add_option("--colors", opt.colors, "number of colors m");
}

/// Materializes the instance selected on the command line. `seed` feeds the
/// random-graph generator.
inline NamedProblem build_problem(const InstanceOptions& opt, std::uint64_t seed) {
    if (!opt.dimacs_path.empty()) {
        std::ifstream in(opt.dimacs_path);
        if (!in) throw std::runtime_error("cannot open " + opt.dimacs_path);
        std::ostringstream text;
        text << in.rdbuf();
        if (opt.colors < 2) throw std::runtime_error("--dimacs requires --colors");
        return {std::filesystem::path(opt.dimacs_path).stem().string(),
                ColoringProblem(parse_dimacs(text.str()).graph, opt.colors)};
    }
    if (!opt.sudoku_line.empty()) {
        const SudokuGrid grid = parse_sudoku_line(opt.sudoku_line);
        ColoringProblem problem = sudoku_problem(grid);
        if (opt.colors != 0 && opt.colors != problem.color_count())
            throw std::runtime_error("--colors conflicts with the sudoku board size");
        return {"sudoku", std::move(problem)};
    }
    if (opt.queens_n > 0) {
        if (opt.colors < 2) throw std::runtime_error("--queens requires --colors");
        return {"queens" + std::to_string(opt.queens_n),
                ColoringProblem(queens_graph(opt.queens_n), opt.colors)};
    }
    if (opt.windmill.size() == 2) {
        const int a = opt.windmill[0], b = opt.windmill[1];
        return {"wd_" + std::to_string(a) + "_" + std::to_string(b),
                ColoringProblem(windmill_graph(a, b), opt.colors == 0 ? a : opt.colors)};
    }
    if (opt.random.size() == 2) {
        const int n = opt.random[0], m = opt.random[1];
        return {"rand_" + std::to_string(n) + "_" + std::to_string(m) + "_s" +
                    std::to_string(seed),
                ColoringProblem(random_colorable_graph(n, m, seed),
                                opt.colors == 0 ? m : opt.colors)};
    }
    throw std::runtime_error("no instance selected (try --queens, --windmill, --random, "
                             "--dimacs or --sudoku)");
}

/// Graph-only variant for `gen`.
inline std::pair<std::string, Graph> build_graph(const InstanceOptions& opt, std::uint64_t seed) {
    if (opt.queens_n > 0) return {"queens" + std::to_string(opt.queens_n), queens_graph(opt.queens_n)};
    if (opt.windmill.size() == 2)
        return {"wd_" + std::to_string(opt.windmill[0]) + "_" + std::to_string(opt.windmill[1]),
                windmill_graph(opt.windmill[0], opt.windmill[1])};
    if (opt.random.size() == 2)
        return {"rand_" + std::to_string(opt.random[0]) + "_" + std::to_string(opt.random[1]) +
                    "_s" + std::to_string(seed),
                random_colorable_graph(opt.random[0], opt.random[1], seed)};
    throw std::runtime_error("no instance selected (try --queens, --windmill or --random)");
}

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace cli_detail

/// Entry point of the command-line tool; returns the process exit code
/// (0 solved/success, 1 not solved, 2 usage or input error).
inline int cli_main(int argc, const char* const* argv) {
    using namespace cli_detail;

    CLI::App app{"Graph coloring via Douglas-Rachford iteration on the "
                 "rank-constrained Gram-matrix formulation"};
    app.require_subcommand(1);

    // --- solve ---------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
    InstanceOptions solve_inst;
    add_instance_flags(*solve_cmd, solve_inst, true);
    DrConfig cfg;
    cfg.divergence_check = false;
    std::string variant_name = "C1C2";
    double time_limit = 0.0;
    bool trace = false;
    std::string solve_out;
    solve_cmd->add_option("--lambda", cfg.lambda, "relaxation parameter in (0,2)");
    solve_cmd->add_option("--variant", variant_name, "operator wiring: C1C2, C2C1, DC or CD");
    solve_cmd->add_option("--tol", cfg.tol, "stopping tolerance on the error metric");
    solve_cmd->add_option("--max-iter", cfg.max_iter, "iteration budget");
    solve_cmd->add_option("--time-limit", time_limit, "wall-clock budget in seconds");
    solve_cmd->add_option("--seed", cfg.seed, "starting-point (and generator) seed");
    solve_cmd->add_flag("--trace", trace, "record the error metric per iteration");
    solve_cmd->add_flag("--divergence-check", cfg.divergence_check,
                        "stop when the iterate norm blows up");
    solve_cmd->add_option("--out", solve_out, "write the JSON report here instead of stdout");

    // --- bench ---------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("bench", "run a sweep from a spec file");
    std::string bench_spec_path, bench_out;
    int bench_threads = 1;
    bench_cmd->add_option("--spec", bench_spec_path, "experiment spec (JSON)")->required();
    bench_cmd->add_option("--out", bench_out, "records file (JSON lines)")->required();
    bench_cmd->add_option("--threads", bench_threads, "worker threads");

    // --- profile -------------------------------------------------------
    auto* profile_cmd = app.add_subcommand("profile", "performance profiles from records");
    std::string profile_records_path, profile_out, metric_name = "time";
    double tau_max = 0.0;
    int tau_points = 101;
    profile_cmd->add_option("--records", profile_records_path, "records file (JSON lines)")
        ->required();
    profile_cmd->add_option("--out", profile_out, "CSV output (default stdout)");
    profile_cmd->add_option("--metric", metric_name, "time or iterations");
    profile_cmd->add_option("--tau-max", tau_max, "grid end (default: fit to data)");
    profile_cmd->add_option("--points", tau_points, "grid size");

    // --- gen -----------------------------------------------------------
    auto* gen_cmd = app.add_subcommand("gen", "emit a generated instance as .col");
    InstanceOptions gen_inst;
    add_instance_flags(*gen_cmd, gen_inst, false);
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*solve_cmd) {
            cfg.variant = parse_variant(variant_name);
            if (time_limit > 0.0) cfg.time_limit_s = time_limit;
            cfg.record_error_trace = trace;
            const NamedProblem np = build_problem(solve_inst, cfg.seed);
            const RunRecord run = solve(np.problem, cfg);

            nlohmann::ordered_json report;
            report["problem"] = np.name;
            report["vertices"] = np.problem.graph().order();
            report["edges"] = np.problem.graph().edge_count();
            report["colors"] = np.problem.color_count();
            report["variant"] = to_string(cfg.variant);
            report["lambda"] = cfg.lambda;
            report["seed"] = cfg.seed;
            report["status"] = to_string(run.status);
            report["iterations"] = run.iterations;
            report["time_s"] = run.wall_time_s;
            report["final_error"] = run.final_error;
            if (run.coloring) report["coloring"] = *run.coloring;
            if (trace) report["error_trace"] = run.error_trace;
            write_text(solve_out, report.dump(2) + "\n");
            return run.status == RunStatus::solved ? exit_solved : exit_unsolved;
        }

        if (*bench_cmd) {
            std::ifstream in(bench_spec_path);
            if (!in) throw std::runtime_error("cannot open " + bench_spec_path);
            const auto base_dir = std::filesystem::path(bench_spec_path).parent_path();
            const ExperimentSpec spec =
                parse_experiment_spec(nlohmann::json::parse(in), base_dir);

            std::ofstream out(bench_out);
            if (!out) throw std::runtime_error("cannot write " + bench_out);
            const auto records = run_experiment(spec, bench_threads, [&out](const TaggedRecord& rec) {
                out << record_to_json(rec).dump() << "\n";
                out.flush();
            });
            out.close();

            // Post-hoc verification pass over the file just written.
            std::ifstream back(bench_out);
            const VerifyReport report = verify_records(spec, read_records(back));
            if (!report.ok()) {
                for (const std::string& failure : report.failures)
                    std::cerr << "verification failure: " << failure << "\n";
                return exit_unsolved;
            }
            std::cerr << records.size() << " runs, " << report.solved_records
                      << " solved, all verified\n";
            std::cout << summary_csv(summarize(records));
            return exit_solved;
        }

        if (*profile_cmd) {
            std::ifstream in(profile_records_path);
            if (!in) throw std::runtime_error("cannot open " + profile_records_path);
            const std::vector<TaggedRecord> records = read_records(in);
            const ProfileMetric metric = [&] {
                if (metric_name == "time") return ProfileMetric::wall_time;
                if (metric_name == "iterations") return ProfileMetric::iterations;
                throw std::runtime_error("unknown metric: " + metric_name);
            }();
            if (tau_max <= 0.0) tau_max = std::max(1.5, 1.05 * max_performance_ratio(records, metric));
            const auto grid = geometric_tau_grid(tau_max, tau_points);
            const ProfileResult result = performance_profile(records, grid, metric);
            for (const std::string& dropped : result.dropped_problems)
                std::cerr << "dropped (no formulation solved it): " << dropped << "\n";
            write_text(profile_out, profile_csv(result));
            return exit_solved;
        }

        if (*gen_cmd) {
            const auto [name, graph] = build_graph(gen_inst, gen_seed);
            write_text(gen_out, serialize_dimacs(graph, name));
            return exit_solved;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace drcolor
