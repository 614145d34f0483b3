#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "drcolor/dr.hpp"
#include "drcolor/instances.hpp"
#include "drcolor/problem.hpp"
#include "drcolor/rng.hpp"

namespace drcolor {

struct NamedProblem {
    std::string name;
    ColoringProblem problem;
};

/// A sweep: every config runs on every problem from `starts_per_problem`
/// starting points. Start seeds depend on (master_seed, problem, start) only,
/// so all configs compete from identical starting points.
struct ExperimentSpec {
    std::vector<NamedProblem> problems;
    std::vector<DrConfig> configs;
    int starts_per_problem = 1;
    std::uint64_t master_seed = 0;
};

inline void validate(const ExperimentSpec& spec) {
    if (spec.problems.empty()) throw std::invalid_argument("ExperimentSpec: no problems");
    if (spec.configs.empty()) throw std::invalid_argument("ExperimentSpec: no configs");
    if (spec.starts_per_problem < 1)
        throw std::invalid_argument("ExperimentSpec: starts_per_problem must be >= 1");
    for (const DrConfig& cfg : spec.configs) validate(cfg);
}

/// Human-readable formulation label, e.g. "C1C2:0.75".
inline std::string formulation_label(DrVariant variant, double lambda) {
    std::ostringstream out;
    out << to_string(variant) << ":" << lambda;
    return out.str();
}

struct TaggedRecord {
    std::string problem;
    std::size_t problem_index = 0;
    std::size_t config_index = 0;
    DrVariant variant = DrVariant::c1c2;
    double lambda = 0.75;
    int start_index = 0;
    std::uint64_t seed = 0;
    RunRecord run;

    std::string formulation() const { return formulation_label(variant, lambda); }
};

using RecordSink = std::function<void(const TaggedRecord&)>;

/// Runs the sweep. Tasks are independent and may be spread over `threads`
/// workers; records are delivered to `sink` (and returned) in the canonical
/// (problem, config, start) order regardless of completion order, so record
/// files are reproducible.
inline std::vector<TaggedRecord> run_experiment(const ExperimentSpec& spec, int threads = 1,
                                                const RecordSink& sink = {}) {
    validate(spec);
    struct Task {
        std::size_t problem_index, config_index;
        int start_index;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < spec.problems.size(); ++p)
        for (std::size_t c = 0; c < spec.configs.size(); ++c)
            for (int s = 0; s < spec.starts_per_problem; ++s) tasks.push_back({p, c, s});

    std::vector<std::optional<TaggedRecord>> slots(tasks.size());
    std::atomic<std::size_t> next_task{0};
    std::atomic<bool> abort{false};
    std::mutex flush_mutex;
    std::size_t next_flush = 0;
    std::exception_ptr first_error;
    std::vector<TaggedRecord> out(tasks.size(), TaggedRecord{});

    auto worker = [&] {
        for (;;) {
            if (abort.load(std::memory_order_relaxed)) return;
            const std::size_t t = next_task.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task task = tasks[t];
            try {
                const NamedProblem& np = spec.problems[task.problem_index];
                DrConfig cfg = spec.configs[task.config_index];
                cfg.seed = derive_seed(spec.master_seed, task.problem_index,
                                       static_cast<std::uint64_t>(task.start_index));
                TaggedRecord rec{np.name,    task.problem_index, task.config_index,
                                 cfg.variant, cfg.lambda,        task.start_index,
                                 cfg.seed,    solve(np.problem, cfg)};
                std::lock_guard<std::mutex> lock(flush_mutex);
                slots[t] = std::move(rec);
                while (next_flush < slots.size() && slots[next_flush]) {
                    out[next_flush] = std::move(*slots[next_flush]);
                    if (sink) sink(out[next_flush]);
                    slots[next_flush].reset();
                    ++next_flush;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(flush_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const int worker_count =
        std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

// ---------------------------------------------------------------------------
// Records as JSON lines
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json record_to_json(const TaggedRecord& rec, bool include_time = true) {
    nlohmann::ordered_json j;
    j["problem"] = rec.problem;
    j["variant"] = to_string(rec.variant);
    j["lambda"] = rec.lambda;
    j["seed"] = rec.seed;
    j["start"] = rec.start_index;
    j["status"] = to_string(rec.run.status);
    j["iterations"] = rec.run.iterations;
    if (include_time) j["time_s"] = rec.run.wall_time_s;
    j["final_error"] = rec.run.final_error;
    if (rec.run.coloring) j["coloring"] = *rec.run.coloring;
    j["problem_index"] = rec.problem_index;
    j["config_index"] = rec.config_index;
    return j;
}

inline TaggedRecord record_from_json(const nlohmann::json& j) {
    TaggedRecord rec;
    rec.problem = j.at("problem").get<std::string>();
    rec.variant = parse_variant(j.at("variant").get<std::string>());
    rec.lambda = j.at("lambda").get<double>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.start_index = j.at("start").get<int>();
    rec.run.status = parse_status(j.at("status").get<std::string>());
    rec.run.iterations = j.at("iterations").get<long>();
    rec.run.wall_time_s = j.value("time_s", 0.0);
    rec.run.final_error = j.at("final_error").get<double>();
    if (j.contains("coloring")) rec.run.coloring = j.at("coloring").get<Coloring>();
    rec.problem_index = j.value("problem_index", std::size_t{0});
    rec.config_index = j.value("config_index", std::size_t{0});
    return rec;
}

inline std::string records_to_jsonl(std::span<const TaggedRecord> records,
                                    bool include_time = true) {
    std::string out;
    for (const TaggedRecord& rec : records) {
        out += record_to_json(rec, include_time).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<TaggedRecord> read_records(std::istream& in) {
    std::vector<TaggedRecord> records;
    // Files written by other tools may lack the internal grouping indexes;
    // synthesize them from first occurrences of the visible fields.
    std::map<std::string, std::size_t> problem_ids;
    std::map<std::pair<std::string, double>, std::size_t> config_ids;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = nlohmann::json::parse(line);
        TaggedRecord rec = record_from_json(j);
        if (!j.contains("problem_index"))
            rec.problem_index =
                problem_ids.try_emplace(rec.problem, problem_ids.size()).first->second;
        if (!j.contains("config_index"))
            rec.config_index =
                config_ids
                    .try_emplace({std::string(to_string(rec.variant)), rec.lambda},
                                 config_ids.size())
                    .first->second;
        records.push_back(std::move(rec));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

struct SummaryRow {
    std::string problem;
    DrVariant variant = DrVariant::c1c2;
    double lambda = 0.75;
    int starts = 0;
    int solved = 0;
    // Statistics over solved runs only; NaN when nothing solved.
    double mean_iterations = std::numeric_limits<double>::quiet_NaN();
    double median_iterations = std::numeric_limits<double>::quiet_NaN();
    double mean_time_s = std::numeric_limits<double>::quiet_NaN();
    double median_time_s = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace detail

/// Per-(config, problem) success counts and solved-run statistics, in first
/// encounter order.
inline std::vector<SummaryRow> summarize(std::span<const TaggedRecord> records) {
    std::vector<std::pair<std::size_t, std::size_t>> keys; // (config, problem)
    std::map<std::pair<std::size_t, std::size_t>, std::vector<const TaggedRecord*>> groups;
    for (const TaggedRecord& rec : records) {
        const auto key = std::make_pair(rec.config_index, rec.problem_index);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(&rec);
    }

    std::vector<SummaryRow> rows;
    for (const auto& key : keys) {
        const auto& group = groups.at(key);
        SummaryRow row;
        row.problem = group.front()->problem;
        row.variant = group.front()->variant;
        row.lambda = group.front()->lambda;
        row.starts = static_cast<int>(group.size());
        std::vector<double> iterations, times;
        for (const TaggedRecord* rec : group) {
            if (rec->run.status != RunStatus::solved) continue;
            iterations.push_back(static_cast<double>(rec->run.iterations));
            times.push_back(rec->run.wall_time_s);
        }
        row.solved = static_cast<int>(iterations.size());
        if (!iterations.empty()) {
            row.mean_iterations = detail::mean_of(iterations);
            row.median_iterations = detail::median_of(iterations);
            row.mean_time_s = detail::mean_of(times);
            row.median_time_s = detail::median_of(times);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string summary_csv(std::span<const SummaryRow> rows) {
    std::ostringstream out;
    out << "problem,variant,lambda,starts,solved,mean_iterations,median_iterations,"
           "mean_time_s,median_time_s\n";
    auto field = [&out](double v) {
        if (std::isnan(v))
            out << "-";
        else
            out << v;
    };
    for (const SummaryRow& row : rows) {
        out << row.problem << "," << to_string(row.variant) << "," << row.lambda << ","
            << row.starts << "," << row.solved << ",";
        field(row.mean_iterations);
        out << ",";
        field(row.median_iterations);
        out << ",";
        field(row.mean_time_s);
        out << ",";
        field(row.median_time_s);
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Performance profiles
// ---------------------------------------------------------------------------

enum class ProfileMetric { wall_time, iterations };

struct ProfilePoint {
    double tau = 1.0;
    double rho = 0.0;
};

struct ProfileCurve {
    std::string formulation;
    std::vector<ProfilePoint> points;
};

struct ProfileResult {
    std::vector<ProfileCurve> curves;
    std::size_t problem_count = 0; // N after dropping universally unsolved problems
    std::vector<std::string> dropped_problems;
};

/// Performance profile rho_f(tau) = (1/N) sum over problems where f's mean
/// solved cost is within factor tau of the best formulation's, weighted by
/// f's success fraction. Problems no formulation solved are dropped from N.
inline ProfileResult performance_profile(std::span<const TaggedRecord> records,
                                         std::span<const double> tau_grid,
                                         ProfileMetric metric = ProfileMetric::wall_time) {
    if (records.empty()) throw std::invalid_argument("performance_profile: no records");
    if (tau_grid.empty()) throw std::invalid_argument("performance_profile: empty tau grid");
    for (std::size_t i = 0; i < tau_grid.size(); ++i)
        if (tau_grid[i] < 1.0 || (i > 0 && tau_grid[i] < tau_grid[i - 1]))
            throw std::invalid_argument("performance_profile: grid must ascend from tau >= 1");

    struct Cell {
        int runs = 0, solved = 0;
        double cost_sum = 0.0;
        double success() const { return static_cast<double>(solved) / runs; }
        double mean_cost() const { return cost_sum / solved; }
    };
    std::map<std::size_t, std::string> formulations;       // config index -> label
    std::map<std::size_t, std::string> problems;           // problem index -> name
    std::map<std::pair<std::size_t, std::size_t>, Cell> cells; // (config, problem)
    for (const TaggedRecord& rec : records) {
        formulations.try_emplace(rec.config_index, rec.formulation());
        problems.try_emplace(rec.problem_index, rec.problem);
        Cell& cell = cells[{rec.config_index, rec.problem_index}];
        ++cell.runs;
        if (rec.run.status == RunStatus::solved) {
            ++cell.solved;
            cell.cost_sum += metric == ProfileMetric::wall_time
                                 ? rec.run.wall_time_s
                                 : static_cast<double>(rec.run.iterations);
        }
    }

    // Best mean cost per problem among formulations that solved it at least once.
    std::map<std::size_t, double> best_cost;
    for (const auto& [key, cell] : cells)
        if (cell.solved > 0) {
            auto [it, inserted] = best_cost.try_emplace(key.second, cell.mean_cost());
            if (!inserted) it->second = std::min(it->second, cell.mean_cost());
        }

    ProfileResult result;
    result.problem_count = best_cost.size();
    for (const auto& [index, name] : problems)
        if (!best_cost.contains(index)) result.dropped_problems.push_back(name);
    if (result.problem_count == 0)
        throw std::invalid_argument("performance_profile: no problem was solved by any config");

    for (const auto& [config_index, label] : formulations) {
        ProfileCurve curve{label, {}};
        for (double tau : tau_grid) {
            double sum = 0.0;
            for (const auto& [problem_index, best] : best_cost) {
                auto it = cells.find({config_index, problem_index});
                if (it == cells.end() || it->second.solved == 0) continue;
                if (it->second.mean_cost() <= tau * best) sum += it->second.success();
            }
            curve.points.push_back({tau, sum / static_cast<double>(result.problem_count)});
        }
        result.curves.push_back(std::move(curve));
    }
    return result;
}

inline std::string profile_csv(const ProfileResult& result) {
    std::ostringstream out;
    out << "formulation,tau,rho\n";
    for (const ProfileCurve& curve : result.curves)
        for (const ProfilePoint& point : curve.points)
            out << curve.formulation << "," << point.tau << "," << point.rho << "\n";
    return out.str();
}

/// Largest cost ratio t_{f,p} / t*_p present in the records; 1.0 when every
/// formulation is best everywhere. Useful for sizing a tau grid.
inline double max_performance_ratio(std::span<const TaggedRecord> records,
                                    ProfileMetric metric = ProfileMetric::wall_time) {
    struct Cell {
        int solved = 0;
        double cost_sum = 0.0;
    };
    std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
    for (const TaggedRecord& rec : records) {
        if (rec.run.status != RunStatus::solved) continue;
        Cell& cell = cells[{rec.config_index, rec.problem_index}];
        ++cell.solved;
        cell.cost_sum += metric == ProfileMetric::wall_time
                             ? rec.run.wall_time_s
                             : static_cast<double>(rec.run.iterations);
    }
    std::map<std::size_t, double> best;
    for (const auto& [key, cell] : cells) {
        const double mean = cell.cost_sum / cell.solved;
        auto [it, inserted] = best.try_emplace(key.second, mean);
        if (!inserted) it->second = std::min(it->second, mean);
    }
    double ratio = 1.0;
    for (const auto& [key, cell] : cells) {
        const double mean = cell.cost_sum / cell.solved;
        if (best.at(key.second) > 0.0) ratio = std::max(ratio, mean / best.at(key.second));
    }
    return ratio;
}

/// Geometric tau grid from 1 to tau_max inclusive.
inline std::vector<double> geometric_tau_grid(double tau_max, int points) {
    if (tau_max < 1.0 || points < 2)
        throw std::invalid_argument("geometric_tau_grid: need tau_max >= 1 and points >= 2");
    std::vector<double> grid(points);
    const double step = std::log(tau_max) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = std::exp(step * i);
    grid.front() = 1.0;
    grid.back() = tau_max;
    return grid;
}

// ---------------------------------------------------------------------------
// Experiment spec files
// ---------------------------------------------------------------------------

/// Builds a problem from its description in a bench spec document.
inline NamedProblem problem_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir) {
    const std::string kind = j.at("kind").get<std::string>();
    auto name_or = [&j](const std::string& fallback) {
        return j.value("name", fallback);
    };
    if (kind == "queens") {
        const int n = j.at("n").get<int>();
        const int colors = j.at("colors").get<int>();
        return {name_or("queens" + std::to_string(n)),
                ColoringProblem(queens_graph(n), colors)};
    }
    if (kind == "windmill") {
        const int a = j.at("a").get<int>();
        const int b = j.at("b").get<int>();
        const int colors = j.value("colors", a);
        return {name_or("wd_" + std::to_string(a) + "_" + std::to_string(b)),
                ColoringProblem(windmill_graph(a, b), colors)};
    }
    if (kind == "random") {
        const int n = j.at("n").get<int>();
        const int m = j.at("m").get<int>();
        const auto seed = j.value("seed", std::uint64_t{0});
        const int colors = j.value("colors", m);
        return {name_or("rand_" + std::to_string(n) + "_" + std::to_string(m) + "_s" +
                        std::to_string(seed)),
                ColoringProblem(random_colorable_graph(n, m, seed), colors)};
    }
    if (kind == "dimacs") {
        const auto path = base_dir / j.at("path").get<std::string>();
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        const int colors = j.at("colors").get<int>();
        return {name_or(path.stem().string()),
                ColoringProblem(parse_dimacs(text.str()).graph, colors)};
    }
    if (kind == "sudoku") {
        const auto grid = parse_sudoku_line(j.at("line").get<std::string>());
        return {name_or("sudoku"), sudoku_problem(grid)};
    }
    throw std::invalid_argument("unknown problem kind: " + kind);
}

/// Parses a declarative bench spec: problems, configs (variant plus a lambda
/// or a lambda list), starts, budgets and the master seed. Paths inside the
/// document resolve relative to `base_dir`.
inline ExperimentSpec parse_experiment_spec(const nlohmann::json& j,
                                            const std::filesystem::path& base_dir = ".") {
    ExperimentSpec spec;
    spec.master_seed = j.value("master_seed", std::uint64_t{0});
    spec.starts_per_problem = j.value("starts", 1);

    DrConfig defaults;
    defaults.divergence_check = false; // reproduction sweeps leave it off
    if (j.contains("defaults")) {
        const auto& d = j.at("defaults");
        defaults.tol = d.value("tol", defaults.tol);
        defaults.max_iter = d.value("max_iter", defaults.max_iter);
        if (d.contains("time_limit_s") && !d.at("time_limit_s").is_null())
            defaults.time_limit_s = d.at("time_limit_s").get<double>();
        defaults.divergence_check = d.value("divergence_check", defaults.divergence_check);
    }

    for (const auto& cj : j.at("configs")) {
        DrConfig cfg = defaults;
        cfg.variant = parse_variant(cj.at("variant").get<std::string>());
        cfg.tol = cj.value("tol", cfg.tol);
        cfg.max_iter = cj.value("max_iter", cfg.max_iter);
        if (cj.contains("time_limit_s") && !cj.at("time_limit_s").is_null())
            cfg.time_limit_s = cj.at("time_limit_s").get<double>();
        cfg.divergence_check = cj.value("divergence_check", cfg.divergence_check);

        const auto& lam = cj.at("lambda");
        if (lam.is_array()) {
            for (const auto& value : lam) {
                cfg.lambda = value.get<double>();
                spec.configs.push_back(cfg);
            }
        } else {
            cfg.lambda = lam.get<double>();
            spec.configs.push_back(cfg);
        }
    }

    for (const auto& pj : j.at("problems")) spec.problems.push_back(problem_from_json(pj, base_dir));
    validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Post-hoc verification
// ---------------------------------------------------------------------------

struct VerifyReport {
    std::size_t records_checked = 0;
    std::size_t solved_records = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// Re-checks every solved record in a records file against an independent
/// verifier: the embedded coloring must satisfy the named problem's edges and
/// precolors, and solved records must carry a coloring.
inline VerifyReport verify_records(const ExperimentSpec& spec,
                                   std::span<const TaggedRecord> records) {
    std::map<std::string, const ColoringProblem*> by_name;
    for (const NamedProblem& np : spec.problems) by_name[np.name] = &np.problem;

    VerifyReport report;
    for (const TaggedRecord& rec : records) {
        ++report.records_checked;
        if (rec.run.status != RunStatus::solved) {
            if (rec.run.coloring)
                report.failures.push_back(rec.problem + ": unsolved record carries a coloring");
            continue;
        }
        ++report.solved_records;
        auto it = by_name.find(rec.problem);
        if (it == by_name.end()) {
            report.failures.push_back(rec.problem + ": unknown problem name");
            continue;
        }
        if (!rec.run.coloring) {
            report.failures.push_back(rec.problem + ": solved record without coloring");
            continue;
        }
        if (!verify_precolors(*it->second, *rec.run.coloring))
            report.failures.push_back(rec.problem + ": coloring fails verification");
    }
    return report;
}

} // namespace drcolor
