#pragma once

#include <cctype>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drcolor/problem.hpp"
#include "drcolor/projections.hpp"
#include "drcolor/rng.hpp"
#include "drcolor/sym_matrix.hpp"

namespace drcolor {

/// Operator wiring. C1C2 iterates T_{C1,C2} in the matrix space, C2C1 swaps
/// the roles; DC and CD run in the two-fold product space with the diagonal
/// set D and the product set C = C1 x C2.
enum class DrVariant { c1c2, c2c1, dc, cd };

inline std::string_view to_string(DrVariant v) {
    switch (v) {
    case DrVariant::c1c2: return "C1C2";
    case DrVariant::c2c1: return "C2C1";
    case DrVariant::dc: return "DC";
    case DrVariant::cd: return "CD";
    }
    return "?";
}

inline DrVariant parse_variant(std::string_view text) {
    std::string s(text);
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (s == "C1C2") return DrVariant::c1c2;
    if (s == "C2C1") return DrVariant::c2c1;
    if (s == "DC") return DrVariant::dc;
    if (s == "CD") return DrVariant::cd;
    throw std::invalid_argument("unknown DR variant: " + std::string(text));
}

struct DrConfig {
    DrVariant variant = DrVariant::c1c2;
    double lambda = 0.75;
    double tol = 1e-10;
    long max_iter = 100000;
    std::optional<double> time_limit_s{};
    std::uint64_t seed = 0;
    bool record_error_trace = false;
    /// Advisory blow-up detector; keep off when reproducing reference runs.
    bool divergence_check = true;
};

inline void validate(const DrConfig& cfg) {
    if (!(cfg.lambda > 0.0 && cfg.lambda < 2.0))
        throw std::invalid_argument("DrConfig: lambda must lie in (0, 2)");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("DrConfig: tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("DrConfig: max_iter must be positive");
    if (cfg.time_limit_s && !(*cfg.time_limit_s > 0.0))
        throw std::invalid_argument("DrConfig: time limit must be positive");
}

enum class RunStatus { solved, max_iter, timeout, diverged };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
    case RunStatus::solved: return "solved";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::timeout: return "timeout";
    case RunStatus::diverged: return "diverged";
    }
    return "?";
}

inline RunStatus parse_status(std::string_view text) {
    if (text == "solved") return RunStatus::solved;
    if (text == "max_iter") return RunStatus::max_iter;
    if (text == "timeout") return RunStatus::timeout;
    if (text == "diverged") return RunStatus::diverged;
    throw std::invalid_argument("unknown run status: " + std::string(text));
}

/// Outcome of one solver run. `status == solved` holds exactly when
/// `coloring` is present, and the engine only stores colorings that passed
/// verify_precolors.
struct RunRecord {
    RunStatus status = RunStatus::max_iter;
    long iterations = 0;
    double wall_time_s = 0.0;
    double final_error = 0.0;
    std::optional<Coloring> coloring{};
    std::vector<double> error_trace{};
};

/// One relaxed step x + lambda * (P_B(2 P_A(x) - x) - P_A(x)), with the two
/// projections exposed for error monitoring.
template <class Point>
struct DrStep {
    Point next;
    Point a; // P_A(x)
    Point b; // P_B(2a - x)
};

template <class Point, class ProjectA, class ProjectB>
DrStep<Point> dr_step(const Point& x, ProjectA&& project_a, ProjectB&& project_b, double lambda) {
    Point a = project_a(x);
    Point b = project_b(2.0 * a - x);
    Point next = x + lambda * (b - a);
    return {std::move(next), std::move(a), std::move(b)};
}

/// ||P_B(P_A(x)) - P_A(x)||_F, the stopping-rule error, given a = P_A(x).
inline double error_metric(const SymMatrix& a, const SymMatrix& pb_of_a) {
    return frobenius_norm(pb_of_a - a);
}
inline double error_metric(const ProductPoint& a, const ProductPoint& pb_of_a) {
    return frobenius_norm(pb_of_a - a);
}

/// Heuristic infeasibility signal: the latest iterate norm left the ball of
/// radius 1e6 * (1 + n). In the convex case disjoint sets force the iterates
/// to infinity; on nonconvex instances this is advisory only.
inline bool divergence_check(std::span<const double> iterate_norms, Eigen::Index order) {
    if (iterate_norms.size() < 2) return false;
    return iterate_norms.back() > 1e6 * (1.0 + static_cast<double>(order));
}

namespace detail {

/// Shared DR loop. `candidate_of` maps a = P_A(x) to the matrix handed to
/// extraction (identity in the matrix space, first block in product space).
template <class Point, class ProjectA, class ProjectB, class CandidateOf>
RunRecord dr_solve_loop(const ColoringProblem& problem, const DrConfig& cfg, Point x,
                        ProjectA project_a, ProjectB project_b, CandidateOf candidate_of) {
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    const Eigen::Index n = problem.graph().order();

    RunRecord rec;
    auto finish = [&](RunStatus status) {
        rec.status = status;
        rec.wall_time_s = std::chrono::duration<double>(clock::now() - started).count();
        return rec;
    };

    std::vector<double> norm_trace;
    for (long k = 0;; ++k) {
        Point a = project_a(x);
        Point pb_of_a = project_b(a);
        const double err = error_metric(a, pb_of_a);
        rec.iterations = k;
        rec.final_error = err;
        if (cfg.record_error_trace) rec.error_trace.push_back(err);

        if (err <= cfg.tol) {
            // Candidate extraction happens only at tolerance hits; a hit whose
            // rounding fails verification does not stop the run.
            if (ExtractionResult extracted = extract_coloring(candidate_of(a), problem)) {
                if (auto permuted = permute_to_precolors(*extracted.coloring, problem)) {
                    if (verify_precolors(problem, *permuted)) {
                        rec.coloring = std::move(permuted);
                        return finish(RunStatus::solved);
                    }
                }
            }
        }
        if (k >= cfg.max_iter) return finish(RunStatus::max_iter);
        if (cfg.time_limit_s &&
            std::chrono::duration<double>(clock::now() - started).count() > *cfg.time_limit_s)
            return finish(RunStatus::timeout);

        Point b = project_b(2.0 * a - x);
        x += cfg.lambda * (b - a);

        if (cfg.divergence_check) {
            norm_trace.push_back(frobenius_norm(x));
            if (norm_trace.size() > 16) norm_trace.erase(norm_trace.begin());
            if (divergence_check(norm_trace, n)) return finish(RunStatus::diverged);
        }
    }
}

} // namespace detail

/// Random symmetric starting point with entries drawn i.i.d. uniform on
/// [-1, 1] and then symmetrized; scale matches the constraint sets.
inline SymMatrix random_start(Eigen::Index order, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd a(order, order);
    for (Eigen::Index i = 0; i < order; ++i)
        for (Eigen::Index j = 0; j < order; ++j) a(i, j) = rng.uniform_symmetric();
    return symmetrize(a);
}

/// Full solve from an explicit starting point (product-space wirings
/// replicate it into both blocks).
inline RunRecord solve(const ColoringProblem& problem, const DrConfig& cfg,
                       const SymMatrix& start) {
    validate(cfg);
    if (start.order() != problem.graph().order())
        throw std::invalid_argument("solve: starting point order mismatch");
    const ConstraintIndex idx = constraint_index(problem);
    const int m = problem.color_count();

    auto pc1 = [&idx, m](const SymMatrix& y) { return project_c1(y, idx, m); };
    auto pc2 = [m](const SymMatrix& y) { return project_c2(y, m); };
    auto pc = [&idx, m](const ProductPoint& p) { return project_product_c(p, idx, m); };
    auto pd = [](const ProductPoint& p) { return project_product_d(p); };
    auto self = [](const SymMatrix& a) -> const SymMatrix& { return a; };
    auto first_block = [](const ProductPoint& a) -> const SymMatrix& { return a.x1; };

    switch (cfg.variant) {
    case DrVariant::c1c2:
        return detail::dr_solve_loop(problem, cfg, start, pc1, pc2, self);
    case DrVariant::c2c1:
        return detail::dr_solve_loop(problem, cfg, start, pc2, pc1, self);
    case DrVariant::dc:
        return detail::dr_solve_loop(problem, cfg, ProductPoint::replicate(start), pd, pc,
                                     first_block);
    case DrVariant::cd:
        return detail::dr_solve_loop(problem, cfg, ProductPoint::replicate(start), pc, pd,
                                     first_block);
    }
    throw std::logic_error("solve: unreachable variant");
}

/// Full solve from the seeded random start.
inline RunRecord solve(const ColoringProblem& problem, const DrConfig& cfg) {
    return solve(problem, cfg, random_start(problem.graph().order(), cfg.seed));
}

} // namespace drcolor
