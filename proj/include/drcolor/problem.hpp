#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "drcolor/graph.hpp"
#include "drcolor/simplex.hpp"
#include "drcolor/sym_matrix.hpp"

namespace drcolor {

/// Raised when a precoloring is provably infeasible (equal colors across an
/// edge, or equivalently overlapping forced-one / forced-neg index sets).
class InfeasiblePrecoloring : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An m-coloring instance: graph, color count, optional precolor map
/// (vertex -> color). Contradictory precolors are rejected at construction.
class ColoringProblem {
public:
    ColoringProblem(Graph graph, int color_count, std::map<int, int> precolors = {})
        : graph_(std::move(graph)), m_(color_count), precolors_(std::move(precolors)) {
        if (m_ < 2) throw std::invalid_argument("ColoringProblem: need m >= 2");
        for (const auto& [vertex, color] : precolors_) {
            if (vertex < 0 || vertex >= graph_.order())
                throw std::invalid_argument("ColoringProblem: precolored vertex out of range");
            if (color < 1 || color > m_)
                throw std::invalid_argument("ColoringProblem: precolor out of range");
        }
        for (const Edge& e : graph_.edges()) {
            auto pu = precolors_.find(e.u);
            auto pv = precolors_.find(e.v);
            if (pu != precolors_.end() && pv != precolors_.end() && pu->second == pv->second)
                throw InfeasiblePrecoloring("ColoringProblem: adjacent vertices share a precolor");
        }
    }

    const Graph& graph() const { return graph_; }
    int color_count() const { return m_; }
    const std::map<int, int>& precolors() const { return precolors_; }

private:
    Graph graph_;
    int m_;
    std::map<int, int> precolors_;
};

/// Index sets of entries fixed by the constraint set: `ones` must equal 1
/// (the diagonal plus equal-precolor pairs) and `negs` must equal -1/(m-1)
/// (graph edges plus unequal-precolor pairs). `codes` is the same data as a
/// dense n x n lookup for the projector's inner loop.
struct ConstraintIndex {
    enum Code : std::int8_t { free_entry = 0, forced_one = 1, forced_neg = 2 };

    Eigen::Index order = 0;
    std::vector<Edge> ones;
    std::vector<Edge> negs;
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> codes;

    Code code(Eigen::Index i, Eigen::Index j) const { return static_cast<Code>(codes(i, j)); }
};

inline ConstraintIndex constraint_index(const ColoringProblem& problem) {
    const int n = problem.graph().order();
    ConstraintIndex idx;
    idx.order = n;
    idx.codes.setZero(n, n);

    auto place = [&idx](const Edge& e, ConstraintIndex::Code c) {
        if (idx.codes(e.u, e.v) != ConstraintIndex::free_entry && idx.codes(e.u, e.v) != c)
            throw InfeasiblePrecoloring("constraint_index: forced-one and forced-neg overlap");
        idx.codes(e.u, e.v) = static_cast<std::int8_t>(c);
        idx.codes(e.v, e.u) = static_cast<std::int8_t>(c);
        (c == ConstraintIndex::forced_one ? idx.ones : idx.negs).push_back(e);
    };

    for (int i = 0; i < n; ++i) place(Edge{i, i}, ConstraintIndex::forced_one);
    for (const Edge& e : problem.graph().edges()) place(e, ConstraintIndex::forced_neg);
    // Pairs of precolored vertices: equal colors pin the entry to 1,
    // different colors pin it to -1/(m-1).
    const auto& pre = problem.precolors();
    for (auto it = pre.begin(); it != pre.end(); ++it) {
        for (auto jt = std::next(it); jt != pre.end(); ++jt) {
            const Edge e = make_edge(it->first, jt->first);
            const auto code = it->second == jt->second ? ConstraintIndex::forced_one
                                                       : ConstraintIndex::forced_neg;
            if (idx.codes(e.u, e.v) == code) continue; // already forced the same way
            place(e, code);
        }
    }
    std::sort(idx.ones.begin(), idx.ones.end());
    std::sort(idx.negs.begin(), idx.negs.end());
    return idx;
}

/// True iff c is a proper coloring that also matches every precolor exactly.
inline bool verify_precolors(const ColoringProblem& problem, const Coloring& c) {
    if (!verify_coloring(problem.graph(), c)) return false;
    for (const auto& [vertex, color] : problem.precolors())
        if (c[vertex] != color) return false;
    return true;
}

enum class ExtractionFailure {
    intransitive,      // "same" relation is not an equivalence on the classes
    too_many_classes,  // more than m color classes
    improper           // induced coloring has a monochromatic edge
};

struct ExtractionResult {
    std::optional<Coloring> coloring;
    ExtractionFailure failure = ExtractionFailure::intransitive;

    explicit operator bool() const { return coloring.has_value(); }
};

namespace detail {

struct UnionFind {
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    std::vector<int> parent;
};

} // namespace detail

/// Reads a coloring out of a (near-)feasible Gram matrix. Entries above the
/// rounding threshold (m-2)/(2(m-1)) are classified "same color"; classes are
/// formed by union-find and the labeling is by first occurrence. Fails instead
/// of ever returning an improper or ambiguous coloring.
inline ExtractionResult extract_coloring(const SymMatrix& x, const ColoringProblem& problem) {
    const int n = problem.graph().order();
    const int m = problem.color_count();
    if (x.order() != n) throw std::invalid_argument("extract_coloring: order mismatch");
    const double threshold = (m - 2) / (2.0 * (m - 1));

    detail::UnionFind classes(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (x(i, j) > threshold) classes.unite(i, j);

    // A pair inside one class that was classified "different" means the
    // rounded matrix is not a Gram matrix of simplex vertices yet.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (classes.find(i) == classes.find(j) && !(x(i, j) > threshold))
                return {std::nullopt, ExtractionFailure::intransitive};

    Coloring coloring(n, 0);
    std::vector<int> label_of_root(n, 0);
    int next_label = 0;
    for (int i = 0; i < n; ++i) {
        const int root = classes.find(i);
        if (label_of_root[root] == 0) {
            if (++next_label > m) return {std::nullopt, ExtractionFailure::too_many_classes};
            label_of_root[root] = next_label;
        }
        coloring[i] = label_of_root[root];
    }

    if (!verify_coloring(problem.graph(), coloring))
        return {std::nullopt, ExtractionFailure::improper};
    return {std::move(coloring), ExtractionFailure::intransitive};
}

/// Recolors c by the color permutation sigma with sigma(c(i)) = p_i on every
/// precolored vertex; colors not pinned down are matched to the remaining
/// targets in ascending order. Returns nullopt when no such bijection exists
/// (or c is not proper), i.e. when c fails the consistency precondition.
inline std::optional<Coloring> permute_to_precolors(const Coloring& c,
                                                    const ColoringProblem& problem) {
    const int m = problem.color_count();
    if (static_cast<int>(c.size()) != problem.graph().order())
        throw std::invalid_argument("permute_to_precolors: coloring length mismatch");
    for (int color : c)
        if (color < 1 || color > m)
            throw std::invalid_argument("permute_to_precolors: color out of range");
    if (!verify_coloring(problem.graph(), c)) return std::nullopt;

    std::vector<int> sigma(m + 1, 0);         // source color -> target color
    std::vector<bool> target_used(m + 1, false);
    for (const auto& [vertex, target] : problem.precolors()) {
        const int source = c[vertex];
        if (sigma[source] == 0) {
            if (target_used[target]) return std::nullopt; // two sources, one target
            sigma[source] = target;
            target_used[target] = true;
        } else if (sigma[source] != target) {
            return std::nullopt; // one source, two targets
        }
    }
    int next_target = 1;
    for (int source = 1; source <= m; ++source) {
        if (sigma[source] != 0) continue;
        while (target_used[next_target]) ++next_target;
        sigma[source] = next_target;
        target_used[next_target] = true;
    }

    Coloring out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = sigma[c[i]];
    return out;
}

/// Full feasibility test of a matrix against the instance: every entry near
/// {1, -1/(m-1)}, forced entries correct, PSD, and rank at most m-1 -- all
/// within tol.
inline bool is_rank_feasible(const SymMatrix& x, const ColoringProblem& problem, double tol) {
    const int n = problem.graph().order();
    const int m = problem.color_count();
    if (x.order() != n) return false;
    const double neg = -1.0 / (m - 1);

    const ConstraintIndex idx = constraint_index(problem);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = x(i, j);
            switch (idx.code(i, j)) {
            case ConstraintIndex::forced_one:
                if (std::abs(v - 1.0) > tol) return false;
                break;
            case ConstraintIndex::forced_neg:
                if (std::abs(v - neg) > tol) return false;
                break;
            case ConstraintIndex::free_entry:
                if (std::abs(v - 1.0) > tol && std::abs(v - neg) > tol) return false;
                break;
            }
        }
    }

    const auto spectrum = spectral_decomposition(x).eigenvalues;
    if (spectrum(n - 1) < -tol) return false;            // PSD
    if (m - 1 < n && spectrum(m - 1) > tol) return false; // rank <= m-1
    return true;
}

} // namespace drcolor
