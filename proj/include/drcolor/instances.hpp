#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "drcolor/graph.hpp"
#include "drcolor/problem.hpp"
#include "drcolor/rng.hpp"

namespace drcolor {

/// Queens graph on the n x n board: one vertex per cell, an edge whenever two
/// cells share a row, a column, or a diagonal (both directions, any distance).
inline Graph queens_graph(int n) {
    if (n < 1) throw std::invalid_argument("queens_graph: need n >= 1");
    std::vector<Edge> edges;
    const int cells = n * n;
    for (int a = 0; a < cells; ++a) {
        const int ra = a / n, ca = a % n;
        for (int b = a + 1; b < cells; ++b) {
            const int rb = b / n, cb = b % n;
            if (ra == rb || ca == cb || std::abs(ra - rb) == std::abs(ca - cb))
                edges.push_back({a, b});
        }
    }
    return Graph(cells, std::move(edges));
}

/// Windmill graph Wd(a, b): b copies of the complete graph K_a glued at the
/// hub vertex 0. Blade t occupies vertices 1 + t(a-1) .. (t+1)(a-1).
inline Graph windmill_graph(int a, int b) {
    if (a < 2 || b < 2) throw std::invalid_argument("windmill_graph: need a, b >= 2");
    const int n = b * (a - 1) + 1;
    std::vector<Edge> edges;
    for (int blade = 0; blade < b; ++blade) {
        std::vector<int> clique{0};
        for (int i = 0; i < a - 1; ++i) clique.push_back(1 + blade * (a - 1) + i);
        for (std::size_t i = 0; i < clique.size(); ++i)
            for (std::size_t j = i + 1; j < clique.size(); ++j)
                edges.push_back({clique[i], clique[j]});
    }
    return Graph(n, std::move(edges));
}

/// Edge-density bound log m / log(m/(m-1)) at the m-colorability transition
/// of uniform random graphs.
inline double colorability_edge_density(int m) {
    if (m < 2) throw std::invalid_argument("colorability_edge_density: need m >= 2");
    return std::log(static_cast<double>(m)) /
           std::log(static_cast<double>(m) / (m - 1));
}

class GenerationInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Random m-colorable graph at the colorability transition: exactly
/// floor(density * n) edges drawn by uniform rejection over vertex pairs,
/// never joining two vertices of the same congruence class mod m. The
/// coloring c(i) = (i mod m) + 1 is proper on the output by construction.
inline Graph random_colorable_graph(int n, int m, std::uint64_t seed) {
    if (m < 2 || n < m) throw std::invalid_argument("random_colorable_graph: need n >= m >= 2");
    const long target = static_cast<long>(std::floor(colorability_edge_density(m) * n));

    long admissible = 0;
    {
        std::vector<long> class_size(m, 0);
        for (int i = 0; i < n; ++i) ++class_size[i % m];
        admissible = static_cast<long>(n) * (n - 1) / 2;
        for (long s : class_size) admissible -= s * (s - 1) / 2;
    }
    if (target > admissible)
        throw GenerationInfeasible("random_colorable_graph: fewer admissible pairs than edges");

    Rng rng(seed);
    std::set<Edge> edges;
    while (static_cast<long>(edges.size()) < target) {
        const int i = static_cast<int>(rng.below(n));
        const int j = static_cast<int>(rng.below(n));
        if (i % m == j % m) continue; // also discards i == j
        edges.insert(make_edge(i, j));
    }
    return Graph(n, {edges.begin(), edges.end()});
}

/// k^2 x k^2 Sudoku board; cells hold 0 (empty) or a digit in 1..k^2.
/// Constructed grids always have mutually consistent givens.
class SudokuGrid {
public:
    explicit SudokuGrid(int box_size = 3) : k_(check_box(box_size)) {
        cells_.assign(side() * side(), 0);
    }

    SudokuGrid(int box_size, std::vector<int> cells) : k_(check_box(box_size)) {
        const int s = side();
        if (static_cast<int>(cells.size()) != s * s)
            throw std::invalid_argument("SudokuGrid: wrong cell count");
        for (int v : cells)
            if (v < 0 || v > s) throw std::invalid_argument("SudokuGrid: cell value out of range");
        cells_ = std::move(cells);
        if (!consistent()) throw std::invalid_argument("SudokuGrid: inconsistent givens");
    }

    int box_size() const { return k_; }
    int side() const { return k_ * k_; }
    int cell(int row, int col) const { return cells_[row * side() + col]; }
    const std::vector<int>& cells() const { return cells_; }

    int given_count() const {
        int count = 0;
        for (int v : cells_) count += v != 0;
        return count;
    }

private:
    static int check_box(int k) {
        if (k < 2) throw std::invalid_argument("SudokuGrid: need box size >= 2");
        return k;
    }

    bool consistent() const {
        const int s = side();
        for (int r = 0; r < s; ++r)
            for (int c = 0; c < s; ++c) {
                const int v = cell(r, c);
                if (v == 0) continue;
                for (int c2 = c + 1; c2 < s; ++c2)
                    if (cell(r, c2) == v) return false;
                for (int r2 = r + 1; r2 < s; ++r2)
                    if (cell(r2, c) == v) return false;
                const int br = (r / k_) * k_, bc = (c / k_) * k_;
                for (int r2 = br; r2 < br + k_; ++r2)
                    for (int c2 = bc; c2 < bc + k_; ++c2)
                        if ((r2 > r || (r2 == r && c2 > c)) && cell(r2, c2) == v) return false;
            }
        return true;
    }

    int k_;
    std::vector<int> cells_;
};

/// One 81-character puzzle line ('.' or '0' for empty), top95 style.
inline SudokuGrid parse_sudoku_line(std::string_view text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    std::size_t end = text.find_last_not_of(" \t\r\n");
    std::string_view body =
        begin == std::string_view::npos ? std::string_view{} : text.substr(begin, end - begin + 1);
    if (body.size() != 81)
        throw std::invalid_argument("parse_sudoku_line: expected 81 characters, got " +
                                    std::to_string(body.size()));
    std::vector<int> cells(81, 0);
    for (std::size_t i = 0; i < 81; ++i) {
        const char ch = body[i];
        if (ch == '.' || ch == '0') continue;
        if (ch < '1' || ch > '9')
            throw std::invalid_argument(std::string("parse_sudoku_line: invalid character '") +
                                        ch + "'");
        cells[i] = ch - '0';
    }
    return SudokuGrid(3, std::move(cells));
}

/// Sudoku as a precoloring instance: one vertex per cell, edges between
/// distinct cells sharing a row, column or box, m = k^2 colors, givens as
/// precolors (digit = color).
inline ColoringProblem sudoku_problem(const SudokuGrid& grid) {
    const int s = grid.side();
    const int k = grid.box_size();
    std::vector<Edge> edges;
    for (int a = 0; a < s * s; ++a) {
        const int ra = a / s, ca = a % s;
        for (int b = a + 1; b < s * s; ++b) {
            const int rb = b / s, cb = b % s;
            const bool same_box = ra / k == rb / k && ca / k == cb / k;
            if (ra == rb || ca == cb || same_box) edges.push_back({a, b});
        }
    }
    std::map<int, int> precolors;
    for (int cell = 0; cell < s * s; ++cell)
        if (grid.cells()[cell] != 0) precolors[cell] = grid.cells()[cell];
    return ColoringProblem(Graph(s * s, std::move(edges)), s, std::move(precolors));
}

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct DimacsGraph {
    Graph graph;
    std::size_t self_loops_ignored = 0;
};

/// DIMACS .col reader: `c` comments, one `p edge N M` line, `e i j` edge
/// lines with 1-based endpoints. Repeated and reversed edges are merged;
/// self-loops are dropped but counted.
inline DimacsGraph parse_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool have_problem = false;
    int n = 0;
    std::vector<Edge> edges;
    std::size_t self_loops = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string head;
        if (!(fields >> head)) continue; // blank line
        if (head == "c") continue;
        if (head == "p") {
            if (have_problem) throw ParseError(line_no, "duplicate problem line");
            std::string format;
            long declared_edges = 0;
            if (!(fields >> format >> n >> declared_edges) || format != "edge" || n < 0)
                throw ParseError(line_no, "malformed problem line (want 'p edge N M')");
            have_problem = true;
            continue;
        }
        if (head == "e") {
            if (!have_problem) throw ParseError(line_no, "edge before problem line");
            int u = 0, v = 0;
            if (!(fields >> u >> v)) throw ParseError(line_no, "malformed edge line");
            if (u < 1 || u > n || v < 1 || v > n)
                throw ParseError(line_no, "vertex index out of range");
            if (u == v) {
                ++self_loops;
                continue;
            }
            edges.push_back(make_edge(u - 1, v - 1));
            continue;
        }
        throw ParseError(line_no, "unrecognized line type '" + head + "'");
    }
    if (!have_problem) throw ParseError(line_no, "missing problem line");
    return {Graph(n, std::move(edges)), self_loops};
}

/// Writes a graph in the .col format accepted by parse_dimacs.
inline std::string serialize_dimacs(const Graph& g, std::string_view comment = {}) {
    std::ostringstream out;
    if (!comment.empty()) out << "c " << comment << "\n";
    out << "p edge " << g.order() << " " << g.edge_count() << "\n";
    for (const Edge& e : g.edges()) out << "e " << e.u + 1 << " " << e.v + 1 << "\n";
    return out.str();
}

} // namespace drcolor
