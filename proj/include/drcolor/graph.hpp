#pragma once

#include <algorithm>
#include <compare>
#include <stdexcept>
#include <vector>

namespace drcolor {

/// Unordered vertex pair, stored with u <= v. Graph edges always have u < v;
/// constraint indices additionally use diagonal pairs {i,i}.
struct Edge {
    int u = 0;
    int v = 0;
    auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(int a, int b) { return a <= b ? Edge{a, b} : Edge{b, a}; }

/// Simple undirected graph on vertices 0..n-1 with a deduplicated edge set.
class Graph {
public:
    Graph(int order, std::vector<Edge> edges) : n_(order), edges_(std::move(edges)) {
        if (n_ < 0) throw std::invalid_argument("Graph: negative order");
        for (Edge& e : edges_) {
            e = make_edge(e.u, e.v);
            if (e.u == e.v) throw std::invalid_argument("Graph: self-loop");
            if (e.u < 0 || e.v >= n_) throw std::invalid_argument("Graph: endpoint out of range");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    int order() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_edge(int a, int b) const {
        return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
    }

private:
    int n_;
    std::vector<Edge> edges_;
};

/// Vertex coloring; colors[v] is the color of vertex v, in 1..m.
using Coloring = std::vector<int>;

/// True iff no edge is monochromatic.
inline bool verify_coloring(const Graph& g, const Coloring& c) {
    if (static_cast<int>(c.size()) != g.order())
        throw std::invalid_argument("verify_coloring: coloring length != graph order");
    for (const Edge& e : g.edges())
        if (c[e.u] == c[e.v]) return false;
    return true;
}

} // namespace drcolor
