#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>

#include "drcolor/graph.hpp"
#include "drcolor/sym_matrix.hpp"

namespace drcolor {

/// Vertices of a standard centered regular (m-1)-simplex: m unit vectors
/// with pairwise dot products -1/(m-1) and zero sum. Built in ambient
/// dimension m as normalize(e_k - (1/m) * ones); only the Gram matrix
/// matters downstream, so no rotation into R^{m-1} is performed and no
/// code may depend on the orientation.
struct SimplexVertices {
    int color_count = 0;
    Eigen::MatrixXd vectors; // m x m, column k holds u_{k+1}
};

inline SimplexVertices simplex_vertices(int m) {
    if (m < 2) throw std::invalid_argument("simplex_vertices: need m >= 2");
    const double shift = 1.0 / m;
    Eigen::MatrixXd u(m, m);
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXd col = Eigen::VectorXd::Constant(m, -shift);
        col(k) += 1.0;
        u.col(k) = col / col.norm();
    }
    return {m, std::move(u)};
}

/// Gram matrix of the simplex encoding of a coloring: entry {i,j} is 1 when
/// c(i) = c(j) and -1/(m-1) otherwise. Entries are snapped to those exact
/// values rather than accumulated from dot products, so equal colorings give
/// bitwise-equal matrices and color permutations leave the output unchanged.
inline SymMatrix gram_from_coloring(std::span<const int> colors, int m) {
    if (m < 2) throw std::invalid_argument("gram_from_coloring: need m >= 2");
    const auto n = static_cast<Eigen::Index>(colors.size());
    if (n == 0) throw std::invalid_argument("gram_from_coloring: empty coloring");
    for (int c : colors)
        if (c < 1 || c > m) throw std::invalid_argument("gram_from_coloring: color out of range");
    const double neg = -1.0 / (m - 1);
    SymMatrix w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            w.set(i, j, colors[i] == colors[j] ? 1.0 : neg);
    return w;
}

inline SymMatrix gram_from_coloring(const Coloring& colors, int m) {
    return gram_from_coloring(std::span<const int>(colors), m);
}

} // namespace drcolor
