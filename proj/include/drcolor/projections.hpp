#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <utility>

#include "drcolor/problem.hpp"
#include "drcolor/sym_matrix.hpp"

namespace drcolor {

/// Projection onto the combinatorial set: every entry is rounded to 1 or
/// -1/(m-1). Forced entries go to their forced value; a free entry goes to 1
/// exactly when it exceeds the midpoint (m-2)/(2(m-1)). Ties take the
/// -1/(m-1) branch, fixing one element of the multivalued projector.
inline SymMatrix project_c1(const SymMatrix& x, const ConstraintIndex& idx, int m) {
    if (m < 2) throw std::invalid_argument("project_c1: need m >= 2");
    if (x.order() != idx.order) throw std::invalid_argument("project_c1: order mismatch");
    const double neg = -1.0 / (m - 1);
    const double threshold = (m - 2) / (2.0 * (m - 1));
    const Eigen::Index n = x.order();
    SymMatrix out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            double value;
            switch (idx.code(i, j)) {
            case ConstraintIndex::forced_one: value = 1.0; break;
            case ConstraintIndex::forced_neg: value = neg; break;
            default: value = x(i, j) > threshold ? 1.0 : neg; break;
            }
            out.set(i, j, value);
        }
    }
    return out;
}

/// Projection onto the spectral set (PSD with rank at most m-1): keep the
/// m-1 largest eigenvalues clamped at zero, drop the rest, reconstruct and
/// re-symmetrize. Under eigenvalue degeneracy at the cutoff the backend's
/// deterministic ordering decides which eigenvectors survive; any such choice
/// is a valid projection.
inline SymMatrix project_c2(const SymMatrix& x, int m) {
    if (m < 2) throw std::invalid_argument("project_c2: need m >= 2");
    const Eigen::Index n = x.order();
    const SpectralDecomp decomp = spectral_decomposition(x);
    const Eigen::Index keep = std::min<Eigen::Index>(m - 1, n);
    const Eigen::VectorXd top = decomp.eigenvalues.head(keep).cwiseMax(0.0);
    const auto basis = decomp.eigenvectors.leftCols(keep);
    return symmetrize(basis * top.asDiagonal() * basis.transpose());
}

/// Reflector 2P - Id for any projector on any point type with linear ops.
template <class Projector, class Point>
Point reflect(Projector&& projector, const Point& x) {
    return 2.0 * projector(x) - x;
}

/// Point of the two-fold product space; block x1 feeds the combinatorial
/// constraint and block x2 the spectral one.
struct ProductPoint {
    SymMatrix x1;
    SymMatrix x2;

    static ProductPoint replicate(const SymMatrix& x) { return {x, x}; }

    Eigen::Index order() const {
        if (x1.order() != x2.order())
            throw std::invalid_argument("ProductPoint: block order mismatch");
        return x1.order();
    }

    ProductPoint& operator+=(const ProductPoint& rhs) {
        x1 += rhs.x1;
        x2 += rhs.x2;
        return *this;
    }
    ProductPoint& operator-=(const ProductPoint& rhs) {
        x1 -= rhs.x1;
        x2 -= rhs.x2;
        return *this;
    }
    ProductPoint& operator*=(double s) {
        x1 *= s;
        x2 *= s;
        return *this;
    }
    friend ProductPoint operator+(ProductPoint lhs, const ProductPoint& rhs) { return lhs += rhs; }
    friend ProductPoint operator-(ProductPoint lhs, const ProductPoint& rhs) { return lhs -= rhs; }
    friend ProductPoint operator*(double s, ProductPoint p) { return p *= s; }
    friend ProductPoint operator*(ProductPoint p, double s) { return p *= s; }
};

inline double frobenius_norm(const ProductPoint& p) {
    return std::hypot(frobenius_norm(p.x1), frobenius_norm(p.x2));
}

/// Blockwise projection onto C = C1 x C2.
inline ProductPoint project_product_c(const ProductPoint& p, const ConstraintIndex& idx, int m) {
    p.order(); // validates matching blocks
    return {project_c1(p.x1, idx, m), project_c2(p.x2, m)};
}

/// Projection onto the diagonal D: both blocks replaced by their average.
inline ProductPoint project_product_d(const ProductPoint& p) {
    p.order();
    SymMatrix average = 0.5 * (p.x1 + p.x2);
    return {average, average};
}

} // namespace drcolor
