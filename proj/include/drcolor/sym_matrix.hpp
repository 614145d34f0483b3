#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace drcolor {

/// Dense real symmetric matrix under the Frobenius inner product.
///
/// Symmetry is maintained exactly (bitwise) by construction: every mutation
/// writes both (i,j) and (j,i), and arithmetic combines entries entrywise so
/// that mirrored entries go through identical floating-point operations.
class SymMatrix {
public:
    explicit SymMatrix(Eigen::Index order)
        : data_(Eigen::MatrixXd::Zero(check_order(order), order)) {}

    static SymMatrix identity(Eigen::Index order) {
        SymMatrix x(order);
        x.data_.setIdentity();
        return x;
    }

    Eigen::Index order() const { return data_.rows(); }

    double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

    /// Writes entry {i,j} and its mirror.
    void set(Eigen::Index i, Eigen::Index j, double value) {
        data_(i, j) = value;
        data_(j, i) = value;
    }

    const Eigen::MatrixXd& dense() const { return data_; }

    SymMatrix& operator+=(const SymMatrix& rhs) {
        require_same_order(rhs);
        data_ += rhs.data_;
        return *this;
    }
    SymMatrix& operator-=(const SymMatrix& rhs) {
        require_same_order(rhs);
        data_ -= rhs.data_;
        return *this;
    }
    SymMatrix& operator*=(double s) {
        data_ *= s;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) { return lhs += rhs; }
    friend SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) { return lhs -= rhs; }
    friend SymMatrix operator*(double s, SymMatrix x) { return x *= s; }
    friend SymMatrix operator*(SymMatrix x, double s) { return x *= s; }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.data_.rows() == b.data_.rows() && a.data_ == b.data_;
    }

    /// Trusted construction from an already-symmetric dense matrix.
    /// Callers must guarantee exact symmetry (see symmetrize()).
    static SymMatrix from_symmetric_unchecked(Eigen::MatrixXd m) {
        SymMatrix x;
        x.data_ = std::move(m);
        return x;
    }

private:
    SymMatrix() = default;

    static Eigen::Index check_order(Eigen::Index order) {
        if (order < 1) throw std::invalid_argument("SymMatrix: order must be >= 1");
        return order;
    }
    void require_same_order(const SymMatrix& rhs) const {
        if (rhs.order() != order()) throw std::invalid_argument("SymMatrix: order mismatch");
    }

    Eigen::MatrixXd data_;
};

inline double frobenius_norm(const SymMatrix& x) { return x.dense().norm(); }

/// (X + X^T)/2 of a square matrix. Idempotent on symmetric input and the
/// canonical way to re-enter the symmetric subspace after a lossy operation
/// (e.g. an eigenvector reconstruction).
inline SymMatrix symmetrize(const Eigen::MatrixXd& x) {
    if (x.rows() != x.cols()) throw std::invalid_argument("symmetrize: matrix must be square");
    // IEEE addition commutes, so (x_ij + x_ji)/2 and (x_ji + x_ij)/2 round
    // identically and the result is bitwise symmetric.
    Eigen::MatrixXd s = 0.5 * (x + x.transpose());
    return SymMatrix::from_symmetric_unchecked(std::move(s));
}

/// Full spectrum of a symmetric matrix, eigenvalues sorted descending,
/// eigenvector column k paired with eigenvalue k.
struct SpectralDecomp {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

namespace detail {

/// Fallback for the rare QL non-convergence on strongly degenerate spectra:
/// shift the matrix until positive definite, where the (always-converging)
/// two-sided Jacobi SVD coincides with the eigendecomposition, then shift
/// the eigenvalues back. Singular values arrive descending already.
inline SpectralDecomp spectral_via_jacobi(const Eigen::MatrixXd& x) {
    const double shift = x.norm() + 1.0;
    const Eigen::MatrixXd shifted =
        x + shift * Eigen::MatrixXd::Identity(x.rows(), x.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullU);
    SpectralDecomp d;
    d.eigenvalues = svd.singularValues().array() - shift;
    d.eigenvectors = svd.matrixU();
    return d;
}

} // namespace detail

inline SpectralDecomp spectral_decomposition(const SymMatrix& x) {
    if (!x.dense().allFinite())
        throw std::runtime_error("spectral_decomposition: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense());
    if (solver.info() != Eigen::Success) return detail::spectral_via_jacobi(x.dense());
    // Eigen returns ascending order; flip to descending.
    SpectralDecomp d;
    d.eigenvalues = solver.eigenvalues().reverse();
    d.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return d;
}

} // namespace drcolor
