#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "skillforge/trajectory.hpp"

namespace skillforge {

/// Dense symmetric matrix. The half-bandwidth is detected on construction so
/// the Cholesky factorization only touches the band (elastic-map Hessians are
/// pentadiagonal per dimension).
class SymMatrix {
public:
    /// Throws invalid-argument if `entries` is not square or asymmetric beyond
    /// `symmetry_tol` relative to its largest entry.
    explicit SymMatrix(Matrix entries);

    [[nodiscard]] std::size_t order() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    [[nodiscard]] std::size_t bandwidth() const noexcept { return band_; }
    [[nodiscard]] const Matrix& dense() const noexcept { return a_; }

private:
    Matrix a_;
    std::size_t band_ = 0;
};

/// Lower-triangular Cholesky factor L with A = L L^T, restricted to A's band.
class Cholesky {
public:
    /// Throws NotPositiveDefiniteError naming the first failing pivot.
    explicit Cholesky(const SymMatrix& a);

    [[nodiscard]] Matrix solve(const Matrix& b) const;
    [[nodiscard]] Vector solve(const Vector& b) const;
    [[nodiscard]] std::size_t order() const noexcept { return static_cast<std::size_t>(l_.rows()); }

private:
    Matrix l_;
    std::size_t band_;
};

/// X with A X = B.
[[nodiscard]] Matrix solve_spd(const SymMatrix& a, const Matrix& b);

struct KktSolution {
    Vector x;
    Vector nu;
};

/// Equality-constrained QP
///   minimize 1/2 x^T H x - b^T x  subject to  C x = p
/// with Lagrangian L = 1/2 x^T H x - b^T x + nu^T (C x - p), so the optimal
/// value J*(p) has dJ*/dp = -nu.
///
/// Solved by Schur-complement elimination: H y = b, H Z = C^T, (C Z) nu = C y - p,
/// x = y - Z nu, followed by one step of iterative refinement. When H itself is
/// only positive definite on the nullspace of C the factorization falls back
/// to H + rho C^T C, which has the same minimizer and multipliers.
class KktSolver {
public:
    /// Factors once; throws DegenerateConstraintsError listing dependent rows
    /// of C, or NotPositiveDefiniteError if H is indefinite on null(C).
    KktSolver(const SymMatrix& h, const Matrix& c);

    [[nodiscard]] KktSolution solve(const Vector& b, const Vector& p) const;
    [[nodiscard]] bool augmented() const noexcept { return rho_ > 0.0; }
    /// Schur complement C H^{-1} C^T (of the possibly augmented H).
    [[nodiscard]] const Matrix& schur() const noexcept { return s_; }

private:
    [[nodiscard]] KktSolution solve_once(const Vector& b, const Vector& p) const;

    Matrix h_;
    Matrix c_;
    double rho_ = 0.0;
    Cholesky h_factor_;
    Matrix z_;
    Matrix s_;
    std::optional<Cholesky> s_factor_;  // absent when there are no constraints
};

[[nodiscard]] KktSolution solve_kkt(const SymMatrix& h, const Matrix& c, const Vector& b, const Vector& p);

/// Smallest eigenvalue (full symmetric eigendecomposition).
[[nodiscard]] double min_eigenvalue(const SymMatrix& a);

}  // namespace skillforge
