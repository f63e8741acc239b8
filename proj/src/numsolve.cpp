#include "skillforge/numsolve.hpp"

#include <algorithm>
#include <cmath>

#include "skillforge/error.hpp"
#include "skillforge/settings.hpp"

namespace skillforge {

namespace {

// Pivots at or below this fraction of the largest diagonal entry are treated
// as zero: a semidefinite matrix must fail rather than yield a huge solution.
constexpr double kPivotRelTol = 1e-14;

Cholesky factor_or_throw(const Matrix& m) { return Cholesky(SymMatrix(m)); }

}  // namespace

SymMatrix::SymMatrix(Matrix entries) : a_(std::move(entries)) {
    if (a_.rows() != a_.cols())
        throw Error(ErrorKind::InvalidArgument, "numsolve", "symmetric matrix must be square");
    const double scale = a_.size() == 0 ? 0.0 : a_.cwiseAbs().maxCoeff();
    const double tol = numeric_settings().symmetry_tol * std::max(scale, 1e-300);
    const auto n = a_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::abs(a_(i, j) - a_(j, i)) > tol)
                throw Error(ErrorKind::InvalidArgument, "numsolve", "matrix is not symmetric");
            if (a_(i, j) != 0.0 || a_(j, i) != 0.0)
                band_ = std::max(band_, static_cast<std::size_t>(i - j));
        }
    }
}

Cholesky::Cholesky(const SymMatrix& a) : l_(Matrix::Zero(a.dense().rows(), a.dense().cols())), band_(a.bandwidth()) {
    const Matrix& m = a.dense();
    const auto n = m.rows();
    const auto band = static_cast<Eigen::Index>(band_);
    const double max_diag = n == 0 ? 0.0 : m.diagonal().cwiseAbs().maxCoeff();
    const double floor = kPivotRelTol * max_diag;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index k0 = std::max<Eigen::Index>(0, j - band);
        double d = m(j, j);
        for (Eigen::Index k = k0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > floor)) throw NotPositiveDefiniteError(static_cast<std::size_t>(j), d);
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        const Eigen::Index i_end = std::min<Eigen::Index>(n - 1, j + band);
        for (Eigen::Index i = j + 1; i <= i_end; ++i) {
            double s = m(i, j);
            const Eigen::Index ki = std::max<Eigen::Index>(0, i - band);
            for (Eigen::Index k = std::max(k0, ki); k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / ljj;
        }
    }
}

Matrix Cholesky::solve(const Matrix& b) const {
    const auto n = l_.rows();
    if (b.rows() != n) throw Error(ErrorKind::InvalidArgument, "numsolve", "right-hand side has wrong row count");
    const auto band = static_cast<Eigen::Index>(band_);
    Matrix x = b;
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = x(i, col);
            for (Eigen::Index k = std::max<Eigen::Index>(0, i - band); k < i; ++k) s -= l_(i, k) * x(k, col);
            x(i, col) = s / l_(i, i);
        }
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double s = x(i, col);
            const Eigen::Index k_end = std::min<Eigen::Index>(n - 1, i + band);
            for (Eigen::Index k = i + 1; k <= k_end; ++k) s -= l_(k, i) * x(k, col);
            x(i, col) = s / l_(i, i);
        }
    }
    return x;
}

Vector Cholesky::solve(const Vector& b) const {
    Matrix x = solve(Matrix(b));
    return x.col(0);
}

Matrix solve_spd(const SymMatrix& a, const Matrix& b) { return Cholesky(a).solve(b); }

namespace {

Matrix augment(const Matrix& h, const Matrix& c, double rho) { return h + rho * c.transpose() * c; }

Cholesky factor_hessian(const Matrix& h, const Matrix& c, double& rho) {
    try {
        rho = 0.0;
        return factor_or_throw(h);
    } catch (const NotPositiveDefiniteError&) {
        if (c.rows() == 0) throw;
    }
    // Any rho past a problem-dependent threshold works; grow until it does.
    const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    for (rho = 2.0 * scale;; rho *= 10.0) {
        try {
            return factor_or_throw(augment(h, c, rho));
        } catch (const NotPositiveDefiniteError&) {
            if (rho > 1e8 * scale) throw;
        }
    }
}

// Cholesky of the Schur complement that skips (and records) pivots that
// vanish relative to the largest diagonal entry.
std::vector<std::size_t> dependent_rows(const Matrix& s) {
    const auto m = s.rows();
    Matrix l = Matrix::Zero(m, m);
    const double max_diag = m == 0 ? 0.0 : s.diagonal().cwiseAbs().maxCoeff();
    const double tol = numeric_settings().rank_tol * std::max(max_diag, 1e-300);
    std::vector<std::size_t> dependent;
    std::vector<bool> skip(static_cast<std::size_t>(m), false);
    for (Eigen::Index j = 0; j < m; ++j) {
        double d = s(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > tol)) {
            dependent.push_back(static_cast<std::size_t>(j));
            skip[static_cast<std::size_t>(j)] = true;
            continue;
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < m; ++i) {
            double v = s(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return dependent;
}

}  // namespace

KktSolver::KktSolver(const SymMatrix& h, const Matrix& c)
    : h_(h.dense()), c_(c), h_factor_(factor_hessian(h.dense(), c, rho_)) {
    const auto n = h_.rows();
    if (c_.rows() > 0 && c_.cols() != n)
        throw Error(ErrorKind::InvalidArgument, "numsolve", "constraint matrix has wrong column count");
    if (c_.rows() > n)
        throw Error(ErrorKind::InvalidArgument, "numsolve", "more constraints than unknowns");
    if (c_.rows() == 0) {
        s_ = Matrix(0, 0);
        return;
    }
    z_ = h_factor_.solve(Matrix(c_.transpose()));
    Matrix s = c_ * z_;
    s_ = 0.5 * (s + s.transpose());
    auto dependent = dependent_rows(s_);
    if (!dependent.empty()) throw DegenerateConstraintsError(std::move(dependent));
    s_factor_.emplace(SymMatrix(s_));
}

KktSolution KktSolver::solve_once(const Vector& b, const Vector& p) const {
    Vector rhs = b;
    if (rho_ > 0.0) rhs += rho_ * c_.transpose() * p;
    Vector y = h_factor_.solve(rhs);
    if (c_.rows() == 0) return {std::move(y), Vector(0)};
    Vector nu = s_factor_->solve(Vector(c_ * y - p));
    Vector x = y - z_ * nu;
    return {std::move(x), std::move(nu)};
}

KktSolution KktSolver::solve(const Vector& b, const Vector& p) const {
    if (b.size() != h_.rows()) throw Error(ErrorKind::InvalidArgument, "numsolve", "b has wrong length");
    if (p.size() != c_.rows()) throw Error(ErrorKind::InvalidArgument, "numsolve", "p has wrong length");
    KktSolution sol = solve_once(b, p);
    // one refinement step on the original (non-augmented) system
    Vector r1 = b - h_ * sol.x;
    if (c_.rows() > 0) r1 -= c_.transpose() * sol.nu;
    Vector r2 = c_.rows() > 0 ? Vector(p - c_ * sol.x) : Vector(0);
    KktSolution corr = solve_once(r1, r2);
    sol.x += corr.x;
    if (c_.rows() > 0) sol.nu += corr.nu;
    return sol;
}

KktSolution solve_kkt(const SymMatrix& h, const Matrix& c, const Vector& b, const Vector& p) {
    return KktSolver(h, c).solve(b, p);
}

double min_eigenvalue(const SymMatrix& a) {
    if (a.order() == 0) throw Error(ErrorKind::InvalidArgument, "numsolve", "empty matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a.dense(), Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

}  // namespace skillforge
