#pragma once

// Independent oracles and random-instance helpers shared by the unit tests
// and the acceptance runner. Nothing here calls into the solvers under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "skillforge/trajectory.hpp"

namespace testsupport {

using skillforge::Matrix;
using skillforge::Vector;
using Rng = std::mt19937_64;

inline double uni(Rng& rng, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * uni(rng);
    return m;
}

inline Matrix random_symmetric(Rng& rng, Eigen::Index n) {
    Matrix m = random_matrix(rng, n, n);
    return 0.5 * (m + m.transpose());
}

inline Matrix random_spd(Rng& rng, Eigen::Index n, double shift = 1.0) {
    Matrix m = random_matrix(rng, n, n);
    return m.transpose() * m + shift * Matrix::Identity(n, n);
}

// Smooth random 2-D curve: random-amplitude sine bumps on a chord.
inline Matrix random_curve(Rng& rng, Eigen::Index n, Eigen::Index d = 2) {
    Matrix p(n, d);
    Vector a = random_matrix(rng, d, 1);
    Vector b = random_matrix(rng, d, 1) + Vector::Constant(d, 2.0);
    Vector amp = random_matrix(rng, d, 1, 0.5);
    const double freq = uni(rng, 0.5, 2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        p.row(i) = (a + s * (b - a) + amp * std::sin(freq * 3.14159265358979 * s)).transpose();
    }
    return p;
}

inline skillforge::Trajectory uniform_traj(const Matrix& points) {
    return skillforge::Trajectory::with_uniform_times(points);
}

// Cyclic Jacobi eigenvalue iteration on a symmetric matrix.
inline Vector jacobi_eigenvalues(Matrix a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    return a.diagonal();
}

struct DenseKkt {
    Vector x;
    Vector nu;
};

// Full saddle-point system [H C^T; C 0] [x; nu] = [b; p], dense LU.
inline DenseKkt dense_kkt(const Matrix& h, const Matrix& c, const Vector& b, const Vector& p) {
    const Eigen::Index n = h.rows(), m = c.rows();
    Matrix k = Matrix::Zero(n + m, n + m);
    k.topLeftCorner(n, n) = h;
    k.topRightCorner(n, m) = c.transpose();
    k.bottomLeftCorner(m, n) = c;
    Vector rhs(n + m);
    rhs << b, p;
    Vector sol = k.fullPivLu().solve(rhs);
    return {sol.head(n), sol.tail(m)};
}

inline double point_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).norm();
}

// Exhaustive search over all monotone couplings from (0,0) to (n-1,m-1).
// `combine(acc, d)` folds the cost along the path in path order.
inline double brute_coupling(const Matrix& a, const Matrix& b,
                             const std::function<double(double, double)>& combine) {
    const Eigen::Index n = a.rows(), m = b.rows();
    double best = std::numeric_limits<double>::infinity();
    std::function<void(Eigen::Index, Eigen::Index, double)> walk = [&](Eigen::Index i, Eigen::Index j, double acc) {
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < n) walk(i + 1, j, combine(acc, point_dist(a, i + 1, b, j)));
        if (j + 1 < m) walk(i, j + 1, combine(acc, point_dist(a, i, b, j + 1)));
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, combine(acc, point_dist(a, i + 1, b, j + 1)));
    };
    walk(0, 0, point_dist(a, 0, b, 0));
    return best;
}

inline double brute_frechet(const Matrix& a, const Matrix& b) {
    return brute_coupling(a, b, [](double acc, double d) { return std::max(acc, d); });
}

inline double brute_dtw(const Matrix& a, const Matrix& b) {
    return brute_coupling(a, b, [](double acc, double d) { return acc + d; });
}

// Central differences of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-4) {
    Matrix g(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            Matrix xp = x, xm = x;
            xp(i, j) += h;
            xm(i, j) -= h;
            g(i, j) = (f(xp) - f(xm)) / (2.0 * h);
        }
    }
    return g;
}

// Max-norm error relative to the max-norm of the reference.
inline double rel_err(const Matrix& got, const Matrix& want) {
    return (got - want).cwiseAbs().maxCoeff() / std::max(want.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace testsupport
