#include "skillforge/lte.hpp"

#include "skillforge/error.hpp"
#include "skillforge/numsolve.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "baselines", msg); }

}  // namespace

Matrix laplacian_coordinates(const Matrix& points) {
    if (points.rows() < 3) fail(ErrorKind::InvalidArgument, "Laplacian editing needs at least three samples");
    Matrix delta(points.rows(), points.cols());
    delta.row(0) = points.row(0);
    delta.row(points.rows() - 1) = points.row(points.rows() - 1);
    delta.middleRows(1, points.rows() - 2) = second_differences(points);
    return delta;
}

LteModel lte_train(const Trajectory& demo) {
    if (demo.size() < 3) fail(ErrorKind::InvalidArgument, "Laplacian editing needs at least three samples");
    return LteModel{demo, laplacian_coordinates(demo.points())};
}

Trajectory lte_reproduce(const LteModel& model, const Vector& new_start, const Vector& new_goal, std::size_t n) {
    if (n < 3) fail(ErrorKind::InvalidArgument, "Laplacian editing needs n >= 3");
    const auto d = static_cast<Eigen::Index>(model.demo.dim());
    if (new_start.size() != d || new_goal.size() != d) fail(ErrorKind::InvalidArgument, "boundary point has the wrong dimension");
    const LteModel rebuilt = n == model.demo.size() ? model : lte_train(resample(model.demo, n));
    const auto& demo = rebuilt.demo;
    // the unmodified boundary reproduces the demo itself
    if (new_start == demo.front() && new_goal == demo.back()) return demo;

    // interior rows: -x_{i-1} + 2 x_i - x_{i+1} = -delta_i (SPD tridiagonal)
    const auto m = static_cast<Eigen::Index>(n) - 2;
    Matrix t = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = 2.0;
        if (i > 0) t(i, i - 1) = -1.0;
        if (i + 1 < m) t(i, i + 1) = -1.0;
    }
    Matrix rhs = -rebuilt.delta.middleRows(1, m);
    rhs.row(0) += new_start.transpose();
    rhs.row(m - 1) += new_goal.transpose();
    Matrix x(static_cast<Eigen::Index>(n), d);
    x.row(0) = new_start.transpose();
    x.row(x.rows() - 1) = new_goal.transpose();
    x.middleRows(1, m) = solve_spd(SymMatrix(std::move(t)), rhs);
    return Trajectory(demo.times(), std::move(x));
}

}  // namespace skillforge
