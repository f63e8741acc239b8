#include "skillforge/dmp.hpp"

#include <cmath>

#include "skillforge/error.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "baselines", msg); }

Vector basis(const DmpModel& m, double x) {
    return (-(m.widths.array() * (x - m.centers.array()).square())).exp().matrix();
}

}  // namespace

Vector DmpModel::forcing(double x) const {
    const Vector psi = basis(*this, x);
    const double total = psi.sum();
    if (!(total > 0.0)) return Vector::Zero(static_cast<Eigen::Index>(dim()));
    return x * (weights.transpose() * psi) / total;
}

DmpModel dmp_train(const Trajectory& demo, std::size_t n_basis, const DmpGains& gains) {
    if (demo.size() < 3) fail(ErrorKind::InvalidArgument, "DMP training needs at least three samples");
    if (n_basis < 2) fail(ErrorKind::InvalidArgument, "DMP needs at least two basis functions");
    if (!(demo.duration() > 0.0)) fail(ErrorKind::InvalidTrajectory, "demo has zero duration");
    if (!(gains.alpha_z > 0.0) || !(gains.alpha_x > 0.0)) fail(ErrorKind::InvalidArgument, "DMP gains must be positive");

    DmpModel m;
    m.n_basis = n_basis;
    m.alpha_z = gains.alpha_z;
    m.beta_z = gains.alpha_z / 4.0;
    m.alpha_x = gains.alpha_x;
    m.tau = demo.duration();
    m.start = demo.front();
    m.goal = demo.back();

    const auto nb = static_cast<Eigen::Index>(n_basis);
    m.centers.resize(nb);
    m.widths.resize(nb);
    for (Eigen::Index i = 0; i < nb; ++i)
        m.centers(i) = std::exp(-m.alpha_x * static_cast<double>(i) / static_cast<double>(nb - 1));
    for (Eigen::Index i = 0; i + 1 < nb; ++i) {
        const double gap = m.centers(i) - m.centers(i + 1);
        m.widths(i) = 1.0 / (gap * gap);
    }
    m.widths(nb - 1) = m.widths(nb - 2);

    // Targets follow the explicit Euler recurrence on the demo's own grid:
    //   z_k = tau (y_{k+1} - y_k) / h_k,   f_k = tau (z_{k+1} - z_k) / h_k - alpha_z (beta_z (g - y_k) - z_k)
    // so integrating with the demo's step reproduces it up to the regression error.
    const Vector t = demo.times().array() - demo.times()(0);
    const Matrix& y = demo.points();
    const auto n = y.rows();
    Matrix z(n - 1, y.cols());
    for (Eigen::Index k = 0; k + 1 < n; ++k) z.row(k) = m.tau * (y.row(k + 1) - y.row(k)) / (t(k + 1) - t(k));
    m.start_velocity = z.row(0).transpose() / m.tau;

    const auto samples = n - 2;
    Matrix target(samples, y.cols());
    Vector phase(samples);
    for (Eigen::Index k = 0; k < samples; ++k) {
        target.row(k) = m.tau * (z.row(k + 1) - z.row(k)) / (t(k + 1) - t(k)) -
                        m.alpha_z * (m.beta_z * (m.goal.transpose() - y.row(k)) - z.row(k));
        phase(k) = std::exp(-m.alpha_x * t(k) / m.tau);
    }

    // least squares over the normalized basis features phi_b(x) = x psi_b(x) / sum psi(x)
    Matrix features(samples, nb);
    for (Eigen::Index k = 0; k < samples; ++k) {
        const Vector psi = basis(m, phase(k));
        features.row(k) = (phase(k) * psi / psi.sum()).transpose();
    }
    Matrix gram = features.transpose() * features;
    gram.diagonal().array() += 1e-10 * gram.diagonal().mean();
    m.weights = gram.ldlt().solve(features.transpose() * target);
    return m;
}

Trajectory dmp_reproduce(const DmpModel& model, const Vector& new_start, const Vector& new_goal, std::size_t n) {
    if (n < 2) fail(ErrorKind::InvalidArgument, "DMP reproduction needs n >= 2");
    const auto d = static_cast<Eigen::Index>(model.dim());
    if (new_start.size() != d || new_goal.size() != d) fail(ErrorKind::InvalidArgument, "boundary point has the wrong dimension");
    const double dt = model.tau / static_cast<double>(n - 1);
    Matrix out(static_cast<Eigen::Index>(n), d);
    Vector y = new_start;
    Vector z = model.tau * model.start_velocity;
    out.row(0) = y.transpose();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double t = dt * static_cast<double>(k);
        const double x = std::exp(-model.alpha_x * t / model.tau);
        const Vector zdot = (model.alpha_z * (model.beta_z * (new_goal - y) - z) + model.forcing(x)) / model.tau;
        y += dt * z / model.tau;
        z += dt * zdot;
        out.row(static_cast<Eigen::Index>(k + 1)) = y.transpose();
    }
    return Trajectory(uniform_times(0.0, model.tau, n), std::move(out));
}

}  // namespace skillforge
