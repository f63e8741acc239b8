#pragma once

#include <cstddef>

#include "skillforge/trajectory.hpp"

namespace skillforge {

/// Discrete dynamic movement primitive, one transformation system per
/// dimension:
///   tau dz = alpha_z (beta_z (g - y) - z) + f(x),   tau dy = z,   tau dx = -alpha_x x
/// with forcing f(x) = x sum_i psi_i(x) w_i / sum_i psi_i(x). The forcing is not
/// rescaled by (g - y0), so a demo with g == y0 in some dimension is still
/// learnable and new goals shift the reproduction rigidly.
struct DmpModel {
    std::size_t n_basis = 0;
    Matrix weights;           // n_basis x d
    Vector centers;           // in phase space
    Vector widths;
    double alpha_z = 25.0;
    double beta_z = 25.0 / 4.0;
    double alpha_x = 1.0;
    double tau = 1.0;
    Vector start;
    Vector goal;
    Vector start_velocity;    // forward-difference dy/dt of the demo at t = 0

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(start.size()); }
    /// Forcing term at phase x, one entry per dimension.
    [[nodiscard]] Vector forcing(double x) const;
};

struct DmpGains {
    double alpha_z = 25.0;  // beta_z = alpha_z / 4 (critical damping)
    double alpha_x = 1.0;
};

/// Least-squares fit of the forcing term to targets taken from the demo's
/// forward differences. Needs >= 3 samples.
[[nodiscard]] DmpModel dmp_train(const Trajectory& demo, std::size_t n_basis, const DmpGains& gains = {});

/// Explicit Euler integration with dt = tau / (n - 1); times run over [0, tau].
[[nodiscard]] Trajectory dmp_reproduce(const DmpModel& model, const Vector& new_start, const Vector& new_goal,
                                       std::size_t n = 200);

}  // namespace skillforge
