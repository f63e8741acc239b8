#pragma once

#include <cstddef>

#include "skillforge/trajectory.hpp"

namespace skillforge {

/// Laplacian trajectory editing. L is the second-difference operator with
/// identity boundary rows; delta = L * demo.
struct LteModel {
    Trajectory demo;
    Matrix delta;
};

[[nodiscard]] Matrix laplacian_coordinates(const Matrix& points);

/// Needs at least three samples.
[[nodiscard]] LteModel lte_train(const Trajectory& demo);

/// Solves L X = delta with the boundary rows replaced by new_start and
/// new_goal. The model is rebuilt from the demo resampled to n when n differs
/// from its length. Output keeps the (resampled) demo's times.
[[nodiscard]] Trajectory lte_reproduce(const LteModel& model, const Vector& new_start, const Vector& new_goal,
                                       std::size_t n);

}  // namespace skillforge
