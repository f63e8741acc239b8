#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "skillforge/constrained.hpp"
#include "skillforge/numsolve.hpp"
#include "skillforge/trajectory.hpp"

namespace skillforge {

/// Per-step mean and inverse regularized covariance of one label subset.
struct StepStatistics {
    Matrix mean;                  // T x d
    std::vector<Matrix> weight;   // T matrices, d x d, (Sigma_t + eps I)^-1
};

struct StatModel {
    std::size_t steps = 0;
    std::size_t dim = 0;
    double eps_reg = 1e-3;
    std::optional<StepStatistics> success;
    std::optional<StepStatistics> failure;
};

/// Per-step statistics of each label subset (population covariance).
/// Throws invalid-argument if the set is not aligned or eps_reg <= 0.
[[nodiscard]] StatModel encode(const DemoSet& set, double eps_reg = 1e-3);

struct Smoothing {
    double lambda = 0.0;
    double mu = 0.0;
};

/// J(X) = x^T Q x - 2 g^T x + c over the time-major flattening x of X (T x d).
struct QuadraticCost {
    SymMatrix q;
    Vector g;
    double c = 0.0;

    [[nodiscard]] double value(const Matrix& x) const;
    [[nodiscard]] Matrix gradient(const Matrix& x) const;
    [[nodiscard]] SymMatrix hessian() const { return SymMatrix(2.0 * q.dense()); }
};

/// sum_t |x_t - mu_s|^2_{W_s} - beta sum_t |x_t - mu_f|^2_{W_f} + smoothing.
/// Terms of an absent subset drop out; beta == 0 never reads the failed subset.
[[nodiscard]] QuadraticCost failure_aware_cost(const StatModel& model, double beta, const Smoothing& smooth);

/// -beta sum_t |x_t - mu_f|^2_{W_f} + rho sum_t |x_t - ref_t|^2 + smoothing.
[[nodiscard]] QuadraticCost failed_only_cost(const StatModel& model, double rho, const Matrix& reference, double beta,
                                             const Smoothing& smooth);

struct FailureAwareResult {
    Matrix points;  // T x d reproduction, one row per step
    double beta_used = 0.0;
    double min_hessian_eigenvalue = 0.0;
};

/// Minimizes failure_aware_cost subject to optional hard pins (pin node =
/// time step). If the Hessian is not positive definite with margin
/// `hessian_margin`, beta is bisected downward until it is.
[[nodiscard]] FailureAwareResult solve_repro(const StatModel& model, double beta, const Smoothing& smooth,
                                             const ConstraintSet& cons = {});

/// Smallest rho for which rho I - beta W_f,t is positive definite at every step.
[[nodiscard]] double min_trust_region(const StatModel& model, double beta);

/// Straight segment between the pinned first/last steps, or between the
/// failed mean's endpoints when those steps are not pinned.
[[nodiscard]] Matrix default_reference(const StatModel& model, const ConstraintSet& cons);

/// Reproduction from failed demonstrations only, held by a trust region of
/// weight rho around `reference` (default_reference when empty). Throws
/// TrustRegionTooWeakError when rho <= min_trust_region(model, beta).
[[nodiscard]] Matrix solve_failed_only(const StatModel& model, double rho, const std::optional<Matrix>& reference,
                                           double beta, const Smoothing& smooth, const ConstraintSet& cons = {});

/// sum_t |x_t - mu_f,t|^2_{W_f,t}.
[[nodiscard]] double repulsion(const StatModel& model, const Matrix& x);

}  // namespace skillforge
