#pragma once

namespace skillforge {

/// Process-wide numeric tolerances. Every solver reads from here; model files
/// snapshot the record so a run can be replayed with identical settings.
struct NumericSettings {
    double symmetry_tol = 1e-12;     // relative asymmetry allowed in SymMatrix
    double rank_tol = 1e-12;         // relative Schur pivot below which a constraint row is dependent
    double hessian_margin = 1e-8;    // minimum eigenvalue required by the failure-aware guard
    double dual_zero_tol = 1e-9;     // dual norms at or below this count as zero when pruning
    double confidence_eps = 1e-12;   // floor on the unconstrained optimum in the confidence ratio
    int beta_bisection_steps = 60;
};

[[nodiscard]] const NumericSettings& numeric_settings() noexcept;
void set_numeric_settings(const NumericSettings& settings) noexcept;

}  // namespace skillforge
