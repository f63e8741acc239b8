#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "skillforge/elastic_map.hpp"

namespace skillforge {

enum class PinKind { Initial, Final, Via };

[[nodiscard]] const char* to_string(PinKind kind) noexcept;
[[nodiscard]] PinKind parse_pin_kind(const std::string& s);

struct Pin {
    std::size_t node = 0;
    Vector target;
    PinKind kind = PinKind::Via;
};

/// Node-indexed point constraints with a target confidence in (0, 1].
/// confidence == 1 means hard constraints.
struct ConstraintSet {
    std::vector<Pin> pins;
    double confidence = 1.0;
};

/// Pins on the first and last node.
[[nodiscard]] ConstraintSet endpoint_pins(std::size_t k, const Vector& start, const Vector& goal, double confidence = 1.0);

struct DualReport {
    Matrix duals;  // one row per pin: dJ*/dp_c = -duals.row(c)
    double value_unconstrained = 0.0;
    double value_constrained = 0.0;
    double kappa = 1.0;
};

struct ConstrainedReproduction {
    Matrix nodes;
    DualReport report;

    [[nodiscard]] Trajectory trajectory() const { return node_polyline(nodes); }
};

/// Throws Error(InvalidConstraints) for repeated or out-of-range nodes, a
/// target of the wrong dimension or a confidence outside (0, 1].
void validate(const ConstraintSet& cons, std::size_t k, std::size_t d);

/// kappa = exp(-(J_c - J_u) / max(J_u, eps)).
[[nodiscard]] double confidence_from_values(double value_unconstrained, double value_constrained);
[[nodiscard]] double confidence(const DualReport& report);

/// Penalty weight used for confidence < 1: kappa / (1 - kappa).
[[nodiscard]] double soft_weight(double kappa);

/// Minimizer of the fixed-assignment node problem without pins. A singular
/// (but bounded) problem gets its minimum-norm minimizer.
[[nodiscard]] Matrix unconstrained_nodes(const NodeProblem& problem);

/// Hard pins (confidence 1) go through the KKT solver; softer confidences
/// become springs of weight soft_weight(kappa) to the targets.
[[nodiscard]] ConstrainedReproduction reproduce_constrained(const NodeProblem& problem, const ConstraintSet& cons);
/// Uses the data term frozen into the map by `fit`.
[[nodiscard]] ConstrainedReproduction reproduce_constrained(const ElasticMap& map, const ConstraintSet& cons);
/// Freezes the nearest-node assignment of `demos` to the map's current nodes.
[[nodiscard]] ConstrainedReproduction reproduce_constrained(const ElasticMap& map, const DemoSet& demos,
                                                            const ConstraintSet& cons);

[[nodiscard]] double max_pin_violation(const Matrix& nodes, const ConstraintSet& cons);

struct PruneResult {
    ConstraintSet kept;
    std::vector<Pin> removed;
    Vector dual_norms;  // per original pin, from the hard solve
    double delta = 0.0; // max |x_pruned - x_full| over all node coordinates
};

/// Drops pins whose dual norm is below threshold * max dual norm (all pins
/// when every dual is zero, none when threshold <= 0). `iterative` repeats
/// until nothing more is removed.
[[nodiscard]] PruneResult prune(const NodeProblem& problem, const ConstraintSet& cons, double threshold,
                                bool iterative = false);

struct SweepEntry {
    double target_kappa = 1.0;
    Matrix nodes;
    double achieved_kappa = 1.0;
    double max_violation = 0.0;
};

/// One reproduction per confidence value; kappas must be ascending in (0, 1].
[[nodiscard]] std::vector<SweepEntry> confidence_sweep(const NodeProblem& problem, const ConstraintSet& cons,
                                                       const std::vector<double>& kappas);

}  // namespace skillforge
