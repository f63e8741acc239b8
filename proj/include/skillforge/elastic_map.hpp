#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skillforge/numsolve.hpp"
#include "skillforge/trajectory.hpp"

namespace skillforge {

// Polyline elastic map: K nodes, edges (i, i+1), ribs (i-1, i, i+1), fitted
// by minimizing U = U_y + U_E + U_R where
//   U_y = sum_j w_j |y_j - x_a(j)|^2 / sum_j w_j
//   U_E = lambda * sum_i |x_{i+1} - x_i|^2
//   U_R = mu     * sum_i |x_{i-1} - 2 x_i + x_{i+1}|^2

enum class InitScheme { TimeUniform, ArcLength, Straight };
enum class WeightScheme { Uniform, Curvature, EndpointBoosted };

/// One cell of the 3x3 construction/weighting grid.
struct Strategy {
    InitScheme init = InitScheme::TimeUniform;
    WeightScheme weight = WeightScheme::Uniform;

    /// e.g. "init2-weight3 (arc_length, endpoint)".
    [[nodiscard]] std::string name() const;
    /// 1..9, row-major over (init, weight).
    [[nodiscard]] int index() const noexcept;
    [[nodiscard]] static Strategy from_index(int index);
    [[nodiscard]] static std::vector<Strategy> all();

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

[[nodiscard]] const char* to_string(InitScheme s) noexcept;
[[nodiscard]] const char* to_string(WeightScheme s) noexcept;
[[nodiscard]] InitScheme parse_init_scheme(const std::string& s);
[[nodiscard]] WeightScheme parse_weight_scheme(const std::string& s);

/// Sufficient statistics of the data term at a fixed assignment, normalized by
/// the total weight W: mass_i = sum_{a(j)=i} w_j / W, moment_i = sum w_j y_j / W,
/// second = sum w_j |y_j|^2 / W.
struct DataSummary {
    Vector mass;
    Matrix moment;
    double second = 0.0;
};

struct ElasticMap {
    Matrix nodes;  // K x d
    double lambda = 0.0;
    double mu = 0.0;
    Strategy strategy;
    /// Frozen data term of the fit's final assignment; set by `fit`.
    std::optional<DataSummary> summary;

    [[nodiscard]] std::size_t node_count() const noexcept { return static_cast<std::size_t>(nodes.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(nodes.cols()); }
};

[[nodiscard]] double default_lambda(std::size_t k) noexcept;
[[nodiscard]] double default_mu(std::size_t k) noexcept;

struct Assignment {
    std::vector<std::size_t> owner;
    Vector weights;
};

struct Energy {
    double data = 0.0;     // U_y
    double stretch = 0.0;  // U_E
    double bend = 0.0;     // U_R
    double total = 0.0;
};

/// Per-sample data weights of one demo under a weighting scheme.
[[nodiscard]] Vector data_weights(const Trajectory& demo, WeightScheme scheme);

/// All samples of all demos stacked (labels ignored) with their weights.
struct PooledData {
    Matrix points;
    Vector weights;
};
[[nodiscard]] PooledData pool(const DemoSet& demos, WeightScheme scheme);

/// Nearest node per point; ties go to the lower node index.
[[nodiscard]] Assignment nearest_assignment(const Matrix& nodes, const Matrix& points, const Vector& weights);

[[nodiscard]] Energy energy(const ElasticMap& map, const Matrix& points, const Assignment& asg);

/// dU_total / d(nodes) at fixed assignment.
[[nodiscard]] Matrix energy_gradient(const ElasticMap& map, const Matrix& points, const Assignment& asg);

[[nodiscard]] DataSummary summarize(std::size_t k, const Matrix& points, const Assignment& asg);

/// The fixed-assignment node problem U(X) = tr(X^T A X) - 2 tr(M^T X) + c with
/// A = diag(mass) + lambda E^T E + mu R^T R and M the normalized moments.
struct NodeProblem {
    SymMatrix a;
    Matrix moment;
    double constant = 0.0;

    [[nodiscard]] double value(const Matrix& x) const;
    [[nodiscard]] Matrix gradient(const Matrix& x) const;
    /// Throws Error(IllPosedFit) when A is singular.
    [[nodiscard]] Matrix minimizer() const;
};

[[nodiscard]] NodeProblem node_problem(std::size_t k, double lambda, double mu, const DataSummary& summary);
/// Uses the map's stored summary; throws invalid-argument if it has none.
[[nodiscard]] NodeProblem node_problem(const ElasticMap& map);

/// Edge (K-1 x K) and rib (K-2 x K) difference operators.
[[nodiscard]] Matrix edge_operator(std::size_t k);
[[nodiscard]] Matrix rib_operator(std::size_t k);

/// Initial map for aligned demos. lambda/mu default to default_lambda(K),
/// default_mu(K) when not given.
[[nodiscard]] ElasticMap construct(const DemoSet& demos, std::size_t k, Strategy strategy,
                                   std::optional<double> lambda = std::nullopt,
                                   std::optional<double> mu = std::nullopt);

struct FitOptions {
    int max_iters = 100;
    double tol = 1e-12;
};

struct FitResult {
    ElasticMap map;
    Assignment assignment;
    std::vector<double> trace;  // U_total after each accepted iteration, non-increasing
    int iterations = 0;
    bool converged = false;     // assignment reached a fixed point
};

/// Alternates nearest-node assignment and the exact node update. The returned
/// nodes always solve the node problem of the returned assignment.
[[nodiscard]] FitResult fit(const ElasticMap& map, const DemoSet& demos, const FitOptions& opts = {});

/// Node polyline resampled to n points at uniform times on [0, 1].
[[nodiscard]] Trajectory reproduce(const ElasticMap& map, std::size_t n);
[[nodiscard]] Trajectory node_polyline(const Matrix& nodes);

}  // namespace skillforge
