#include "skillforge/elastic_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "skillforge/error.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "elastic_map", msg); }

Energy energy_of(const Matrix& nodes, double lambda, double mu, const Matrix& points, const Assignment& asg) {
    const auto k = nodes.rows();
    if (points.rows() == 0 && lambda == 0.0 && mu == 0.0)
        fail(ErrorKind::IllPosedEnergy, "no data and zero stretching and bending weights");
    if (static_cast<std::size_t>(points.rows()) != asg.owner.size() || asg.weights.size() != points.rows())
        fail(ErrorKind::InvalidArgument, "assignment does not match the data");
    Energy e;
    double wsum = 0.0;
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        const auto owner = asg.owner[static_cast<std::size_t>(j)];
        if (owner >= static_cast<std::size_t>(k)) fail(ErrorKind::InvalidArgument, "assignment owner out of range");
        const double w = asg.weights(j);
        e.data += w * (points.row(j) - nodes.row(static_cast<Eigen::Index>(owner))).squaredNorm();
        wsum += w;
    }
    if (wsum > 0.0) e.data /= wsum;
    for (Eigen::Index i = 0; i + 1 < k; ++i) e.stretch += (nodes.row(i + 1) - nodes.row(i)).squaredNorm();
    for (Eigen::Index i = 1; i + 1 < k; ++i)
        e.bend += (nodes.row(i - 1) - 2.0 * nodes.row(i) + nodes.row(i + 1)).squaredNorm();
    e.stretch *= lambda;
    e.bend *= mu;
    e.total = e.data + e.stretch + e.bend;
    return e;
}

Matrix resample_rows(const Matrix& pts, std::size_t k) {
    return resample(Trajectory::with_uniform_times(pts), k).points();
}

Matrix arc_length_nodes(const Matrix& pts, std::size_t k) {
    const auto n = pts.rows();
    std::vector<double> cum(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 1; i < n; ++i)
        cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i - 1)] + (pts.row(i) - pts.row(i - 1)).norm();
    const double total = cum.back();
    if (!(total > 0.0)) return resample_rows(pts, k);
    Matrix nodes(static_cast<Eigen::Index>(k), pts.cols());
    for (std::size_t m = 0; m < k; ++m) {
        const double s = total * (static_cast<double>(m) / static_cast<double>(k - 1));
        auto it = std::upper_bound(cum.begin(), cum.end(), s);
        auto hi = static_cast<Eigen::Index>(std::min<std::ptrdiff_t>(it - cum.begin(), n - 1));
        auto lo = std::max<Eigen::Index>(hi - 1, 0);
        const double seg = cum[static_cast<std::size_t>(hi)] - cum[static_cast<std::size_t>(lo)];
        const double a = seg > 0.0 ? (s - cum[static_cast<std::size_t>(lo)]) / seg : 0.0;
        nodes.row(static_cast<Eigen::Index>(m)) = pts.row(lo) + std::clamp(a, 0.0, 1.0) * (pts.row(hi) - pts.row(lo));
    }
    nodes.row(0) = pts.row(0);
    nodes.row(static_cast<Eigen::Index>(k - 1)) = pts.row(n - 1);
    return nodes;
}

}  // namespace

const char* to_string(InitScheme s) noexcept {
    switch (s) {
        case InitScheme::TimeUniform: return "time_uniform";
        case InitScheme::ArcLength: return "arc_length";
        case InitScheme::Straight: return "straight";
    }
    return "unknown";
}

const char* to_string(WeightScheme s) noexcept {
    switch (s) {
        case WeightScheme::Uniform: return "uniform";
        case WeightScheme::Curvature: return "curvature";
        case WeightScheme::EndpointBoosted: return "endpoint";
    }
    return "unknown";
}

InitScheme parse_init_scheme(const std::string& s) {
    for (auto v : {InitScheme::TimeUniform, InitScheme::ArcLength, InitScheme::Straight})
        if (s == to_string(v)) return v;
    fail(ErrorKind::InvalidArgument, "unknown init scheme '" + s + "'");
}

WeightScheme parse_weight_scheme(const std::string& s) {
    for (auto v : {WeightScheme::Uniform, WeightScheme::Curvature, WeightScheme::EndpointBoosted})
        if (s == to_string(v)) return v;
    fail(ErrorKind::InvalidArgument, "unknown weight scheme '" + s + "'");
}

std::string Strategy::name() const {
    std::ostringstream os;
    os << "init" << static_cast<int>(init) + 1 << "-weight" << static_cast<int>(weight) + 1 << " ("
       << to_string(init) << ", " << to_string(weight) << ")";
    return os.str();
}

int Strategy::index() const noexcept { return static_cast<int>(init) * 3 + static_cast<int>(weight) + 1; }

Strategy Strategy::from_index(int index) {
    if (index < 1 || index > 9) fail(ErrorKind::InvalidArgument, "strategy index must be in 1..9");
    return {static_cast<InitScheme>((index - 1) / 3), static_cast<WeightScheme>((index - 1) % 3)};
}

std::vector<Strategy> Strategy::all() {
    std::vector<Strategy> out;
    for (int i = 1; i <= 9; ++i) out.push_back(from_index(i));
    return out;
}

// Each node carries about 1/K of the normalized data mass, so the smoothing
// weights are scaled by the same factor.
double default_lambda(std::size_t k) noexcept { return 0.01 / static_cast<double>(k); }
double default_mu(std::size_t k) noexcept { return 1.0 / static_cast<double>(k); }

Vector data_weights(const Trajectory& demo, WeightScheme scheme) {
    const auto n = static_cast<Eigen::Index>(demo.size());
    Vector w = Vector::Ones(n);
    switch (scheme) {
        case WeightScheme::Uniform: break;
        case WeightScheme::Curvature: {
            if (n < 3) break;
            Vector kappa = Vector::Zero(n);
            const Matrix d2 = second_differences(demo);
            for (Eigen::Index i = 0; i < d2.rows(); ++i) kappa(i + 1) = d2.row(i).norm();
            const double peak = kappa.maxCoeff();
            if (peak > 0.0) w += kappa / peak;
            break;
        }
        case WeightScheme::EndpointBoosted: {
            const auto m = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(0.05 * static_cast<double>(n))));
            w.head(std::min(m, n)).setConstant(10.0);
            w.tail(std::min(m, n)).setConstant(10.0);
            break;
        }
    }
    return w;
}

PooledData pool(const DemoSet& demos, WeightScheme scheme) {
    Eigen::Index total = 0;
    for (const auto& demo : demos.demos()) total += static_cast<Eigen::Index>(demo.size());
    PooledData out{Matrix(total, static_cast<Eigen::Index>(demos.dim())), Vector(total)};
    Eigen::Index row = 0;
    for (const auto& demo : demos.demos()) {
        const auto n = static_cast<Eigen::Index>(demo.size());
        out.points.middleRows(row, n) = demo.points();
        out.weights.segment(row, n) = data_weights(demo, scheme);
        row += n;
    }
    return out;
}

Assignment nearest_assignment(const Matrix& nodes, const Matrix& points, const Vector& weights) {
    if (weights.size() != points.rows()) fail(ErrorKind::InvalidArgument, "one weight per point required");
    for (Eigen::Index j = 0; j < weights.size(); ++j)
        if (!(weights(j) > 0.0) || !std::isfinite(weights(j)))
            fail(ErrorKind::InvalidArgument, "data weights must be positive and finite");
    Assignment asg{std::vector<std::size_t>(static_cast<std::size_t>(points.rows()), 0), weights};
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t owner = 0;
        for (Eigen::Index i = 0; i < nodes.rows(); ++i) {
            const double d = (points.row(j) - nodes.row(i)).squaredNorm();
            if (d < best) {
                best = d;
                owner = static_cast<std::size_t>(i);
            }
        }
        asg.owner[static_cast<std::size_t>(j)] = owner;
    }
    return asg;
}

Energy energy(const ElasticMap& map, const Matrix& points, const Assignment& asg) {
    return energy_of(map.nodes, map.lambda, map.mu, points, asg);
}

Matrix energy_gradient(const ElasticMap& map, const Matrix& points, const Assignment& asg) {
    return node_problem(map.node_count(), map.lambda, map.mu, summarize(map.node_count(), points, asg))
        .gradient(map.nodes);
}

DataSummary summarize(std::size_t k, const Matrix& points, const Assignment& asg) {
    DataSummary s{Vector::Zero(static_cast<Eigen::Index>(k)), Matrix::Zero(static_cast<Eigen::Index>(k), points.cols()), 0.0};
    double wsum = 0.0;
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
        const auto i = static_cast<Eigen::Index>(asg.owner[static_cast<std::size_t>(j)]);
        const double w = asg.weights(j);
        s.mass(i) += w;
        s.moment.row(i) += w * points.row(j);
        s.second += w * points.row(j).squaredNorm();
        wsum += w;
    }
    if (wsum > 0.0) {
        s.mass /= wsum;
        s.moment /= wsum;
        s.second /= wsum;
    }
    return s;
}

Matrix edge_operator(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(k);
    Matrix e = Matrix::Zero(n - 1, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        e(i, i) = -1.0;
        e(i, i + 1) = 1.0;
    }
    return e;
}

Matrix rib_operator(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(k);
    Matrix r = Matrix::Zero(std::max<Eigen::Index>(n - 2, 0), n);
    for (Eigen::Index i = 0; i + 2 < n; ++i) {
        r(i, i) = 1.0;
        r(i, i + 1) = -2.0;
        r(i, i + 2) = 1.0;
    }
    return r;
}

NodeProblem node_problem(std::size_t k, double lambda, double mu, const DataSummary& summary) {
    if (k < 3) fail(ErrorKind::InvalidArgument, "an elastic map needs at least three nodes");
    if (static_cast<std::size_t>(summary.mass.size()) != k)
        fail(ErrorKind::InvalidArgument, "data summary does not match the node count");
    const Matrix e = edge_operator(k);
    const Matrix r = rib_operator(k);
    Matrix a = lambda * e.transpose() * e + mu * r.transpose() * r;
    a.diagonal() += summary.mass;
    return NodeProblem{SymMatrix(std::move(a)), summary.moment, summary.second};
}

NodeProblem node_problem(const ElasticMap& map) {
    if (!map.summary) fail(ErrorKind::InvalidArgument, "elastic map carries no fitted data summary");
    return node_problem(map.node_count(), map.lambda, map.mu, *map.summary);
}

double NodeProblem::value(const Matrix& x) const {
    return (x.transpose() * a.dense() * x).trace() - 2.0 * (moment.transpose() * x).trace() + constant;
}

Matrix NodeProblem::gradient(const Matrix& x) const { return 2.0 * (a.dense() * x - moment); }

Matrix NodeProblem::minimizer() const {
    try {
        return solve_spd(a, moment);
    } catch (const NotPositiveDefiniteError& e) {
        fail(ErrorKind::IllPosedFit, std::string("node update is singular: ") + e.what());
    }
}

ElasticMap construct(const DemoSet& demos, std::size_t k, Strategy strategy, std::optional<double> lambda,
                     std::optional<double> mu) {
    if (k < 3) fail(ErrorKind::InvalidArgument, "an elastic map needs at least three nodes");
    if (demos.common_len() == 0) fail(ErrorKind::InvalidArgument, "demos must be aligned before construction");
    if (k > demos.shortest()) fail(ErrorKind::InvalidArgument, "node count exceeds the shortest demo length");
    const double lam = lambda.value_or(default_lambda(k));
    const double m = mu.value_or(default_mu(k));
    if (lam < 0.0 || m < 0.0) fail(ErrorKind::InvalidArgument, "stretching and bending weights must be >= 0");

    const Matrix mean = mean_points(demos.demos());
    ElasticMap map;
    map.lambda = lam;
    map.mu = m;
    map.strategy = strategy;
    switch (strategy.init) {
        case InitScheme::TimeUniform: map.nodes = resample_rows(mean, k); break;
        case InitScheme::ArcLength: map.nodes = arc_length_nodes(mean, k); break;
        case InitScheme::Straight: {
            Matrix ends(2, mean.cols());
            ends.row(0) = mean.row(0);
            ends.row(1) = mean.row(mean.rows() - 1);
            map.nodes = resample_rows(ends, k);
            break;
        }
    }
    return map;
}

FitResult fit(const ElasticMap& map, const DemoSet& demos, const FitOptions& opts) {
    const auto k = map.node_count();
    if (k < 3) fail(ErrorKind::InvalidArgument, "an elastic map needs at least three nodes");
    if (demos.dim() != map.dim()) fail(ErrorKind::InvalidArgument, "demo dimension differs from the map");
    const PooledData data = pool(demos, map.strategy.weight);

    FitResult result;
    result.map = map;
    result.assignment = nearest_assignment(map.nodes, data.points, data.weights);
    DataSummary summary = summarize(k, data.points, result.assignment);
    result.map.nodes = node_problem(k, map.lambda, map.mu, summary).minimizer();
    result.map.summary = summary;
    double u = energy(result.map, data.points, result.assignment).total;
    result.trace.push_back(u);

    for (int it = 0; it < opts.max_iters; ++it) {
        Assignment next = nearest_assignment(result.map.nodes, data.points, data.weights);
        if (next.owner == result.assignment.owner) {
            result.converged = true;
            break;
        }
        DataSummary next_summary = summarize(k, data.points, next);
        Matrix next_nodes = node_problem(k, map.lambda, map.mu, next_summary).minimizer();
        ElasticMap candidate = result.map;
        candidate.nodes = std::move(next_nodes);
        candidate.summary = next_summary;
        const double next_u = energy(candidate, data.points, next).total;
        if (next_u > u) break;  // no descent left beyond rounding
        result.map = std::move(candidate);
        result.assignment = std::move(next);
        result.trace.push_back(next_u);
        ++result.iterations;
        const double drop = u - next_u;
        u = next_u;
        if (drop < opts.tol) break;
    }
    return result;
}

Trajectory node_polyline(const Matrix& nodes) { return Trajectory::with_uniform_times(nodes); }

Trajectory reproduce(const ElasticMap& map, std::size_t n) {
    if (n < 2) fail(ErrorKind::InvalidArgument, "reproduction needs n >= 2");
    return resample(node_polyline(map.nodes), n);
}

}  // namespace skillforge
