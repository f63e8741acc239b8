#include "skillforge/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "skillforge/error.hpp"
#include "skillforge/settings.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "constrained_repro", msg); }

Matrix selection(const ConstraintSet& cons, std::size_t k) {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(cons.pins.size()), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < cons.pins.size(); ++r)
        c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cons.pins[r].node)) = 1.0;
    return c;
}

Matrix targets(const ConstraintSet& cons, std::size_t d) {
    Matrix p(static_cast<Eigen::Index>(cons.pins.size()), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < cons.pins.size(); ++r) p.row(static_cast<Eigen::Index>(r)) = cons.pins[r].target.transpose();
    return p;
}

Matrix solve_hard(const NodeProblem& problem, const ConstraintSet& cons, Matrix& duals) {
    const auto k = problem.a.order();
    const auto d = static_cast<std::size_t>(problem.moment.cols());
    const Matrix c = selection(cons, k);
    const Matrix p = targets(cons, d);
    const KktSolver kkt(SymMatrix(2.0 * problem.a.dense()), c);
    Matrix x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    duals.resize(static_cast<Eigen::Index>(cons.pins.size()), static_cast<Eigen::Index>(d));
    for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(d); ++col) {
        const auto sol = kkt.solve(Vector(2.0 * problem.moment.col(col)), Vector(p.col(col)));
        x.col(col) = sol.x;
        if (!cons.pins.empty()) duals.col(col) = sol.nu;
    }
    return x;
}

Matrix solve_soft(const NodeProblem& problem, const ConstraintSet& cons, Matrix& duals) {
    const double w = soft_weight(cons.confidence);
    Matrix a = problem.a.dense();
    Matrix rhs = problem.moment;
    for (const auto& pin : cons.pins) {
        const auto i = static_cast<Eigen::Index>(pin.node);
        a(i, i) += w;
        rhs.row(i) += w * pin.target.transpose();
    }
    NodeProblem penalized{SymMatrix(std::move(a)), std::move(rhs), 0.0};
    Matrix x = unconstrained_nodes(penalized);
    duals.resize(static_cast<Eigen::Index>(cons.pins.size()), x.cols());
    for (std::size_t r = 0; r < cons.pins.size(); ++r) {
        const auto& pin = cons.pins[r];
        duals.row(static_cast<Eigen::Index>(r)) =
            2.0 * w * (x.row(static_cast<Eigen::Index>(pin.node)) - pin.target.transpose());
    }
    return x;
}

}  // namespace

const char* to_string(PinKind kind) noexcept {
    switch (kind) {
        case PinKind::Initial: return "initial";
        case PinKind::Final: return "final";
        case PinKind::Via: return "via";
    }
    return "unknown";
}

PinKind parse_pin_kind(const std::string& s) {
    for (auto v : {PinKind::Initial, PinKind::Final, PinKind::Via})
        if (s == to_string(v)) return v;
    fail(ErrorKind::InvalidArgument, "unknown pin kind '" + s + "'");
}

ConstraintSet endpoint_pins(std::size_t k, const Vector& start, const Vector& goal, double confidence) {
    return ConstraintSet{{Pin{0, start, PinKind::Initial}, Pin{k - 1, goal, PinKind::Final}}, confidence};
}

void validate(const ConstraintSet& cons, std::size_t k, std::size_t d) {
    if (!(cons.confidence > 0.0 && cons.confidence <= 1.0)) fail(ErrorKind::InvalidConstraints, "confidence must lie in (0, 1]");
    std::set<std::size_t> seen;
    for (const auto& pin : cons.pins) {
        if (pin.node >= k) fail(ErrorKind::InvalidConstraints, "pin node index out of range");
        if (!seen.insert(pin.node).second) fail(ErrorKind::InvalidConstraints, "node pinned more than once");
        if (static_cast<std::size_t>(pin.target.size()) != d) fail(ErrorKind::InvalidConstraints, "pin target has the wrong dimension");
        if (!pin.target.allFinite()) fail(ErrorKind::InvalidConstraints, "pin target is not finite");
    }
}

double confidence_from_values(double value_unconstrained, double value_constrained) {
    const double gap = std::max(0.0, value_constrained - value_unconstrained);
    return std::exp(-gap / std::max(value_unconstrained, numeric_settings().confidence_eps));
}

double confidence(const DualReport& report) {
    return confidence_from_values(report.value_unconstrained, report.value_constrained);
}

double soft_weight(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorKind::InvalidArgument, "soft weight needs kappa in (0, 1)");
    return kappa / (1.0 - kappa);
}

Matrix unconstrained_nodes(const NodeProblem& problem) {
    try {
        return solve_spd(problem.a, problem.moment);
    } catch (const NotPositiveDefiniteError&) {
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(problem.a.dense());
    Matrix x = cod.solve(problem.moment);
    const double scale = std::max(1.0, problem.moment.cwiseAbs().maxCoeff());
    if ((problem.a.dense() * x - problem.moment).cwiseAbs().maxCoeff() > 1e-9 * scale)
        fail(ErrorKind::DegenerateConstraints, "unconstrained node problem is unbounded");
    return x;
}

ConstrainedReproduction reproduce_constrained(const NodeProblem& problem, const ConstraintSet& cons) {
    const auto k = problem.a.order();
    const auto d = static_cast<std::size_t>(problem.moment.cols());
    validate(cons, k, d);

    ConstrainedReproduction out;
    if (cons.pins.empty()) {
        out.nodes = unconstrained_nodes(problem);
        out.report.duals = Matrix(0, static_cast<Eigen::Index>(d));
    } else if (cons.confidence >= 1.0) {
        out.nodes = solve_hard(problem, cons, out.report.duals);
    } else {
        out.nodes = solve_soft(problem, cons, out.report.duals);
    }
    out.report.value_constrained = problem.value(out.nodes);
    out.report.value_unconstrained = problem.value(unconstrained_nodes(problem));
    out.report.kappa = confidence(out.report);
    return out;
}

ConstrainedReproduction reproduce_constrained(const ElasticMap& map, const ConstraintSet& cons) {
    return reproduce_constrained(node_problem(map), cons);
}

ConstrainedReproduction reproduce_constrained(const ElasticMap& map, const DemoSet& demos, const ConstraintSet& cons) {
    const PooledData data = pool(demos, map.strategy.weight);
    const Assignment asg = nearest_assignment(map.nodes, data.points, data.weights);
    return reproduce_constrained(node_problem(map.node_count(), map.lambda, map.mu, summarize(map.node_count(), data.points, asg)),
                                 cons);
}

double max_pin_violation(const Matrix& nodes, const ConstraintSet& cons) {
    double worst = 0.0;
    for (const auto& pin : cons.pins)
        worst = std::max(worst, (nodes.row(static_cast<Eigen::Index>(pin.node)).transpose() - pin.target).norm());
    return worst;
}

PruneResult prune(const NodeProblem& problem, const ConstraintSet& cons, double threshold, bool iterative) {
    ConstraintSet hard = cons;
    hard.confidence = 1.0;
    const ConstrainedReproduction full = reproduce_constrained(problem, hard);

    PruneResult result;
    result.dual_norms = full.report.duals.rowwise().norm();
    result.kept = cons;
    result.kept.pins.clear();

    ConstraintSet current = hard;
    Vector norms = result.dual_norms;
    while (true) {
        ConstraintSet next = current;
        next.pins.clear();
        std::vector<Pin> dropped;
        const double peak = norms.size() > 0 ? norms.maxCoeff() : 0.0;
        for (std::size_t r = 0; r < current.pins.size(); ++r) {
            const double n = norms(static_cast<Eigen::Index>(r));
            const bool drop = threshold > 0.0 && (peak <= numeric_settings().dual_zero_tol || n < threshold * peak);
            (drop ? dropped : next.pins).push_back(current.pins[r]);
        }
        result.removed.insert(result.removed.end(), dropped.begin(), dropped.end());
        current = next;
        if (!iterative || dropped.empty() || current.pins.empty()) break;
        norms = reproduce_constrained(problem, current).report.duals.rowwise().norm();
    }

    result.kept.pins = current.pins;
    const Matrix pruned = reproduce_constrained(problem, current).nodes;
    result.delta = (pruned - full.nodes).cwiseAbs().maxCoeff();
    return result;
}

std::vector<SweepEntry> confidence_sweep(const NodeProblem& problem, const ConstraintSet& cons,
                                         const std::vector<double>& kappas) {
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        if (!(kappas[i] > 0.0 && kappas[i] <= 1.0)) fail(ErrorKind::InvalidArgument, "sweep confidences must lie in (0, 1]");
        if (i > 0 && !(kappas[i] > kappas[i - 1])) fail(ErrorKind::InvalidArgument, "sweep confidences must be ascending");
    }
    std::vector<SweepEntry> out;
    out.reserve(kappas.size());
    for (double kappa : kappas) {
        ConstraintSet at = cons;
        at.confidence = kappa;
        auto rep = reproduce_constrained(problem, at);
        out.push_back({kappa, rep.nodes, rep.report.kappa, max_pin_violation(rep.nodes, cons)});
    }
    return out;
}

}  // namespace skillforge
