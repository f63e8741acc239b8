#include "skillforge/failure_aware.hpp"

#include <algorithm>
#include <cmath>

#include "skillforge/elastic_map.hpp"
#include "skillforge/error.hpp"
#include "skillforge/settings.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "failure_aware", msg); }

Vector flatten(const Matrix& x) {
    Vector v(x.size());
    for (Eigen::Index t = 0; t < x.rows(); ++t) v.segment(t * x.cols(), x.cols()) = x.row(t).transpose();
    return v;
}

Matrix unflatten(const Vector& v, std::size_t d) {
    const auto dd = static_cast<Eigen::Index>(d);
    Matrix x(v.size() / dd, dd);
    for (Eigen::Index t = 0; t < x.rows(); ++t) x.row(t) = v.segment(t * dd, dd).transpose();
    return x;
}

StepStatistics statistics(const std::vector<Trajectory>& demos, double eps_reg) {
    const auto T = demos.front().points().rows();
    const auto d = demos.front().points().cols();
    StepStatistics s{mean_points(demos), {}};
    s.weight.reserve(static_cast<std::size_t>(T));
    const double n = static_cast<double>(demos.size());
    for (Eigen::Index t = 0; t < T; ++t) {
        Matrix cov = Matrix::Zero(d, d);
        if (demos.size() > 1) {
            for (const auto& demo : demos) {
                const Vector dev = (demo.points().row(t) - s.mean.row(t)).transpose();
                cov += dev * dev.transpose();
            }
            cov /= n;
        }
        cov.diagonal().array() += eps_reg;
        Matrix w = cov.ldlt().solve(Matrix::Identity(d, d));
        s.weight.push_back(0.5 * (w + w.transpose()));
    }
    return s;
}

// Adds lambda E^T E (x) I_d + mu R^T R (x) I_d to q.
void add_smoothing(Matrix& q, std::size_t steps, std::size_t d, const Smoothing& smooth) {
    if (smooth.lambda < 0.0 || smooth.mu < 0.0) fail(ErrorKind::InvalidArgument, "smoothing weights must be >= 0");
    const auto dd = static_cast<Eigen::Index>(d);
    auto add_operator = [&](const Matrix& op, double weight) {
        if (weight == 0.0 || op.rows() == 0) return;
        const Matrix gram = weight * op.transpose() * op;
        for (Eigen::Index i = 0; i < gram.rows(); ++i)
            for (Eigen::Index j = std::max<Eigen::Index>(0, i - 2); j <= std::min<Eigen::Index>(gram.cols() - 1, i + 2); ++j)
                if (gram(i, j) != 0.0)
                    for (Eigen::Index k = 0; k < dd; ++k) q(i * dd + k, j * dd + k) += gram(i, j);
    };
    if (steps >= 2) add_operator(edge_operator(steps), smooth.lambda);
    if (steps >= 3) add_operator(rib_operator(steps), smooth.mu);
}

void add_stat_terms(Matrix& q, Vector& g, double& c, const StepStatistics& s, double sign) {
    const auto d = s.mean.cols();
    for (Eigen::Index t = 0; t < s.mean.rows(); ++t) {
        const Matrix& w = s.weight[static_cast<std::size_t>(t)];
        const Vector m = s.mean.row(t).transpose();
        const Vector wm = w * m;
        q.block(t * d, t * d, d, d) += sign * w;
        g.segment(t * d, d) += sign * wm;
        c += sign * m.dot(wm);
    }
}

void check_model(const StatModel& model) {
    if (model.steps < 1 || model.dim < 1) fail(ErrorKind::InvalidArgument, "empty statistical model");
    auto check = [&](const std::optional<StepStatistics>& s) {
        if (!s) return;
        if (static_cast<std::size_t>(s->mean.rows()) != model.steps || static_cast<std::size_t>(s->mean.cols()) != model.dim ||
            s->weight.size() != model.steps)
            fail(ErrorKind::InvalidArgument, "statistics do not match the model shape");
    };
    check(model.success);
    check(model.failure);
}

bool positive_definite_with_margin(const Matrix& h, double margin) {
    Matrix shifted = h;
    shifted.diagonal().array() -= margin;
    try {
        Cholesky chol{SymMatrix(std::move(shifted))};
        (void)chol;
        return true;
    } catch (const NotPositiveDefiniteError&) {
        return false;
    }
}

Matrix solve_cost(const QuadraticCost& cost, const ConstraintSet& cons, std::size_t steps, std::size_t d) {
    validate(cons, steps, d);
    const auto dd = static_cast<Eigen::Index>(d);
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(cons.pins.size()) * dd, cost.g.size());
    Vector p(c.rows());
    for (std::size_t r = 0; r < cons.pins.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r) * dd;
        for (Eigen::Index k = 0; k < dd; ++k) {
            c(row + k, static_cast<Eigen::Index>(cons.pins[r].node) * dd + k) = 1.0;
            p(row + k) = cons.pins[r].target(k);
        }
    }
    const auto sol = solve_kkt(cost.hessian(), c, Vector(2.0 * cost.g), p);
    return unflatten(sol.x, d);
}

}  // namespace

StatModel encode(const DemoSet& set, double eps_reg) {
    if (!(eps_reg > 0.0)) fail(ErrorKind::InvalidArgument, "eps_reg must be positive");
    const auto T = set.common_len();
    if (T == 0) fail(ErrorKind::InvalidArgument, "demo set must be aligned before encoding");
    StatModel model;
    model.steps = T;
    model.dim = set.dim();
    model.eps_reg = eps_reg;
    const auto good = set.subset(Label::Success);
    const auto bad = set.subset(Label::Failure);
    if (!good.empty()) model.success = statistics(good, eps_reg);
    if (!bad.empty()) model.failure = statistics(bad, eps_reg);
    return model;
}

double QuadraticCost::value(const Matrix& x) const {
    const Vector v = flatten(x);
    return v.dot(q.dense() * v) - 2.0 * g.dot(v) + c;
}

Matrix QuadraticCost::gradient(const Matrix& x) const {
    const Vector v = flatten(x);
    return unflatten(2.0 * (q.dense() * v - g), static_cast<std::size_t>(x.cols()));
}

QuadraticCost failure_aware_cost(const StatModel& model, double beta, const Smoothing& smooth) {
    check_model(model);
    if (!std::isfinite(beta) || beta < 0.0) fail(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
    const auto n = static_cast<Eigen::Index>(model.steps * model.dim);
    Matrix q = Matrix::Zero(n, n);
    Vector g = Vector::Zero(n);
    double c = 0.0;
    if (model.success) add_stat_terms(q, g, c, *model.success, 1.0);
    if (beta != 0.0 && model.failure) add_stat_terms(q, g, c, *model.failure, -beta);
    add_smoothing(q, model.steps, model.dim, smooth);
    return QuadraticCost{SymMatrix(std::move(q)), std::move(g), c};
}

QuadraticCost failed_only_cost(const StatModel& model, double rho, const Matrix& reference, double beta,
                               const Smoothing& smooth) {
    check_model(model);
    if (!model.failure) fail(ErrorKind::InvalidArgument, "failed-only mode needs failed demonstrations");
    if (!std::isfinite(beta) || beta < 0.0) fail(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
    if (static_cast<std::size_t>(reference.rows()) != model.steps || static_cast<std::size_t>(reference.cols()) != model.dim)
        fail(ErrorKind::InvalidArgument, "reference does not match the model shape");
    const auto n = static_cast<Eigen::Index>(model.steps * model.dim);
    Matrix q = Matrix::Zero(n, n);
    Vector g = Vector::Zero(n);
    double c = 0.0;
    if (beta != 0.0) add_stat_terms(q, g, c, *model.failure, -beta);
    const Vector ref = flatten(reference);
    q.diagonal().array() += rho;
    g += rho * ref;
    c += rho * ref.squaredNorm();
    add_smoothing(q, model.steps, model.dim, smooth);
    return QuadraticCost{SymMatrix(std::move(q)), std::move(g), c};
}

FailureAwareResult solve_repro(const StatModel& model, double beta, const Smoothing& smooth, const ConstraintSet& cons) {
    check_model(model);
    if (!model.success)
        fail(ErrorKind::InvalidArgument, "no successful demonstrations; use the failed-only mode with a trust region");
    if (!std::isfinite(beta) || beta < 0.0) fail(ErrorKind::InvalidArgument, "beta must be finite and >= 0");
    const auto& settings = numeric_settings();
    const double gamma = settings.hessian_margin;

    // Bisect against twice the margin so eigenvalue round-off cannot push the
    // accepted Hessian back under gamma.
    auto convex = [&](double b) {
        return positive_definite_with_margin(failure_aware_cost(model, b, smooth).hessian().dense(), 2.0 * gamma);
    };
    double beta_used = beta;
    if (!convex(beta)) {
        // The bracket depends only on the model, so every infeasible beta
        // lands on the same value and beta_used stays monotone in beta.
        double lo = 0.0;
        double hi = 1.0;
        while (hi < beta && convex(hi)) {
            lo = hi;
            hi *= 2.0;
        }
        for (int i = 0; i < settings.beta_bisection_steps; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (convex(mid) ? lo : hi) = mid;
        }
        beta_used = lo;
    }
    const QuadraticCost cost = failure_aware_cost(model, beta_used, smooth);
    const double min_eig = min_eigenvalue(cost.hessian());
    if (min_eig < gamma) fail(ErrorKind::IllPosedEnergy, "success terms alone are not positive definite");
    Matrix x = solve_cost(cost, cons, model.steps, model.dim);
    return {std::move(x), beta_used, min_eig};
}

double min_trust_region(const StatModel& model, double beta) {
    if (!model.failure) fail(ErrorKind::InvalidArgument, "failed-only mode needs failed demonstrations");
    double worst = 0.0;
    for (const auto& w : model.failure->weight) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(w, Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues()(eig.eigenvalues().size() - 1));
    }
    return beta * worst;
}

Matrix default_reference(const StatModel& model, const ConstraintSet& cons) {
    if (!model.failure) fail(ErrorKind::InvalidArgument, "failed-only mode needs failed demonstrations");
    Vector start = model.failure->mean.row(0).transpose();
    Vector goal = model.failure->mean.row(model.failure->mean.rows() - 1).transpose();
    for (const auto& pin : cons.pins) {
        if (pin.node == 0) start = pin.target;
        if (pin.node + 1 == model.steps) goal = pin.target;
    }
    Matrix ends(2, static_cast<Eigen::Index>(model.dim));
    ends.row(0) = start.transpose();
    ends.row(1) = goal.transpose();
    if (model.steps == 1) return ends.topRows(1);
    return resample(Trajectory::with_uniform_times(ends), model.steps).points();
}

Matrix solve_failed_only(const StatModel& model, double rho, const std::optional<Matrix>& reference, double beta,
                             const Smoothing& smooth, const ConstraintSet& cons) {
    check_model(model);
    if (!(rho > 0.0)) fail(ErrorKind::InvalidArgument, "rho must be positive");
    const double needed = min_trust_region(model, beta);
    if (!(rho > needed)) throw TrustRegionTooWeakError(rho, needed);
    const Matrix ref = reference ? *reference : default_reference(model, cons);
    const QuadraticCost cost = failed_only_cost(model, rho, ref, beta, smooth);
    if (min_eigenvalue(cost.hessian()) < numeric_settings().hessian_margin) throw TrustRegionTooWeakError(rho, needed);
    return solve_cost(cost, cons, model.steps, model.dim);
}

double repulsion(const StatModel& model, const Matrix& x) {
    if (!model.failure) return 0.0;
    double total = 0.0;
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        const Vector dev = (x.row(t) - model.failure->mean.row(t)).transpose();
        total += dev.dot(model.failure->weight[static_cast<std::size_t>(t)] * dev);
    }
    return total;
}

}  // namespace skillforge
