#include "skillforge/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skillforge/error.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "similarity_metrics", msg); }

double dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) { return (a.row(i) - b.row(j)).norm(); }

double directed_hausdorff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < b.rows(); ++j) best = std::min(best, dist(a, i, b, j));
        worst = std::max(worst, best);
    }
    return worst;
}

double profile_l2(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

double area_between(const Matrix& a, const Matrix& b) {
    double area = 0.0;
    for (Eigen::Index i = 0; i + 1 < a.rows(); ++i) {
        const double gap = 0.5 * ((a.row(i) - b.row(i)).norm() + (a.row(i + 1) - b.row(i + 1)).norm());
        const double ds = 0.5 * ((a.row(i + 1) - a.row(i)).norm() + (b.row(i + 1) - b.row(i)).norm());
        area += gap * ds;
    }
    return area;
}

double velocity_cosine(const Matrix& a, const Matrix& b) {
    const auto m = a.rows() - 1;
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::RowVectorXd va = a.row(i + 1) - a.row(i);
        const Eigen::RowVectorXd vb = b.row(i + 1) - b.row(i);
        const double na = va.squaredNorm();
        const double nb = vb.squaredNorm();
        double cosine;
        if (na == 0.0 || nb == 0.0)
            cosine = (na == 0.0 && nb == 0.0) ? 1.0 : 0.0;
        else
            cosine = std::clamp(va.dot(vb) / std::sqrt(na * nb), -1.0, 1.0);
        total += cosine;
    }
    return std::max(0.0, 1.0 - total / static_cast<double>(m));
}

// Centers and scales to unit Frobenius norm; returns false for a single point.
bool standardize(Matrix& x) {
    x.rowwise() -= x.colwise().mean();
    const double n = x.norm();
    if (!(n > 0.0)) return false;
    x /= n;
    return true;
}

double procrustes(const Matrix& a, const Matrix& b) {
    if (a == b) return 0.0;
    Matrix sa = a;
    Matrix sb = b;
    const bool ok_a = standardize(sa);
    const bool ok_b = standardize(sb);
    if (!ok_a || !ok_b) return ok_a == ok_b ? 0.0 : 1.0;
    // Kabsch: the best proper rotation R maximizes tr(R^T sa^T sb)
    Eigen::JacobiSVD<Matrix> svd(sa.transpose() * sb, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector sv = svd.singularValues();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) sv(sv.size() - 1) = -sv(sv.size() - 1);
    const double t = sv.sum();
    return std::max(0.0, 1.0 - t * t);
}

}  // namespace

const char* to_string(MetricId id) noexcept {
    switch (id) {
        case MetricId::Frechet: return "frechet";
        case MetricId::Dtw: return "dtw";
        case MetricId::Hausdorff: return "hausdorff";
        case MetricId::Sse: return "sse";
        case MetricId::Mae: return "mae";
        case MetricId::Endpoint: return "endpoint";
        case MetricId::Area: return "area";
        case MetricId::Curvature: return "curvature";
        case MetricId::VelocityCosine: return "velocity_cosine";
        case MetricId::Procrustes: return "procrustes";
        case MetricId::Jerk: return "jerk";
    }
    return "unknown";
}

MetricId parse_metric(const std::string& s) {
    for (auto id : kAllMetrics)
        if (s == to_string(id)) return id;
    fail(ErrorKind::InvalidArgument, "unknown metric '" + s + "'");
}

double discrete_frechet(const Matrix& a, const Matrix& b) {
    const auto n = a.rows();
    const auto m = b.rows();
    Matrix ca(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double d = dist(a, i, b, j);
            if (i == 0 && j == 0)
                ca(i, j) = d;
            else if (i == 0)
                ca(i, j) = std::max(ca(i, j - 1), d);
            else if (j == 0)
                ca(i, j) = std::max(ca(i - 1, j), d);
            else
                ca(i, j) = std::max(std::min({ca(i - 1, j), ca(i - 1, j - 1), ca(i, j - 1)}), d);
        }
    }
    return ca(n - 1, m - 1);
}

double dtw(const Matrix& a, const Matrix& b, bool normalize) {
    const auto n = a.rows();
    const auto m = b.rows();
    Matrix cost(n, m);
    Eigen::MatrixXi len(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double d = dist(a, i, b, j);
            if (i == 0 && j == 0) {
                cost(i, j) = d;
                len(i, j) = 1;
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            int best_len = 0;
            auto consider = [&](Eigen::Index pi, Eigen::Index pj) {
                if (pi < 0 || pj < 0) return;
                if (cost(pi, pj) < best) {
                    best = cost(pi, pj);
                    best_len = len(pi, pj);
                }
            };
            consider(i - 1, j - 1);
            consider(i - 1, j);
            consider(i, j - 1);
            cost(i, j) = best + d;
            len(i, j) = best_len + 1;
        }
    }
    const double total = cost(n - 1, m - 1);
    return normalize ? total / static_cast<double>(len(n - 1, m - 1)) : total;
}

double hausdorff(const Matrix& a, const Matrix& b) { return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a)); }

double distance(MetricId id, const Trajectory& a, const Trajectory& b, const MetricOptions& opts) {
    if (a.dim() != b.dim()) fail(ErrorKind::InvalidArgument, "trajectories differ in dimension");
    switch (id) {
        case MetricId::Frechet: return discrete_frechet(a.points(), b.points());
        case MetricId::Dtw: return dtw(a.points(), b.points(), opts.dtw_normalize);
        case MetricId::Hausdorff: return hausdorff(a.points(), b.points());
        default: break;
    }
    const auto n = std::max(a.size(), b.size());
    const Matrix pa = a.size() == n ? a.points() : resample(a, n).points();
    const Matrix pb = b.size() == n ? b.points() : resample(b, n).points();
    switch (id) {
        case MetricId::Sse: return (pa - pb).squaredNorm();
        case MetricId::Mae: return (pa - pb).rowwise().norm().mean();
        case MetricId::Endpoint:
            return (pa.row(0) - pb.row(0)).norm() + (pa.row(pa.rows() - 1) - pb.row(pb.rows() - 1)).norm();
        case MetricId::Area: return area_between(pa, pb);
        case MetricId::Curvature: return n < 3 ? 0.0 : profile_l2(second_differences(pa), second_differences(pb));
        case MetricId::VelocityCosine: return velocity_cosine(pa, pb);
        case MetricId::Procrustes: return procrustes(pa, pb);
        case MetricId::Jerk: return n < 4 ? 0.0 : profile_l2(third_differences(pa), third_differences(pb));
        default: break;
    }
    fail(ErrorKind::InvalidArgument, "unhandled metric");
}

double similarity_from_distance(double d, double sigma) {
    if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "sigma must be positive");
    return std::exp(-d / sigma);
}

double similarity(MetricId id, const Trajectory& a, const Trajectory& b, double sigma, const MetricOptions& opts) {
    if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "sigma must be positive");
    return similarity_from_distance(distance(id, a, b, opts), sigma);
}

double default_sigma(const Trajectory& demo) {
    const double s = 0.1 * arc_length(demo);
    return s > 0.0 ? s : 1.0;
}

const char* to_string(Perturbation p) noexcept {
    switch (p) {
        case Perturbation::Translation: return "translation";
        case Perturbation::Rotation: return "rotation";
        case Perturbation::Scaling: return "scaling";
        case Perturbation::Noise: return "noise";
        case Perturbation::TimeWarp: return "time_warp";
        case Perturbation::Occlusion: return "occlusion";
    }
    return "unknown";
}

std::vector<BiasRow> bias_report(const std::vector<TrajectoryPair>& corpus, const MetricOptions& opts) {
    if (corpus.empty()) fail(ErrorKind::InvalidArgument, "bias report needs a non-empty corpus");
    std::vector<BiasRow> rows;
    for (auto id : kAllMetrics) {
        BiasRow row{id, {}, {}, {}};
        std::array<double, 6> sum{};
        for (const auto& pair : corpus) {
            const auto f = static_cast<std::size_t>(pair.family);
            sum[f] += distance(id, pair.base, pair.perturbed, opts);
            ++row.count[f];
        }
        for (std::size_t f = 0; f < 6; ++f) {
            row.mean[f] = row.count[f] ? sum[f] / static_cast<double>(row.count[f]) : std::numeric_limits<double>::quiet_NaN();
            row.invariant[f] = row.count[f] > 0 && row.mean[f] < 1e-9;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace skillforge
