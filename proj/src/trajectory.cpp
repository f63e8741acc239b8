#include "skillforge/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "skillforge/error.hpp"

namespace skillforge {

namespace {

[[noreturn]] void invalid_trajectory(const std::string& msg) {
    throw Error(ErrorKind::InvalidTrajectory, "trajectory_core", msg);
}

[[noreturn]] void invalid_argument(const std::string& msg) {
    throw Error(ErrorKind::InvalidArgument, "trajectory_core", msg);
}

}  // namespace

Trajectory::Trajectory(Vector times, Matrix points) : times_(std::move(times)), points_(std::move(points)) {
    if (points_.rows() < 2) invalid_trajectory("a trajectory needs at least two samples");
    if (points_.cols() < 1) invalid_trajectory("trajectory dimension must be at least 1");
    if (times_.size() != points_.rows()) invalid_trajectory("times and points differ in length");
    if (!points_.allFinite() || !times_.allFinite()) invalid_trajectory("non-finite sample");
    for (Eigen::Index i = 1; i < times_.size(); ++i) {
        if (!(times_(i) > times_(i - 1))) {
            std::ostringstream os;
            os << "times are not strictly increasing at sample " << i;
            invalid_trajectory(os.str());
        }
    }
}

Trajectory Trajectory::with_uniform_times(Matrix points) {
    auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) invalid_trajectory("a trajectory needs at least two samples");
    return Trajectory(uniform_times(0.0, 1.0, n), std::move(points));
}

Vector Trajectory::at(double t) const {
    const auto n = times_.size();
    if (t <= times_(0)) return point(0);
    if (t >= times_(n - 1)) return point(static_cast<std::size_t>(n - 1));
    // largest lo with times[lo] <= t
    const double* begin = times_.data();
    auto it = std::upper_bound(begin, begin + n, t);
    auto lo = static_cast<Eigen::Index>(it - begin) - 1;
    const double t0 = times_(lo);
    const double t1 = times_(lo + 1);
    const double a = (t - t0) / (t1 - t0);
    if (a == 0.0) return points_.row(lo).transpose();
    return (points_.row(lo) + a * (points_.row(lo + 1) - points_.row(lo))).transpose();
}

Vector uniform_times(double first, double last, std::size_t n) {
    if (n < 2) invalid_argument("need at least two samples");
    Vector t(static_cast<Eigen::Index>(n));
    const double span = last - first;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) t(static_cast<Eigen::Index>(k)) = first + span * (static_cast<double>(k) / denom);
    t(0) = first;
    t(static_cast<Eigen::Index>(n - 1)) = last;
    return t;
}

Trajectory resample(const Trajectory& traj, std::size_t n) {
    if (n < 2) invalid_argument("resample needs n >= 2");
    const auto& times = traj.times();
    Vector t = uniform_times(times(0), times(times.size() - 1), n);
    Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(traj.dim()));
    for (Eigen::Index k = 0; k < t.size(); ++k) pts.row(k) = traj.at(t(k)).transpose();
    return Trajectory(std::move(t), std::move(pts));
}

double arc_length(const Matrix& points) {
    double total = 0.0;
    for (Eigen::Index i = 1; i < points.rows(); ++i) total += (points.row(i) - points.row(i - 1)).norm();
    return total;
}

double arc_length(const Trajectory& traj) { return arc_length(traj.points()); }

Matrix second_differences(const Matrix& points) {
    if (points.rows() < 3) invalid_argument("second differences need at least three samples");
    const auto m = points.rows() - 2;
    return points.topRows(m) - 2.0 * points.middleRows(1, m) + points.bottomRows(m);
}

Matrix second_differences(const Trajectory& traj) { return second_differences(traj.points()); }

Matrix third_differences(const Matrix& points) {
    if (points.rows() < 4) invalid_argument("third differences need at least four samples");
    const auto m = points.rows() - 3;
    return -points.topRows(m) + 3.0 * points.middleRows(1, m) - 3.0 * points.middleRows(2, m) +
           points.bottomRows(m);
}

const char* to_string(Label label) noexcept { return label == Label::Success ? "success" : "failure"; }

DemoSet::DemoSet(std::vector<Trajectory> demos, std::vector<Label> labels)
    : demos_(std::move(demos)), labels_(std::move(labels)) {
    if (demos_.empty()) invalid_argument("demo set is empty");
    if (labels_.size() != demos_.size()) invalid_argument("one label per demo required");
    const auto d = demos_.front().dim();
    for (const auto& demo : demos_)
        if (demo.dim() != d) invalid_argument("demos differ in dimension");
}

DemoSet::DemoSet(std::vector<Trajectory> demos)
    : DemoSet(demos, std::vector<Label>(demos.size(), Label::Success)) {}

std::size_t DemoSet::common_len() const noexcept {
    const auto n = demos_.front().size();
    for (const auto& demo : demos_)
        if (demo.size() != n) return 0;
    return n;
}

std::size_t DemoSet::shortest() const noexcept {
    std::size_t n = demos_.front().size();
    for (const auto& demo : demos_) n = std::min(n, demo.size());
    return n;
}

std::vector<Trajectory> DemoSet::subset(Label label) const {
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < demos_.size(); ++i)
        if (labels_[i] == label) out.push_back(demos_[i]);
    return out;
}

DemoSet align(const DemoSet& set, std::size_t T) {
    if (T < 2) invalid_argument("align needs T >= 2");
    std::vector<Trajectory> out;
    out.reserve(set.size());
    for (const auto& demo : set.demos()) out.push_back(resample(demo, T));
    return DemoSet(std::move(out), set.labels());
}

Matrix mean_points(const std::vector<Trajectory>& demos) {
    if (demos.empty()) invalid_argument("mean of an empty demo list");
    Matrix sum = Matrix::Zero(demos.front().points().rows(), demos.front().points().cols());
    for (const auto& demo : demos) {
        if (demo.points().rows() != sum.rows()) invalid_argument("demos are not aligned");
        sum += demo.points();
    }
    return sum / static_cast<double>(demos.size());
}

}  // namespace skillforge
