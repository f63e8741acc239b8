#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace skillforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered sequence of timestamped d-dimensional points. Row i of `points()`
/// is the sample at `times()[i]`. Immutable after construction.
class Trajectory {
public:
    /// Throws invalid-trajectory unless there are at least two samples, the
    /// times are strictly increasing and finite, and d >= 1.
    Trajectory(Vector times, Matrix points);

    /// Uniform times on [0, 1].
    static Trajectory with_uniform_times(Matrix points);

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    [[nodiscard]] const Vector& times() const noexcept { return times_; }
    [[nodiscard]] const Matrix& points() const noexcept { return points_; }
    [[nodiscard]] Vector point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
    [[nodiscard]] Vector front() const { return point(0); }
    [[nodiscard]] Vector back() const { return point(size() - 1); }
    [[nodiscard]] double duration() const noexcept { return times_(times_.size() - 1) - times_(0); }

    /// Linear interpolation at time t, clamped to the time span.
    [[nodiscard]] Vector at(double t) const;

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.times_.size() == b.times_.size() && a.points_.rows() == b.points_.rows() &&
               a.points_.cols() == b.points_.cols() && a.times_ == b.times_ && a.points_ == b.points_;
    }

private:
    Vector times_;
    Matrix points_;
};

/// n uniformly spaced times over [first, last]; endpoints exact.
[[nodiscard]] Vector uniform_times(double first, double last, std::size_t n);

/// Resample to n samples at uniform times over the original span. Endpoints
/// are preserved exactly and samples that land on a knot reproduce it exactly,
/// so resampling is idempotent.
[[nodiscard]] Trajectory resample(const Trajectory& traj, std::size_t n);

[[nodiscard]] double arc_length(const Trajectory& traj);
[[nodiscard]] double arc_length(const Matrix& points);

/// Row i is p_i - 2 p_{i+1} + p_{i+2}; size()-2 rows.
[[nodiscard]] Matrix second_differences(const Trajectory& traj);
[[nodiscard]] Matrix second_differences(const Matrix& points);

/// Row i is -p_i + 3 p_{i+1} - 3 p_{i+2} + p_{i+3}.
[[nodiscard]] Matrix third_differences(const Matrix& points);

enum class Label { Success, Failure };

[[nodiscard]] const char* to_string(Label label) noexcept;

/// Labeled collection of demonstrations sharing one dimension.
class DemoSet {
public:
    DemoSet(std::vector<Trajectory> demos, std::vector<Label> labels);
    /// All demos labeled successful.
    explicit DemoSet(std::vector<Trajectory> demos);

    [[nodiscard]] std::size_t size() const noexcept { return demos_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return demos_.front().dim(); }
    [[nodiscard]] const std::vector<Trajectory>& demos() const noexcept { return demos_; }
    [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }
    [[nodiscard]] const Trajectory& operator[](std::size_t i) const { return demos_.at(i); }

    /// Common sample count when every demo has the same length, else 0.
    [[nodiscard]] std::size_t common_len() const noexcept;
    [[nodiscard]] std::size_t shortest() const noexcept;

    /// Demos carrying the given label, in order.
    [[nodiscard]] std::vector<Trajectory> subset(Label label) const;

private:
    std::vector<Trajectory> demos_;
    std::vector<Label> labels_;
};

/// Resample every demo to T samples; labels keep their order.
[[nodiscard]] DemoSet align(const DemoSet& set, std::size_t T);

/// Per-index mean over demos of a common length.
[[nodiscard]] Matrix mean_points(const std::vector<Trajectory>& demos);

}  // namespace skillforge
