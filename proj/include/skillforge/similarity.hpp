#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "skillforge/trajectory.hpp"

namespace skillforge {

enum class MetricId {
    Frechet,         // discrete Frechet distance
    Dtw,             // dynamic time warping, steps {(1,0),(0,1),(1,1)}, Euclidean cost
    Hausdorff,
    Sse,             // sum of squared pointwise distances
    Mae,             // mean pointwise Euclidean distance
    Endpoint,        // |a_0 - b_0| + |a_end - b_end|
    Area,            // trapezoid area between the curves
    Curvature,       // L2 of second-difference profile difference
    VelocityCosine,  // 1 - mean cosine between velocity vectors
    Procrustes,      // disparity after optimal translation, rotation, scale
    Jerk,            // L2 of third-difference profile difference
};

inline constexpr std::array<MetricId, 11> kAllMetrics = {
    MetricId::Frechet, MetricId::Dtw,       MetricId::Hausdorff,      MetricId::Sse,
    MetricId::Mae,     MetricId::Endpoint,  MetricId::Area,           MetricId::Curvature,
    MetricId::VelocityCosine, MetricId::Procrustes, MetricId::Jerk,
};

[[nodiscard]] const char* to_string(MetricId id) noexcept;
[[nodiscard]] MetricId parse_metric(const std::string& s);

struct MetricOptions {
    bool dtw_normalize = false;  // divide DTW cost by warping-path length
};

/// Frechet, DTW and Hausdorff work on the raw samples; all other metrics
/// resample both curves to max(|A|, |B|) samples first.
[[nodiscard]] double distance(MetricId id, const Trajectory& a, const Trajectory& b, const MetricOptions& opts = {});

[[nodiscard]] double discrete_frechet(const Matrix& a, const Matrix& b);
[[nodiscard]] double dtw(const Matrix& a, const Matrix& b, bool normalize = false);
[[nodiscard]] double hausdorff(const Matrix& a, const Matrix& b);

/// exp(-d / sigma).
[[nodiscard]] double similarity(MetricId id, const Trajectory& a, const Trajectory& b, double sigma,
                                const MetricOptions& opts = {});
[[nodiscard]] double similarity_from_distance(double d, double sigma);

/// 0.1 x arc length of the demonstration.
[[nodiscard]] double default_sigma(const Trajectory& demo);

enum class Perturbation { Translation, Rotation, Scaling, Noise, TimeWarp, Occlusion };

inline constexpr std::array<Perturbation, 6> kAllPerturbations = {
    Perturbation::Translation, Perturbation::Rotation, Perturbation::Scaling,
    Perturbation::Noise,       Perturbation::TimeWarp, Perturbation::Occlusion,
};

[[nodiscard]] const char* to_string(Perturbation p) noexcept;

struct TrajectoryPair {
    Perturbation family;
    Trajectory base;
    Trajectory perturbed;
};

struct BiasRow {
    MetricId metric;
    std::array<double, 6> mean{};       // indexed like kAllPerturbations
    std::array<bool, 6> invariant{};    // mean < 1e-9
    std::array<std::size_t, 6> count{};
};

/// Mean distance per metric and perturbation family over the corpus, with
/// invariance flags. Families with no pairs report NaN and no flag.
[[nodiscard]] std::vector<BiasRow> bias_report(const std::vector<TrajectoryPair>& corpus, const MetricOptions& opts = {});

}  // namespace skillforge
