#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skillforge/dmp.hpp"
#include "skillforge/elastic_map.hpp"
#include "skillforge/lte.hpp"
#include "skillforge/similarity.hpp"

namespace skillforge {

// Similarity-aware selection among several reproducers: every grid point
// around a point of interest is scored by each representation and the best
// one is kept.

/// Fixed order; ties in the best score go to the earliest.
enum class Representation { ElasticMap, Dmp, Lte };

inline constexpr std::array<Representation, 3> kAllRepresentations = {
    Representation::ElasticMap, Representation::Dmp, Representation::Lte};

[[nodiscard]] const char* to_string(Representation r) noexcept;
[[nodiscard]] Representation parse_representation(const std::string& s);

/// initial/final move one endpoint to the grid point; rigid translates both
/// endpoints by (grid point - demo start).
enum class PoiKind { Initial, Final, Rigid };

[[nodiscard]] const char* to_string(PoiKind p) noexcept;
[[nodiscard]] PoiKind parse_poi_kind(const std::string& s);

struct RepresentationOptions {
    std::size_t elastic_nodes = 20;  // capped at the demo length
    Strategy elastic_strategy{};
    std::optional<double> elastic_lambda;
    std::optional<double> elastic_mu;
    std::size_t dmp_basis = 30;
};

struct RegionSpec {
    PoiKind poi = PoiKind::Initial;
    std::optional<Vector> center;  // defaults to the demo's point of interest
    Vector half_extents;           // per axis, > 0
    std::size_t resolution = 5;    // samples per axis, >= 2; resolution^d <= 15^3
    MetricId metric = MetricId::Frechet;
    std::optional<double> sigma;   // defaults to default_sigma(demo)
    double tau = 0.5;              // inside threshold, in (0, 1)
    std::vector<Representation> representations{kAllRepresentations.begin(), kAllRepresentations.end()};
    RepresentationOptions options;
};

struct GridPoint {
    Vector g;
    std::array<double, 3> score{};     // per Representation; NaN when not in the pool
    double best_score = 0.0;
    Representation best = Representation::ElasticMap;
    bool inside = false;
    std::vector<std::string> diagnostics;
};

struct SimilarityRegion {
    std::size_t dim = 0;
    std::size_t resolution = 0;
    Vector lower;
    Vector upper;
    double tau = 0.5;
    double sigma = 1.0;
    MetricId metric = MetricId::Frechet;
    PoiKind poi = PoiKind::Initial;
    std::vector<Representation> representations;
    std::vector<GridPoint> grid;  // row-major, last axis fastest
};

/// The three trained reproducers for one demonstration.
struct RepresentationPool {
    Trajectory demo;
    std::optional<ElasticMap> elastic;
    std::optional<DmpModel> dmp;
    std::optional<LteModel> lte;
};

[[nodiscard]] RepresentationPool train_pool(const Trajectory& demo, const std::vector<Representation>& reps,
                                            const RepresentationOptions& opts = {});

/// Reproduction of the pool's skill with the point of interest moved to g.
[[nodiscard]] Trajectory reproduce_at(const RepresentationPool& pool, Representation rep, PoiKind poi, const Vector& g);

/// Throws invalid-argument for a malformed spec; representation failures at
/// single grid points score 0 and leave a diagnostic.
[[nodiscard]] SimilarityRegion build_region(const Trajectory& demo, const RegionSpec& spec);

struct Selection {
    std::size_t index = 0;
    Vector grid_point;
    Representation representation = Representation::ElasticMap;
    double score = 0.0;
};

/// Best representation at the nearest grid point (per-axis ties go to the
/// lower index). Throws OutOfRegionError outside the grid bounds.
[[nodiscard]] Selection select(const SimilarityRegion& region, const Vector& g);

}  // namespace skillforge
