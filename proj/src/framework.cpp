#include "skillforge/framework.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "skillforge/constrained.hpp"
#include "skillforge/error.hpp"
#include "skillforge/parallel.hpp"

namespace skillforge {

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, "framework", msg); }

constexpr std::size_t kMaxGridPoints = 15 * 15 * 15;

std::size_t rep_slot(Representation r) { return static_cast<std::size_t>(r); }

std::vector<std::size_t> unravel(std::size_t flat, std::size_t dim, std::size_t res) {
    std::vector<std::size_t> index(dim);
    for (std::size_t k = dim; k-- > 0;) {
        index[k] = flat % res;
        flat /= res;
    }
    return index;
}

}  // namespace

const char* to_string(Representation r) noexcept {
    switch (r) {
        case Representation::ElasticMap: return "elastic_map";
        case Representation::Dmp: return "dmp";
        case Representation::Lte: return "lte";
    }
    return "unknown";
}

Representation parse_representation(const std::string& s) {
    for (auto r : kAllRepresentations)
        if (s == to_string(r)) return r;
    fail(ErrorKind::InvalidArgument, "unknown representation '" + s + "'");
}

const char* to_string(PoiKind p) noexcept {
    switch (p) {
        case PoiKind::Initial: return "initial";
        case PoiKind::Final: return "final";
        case PoiKind::Rigid: return "rigid";
    }
    return "unknown";
}

PoiKind parse_poi_kind(const std::string& s) {
    for (auto p : {PoiKind::Initial, PoiKind::Final, PoiKind::Rigid})
        if (s == to_string(p)) return p;
    fail(ErrorKind::InvalidArgument, "unknown point-of-interest kind '" + s + "'");
}

RepresentationPool train_pool(const Trajectory& demo, const std::vector<Representation>& reps,
                              const RepresentationOptions& opts) {
    RepresentationPool pool{demo, std::nullopt, std::nullopt, std::nullopt};
    for (auto rep : reps) {
        switch (rep) {
            case Representation::ElasticMap: {
                const DemoSet set({demo});
                const std::size_t k = std::clamp<std::size_t>(opts.elastic_nodes, 3, demo.size());
                auto map = construct(set, k, opts.elastic_strategy, opts.elastic_lambda, opts.elastic_mu);
                pool.elastic = fit(map, set).map;
                break;
            }
            case Representation::Dmp: pool.dmp = dmp_train(demo, opts.dmp_basis); break;
            case Representation::Lte: pool.lte = lte_train(demo); break;
        }
    }
    return pool;
}

Trajectory reproduce_at(const RepresentationPool& pool, Representation rep, PoiKind poi, const Vector& g) {
    const Trajectory& demo = pool.demo;
    Vector start = demo.front();
    Vector goal = demo.back();
    switch (poi) {
        case PoiKind::Initial: start = g; break;
        case PoiKind::Final: goal = g; break;
        case PoiKind::Rigid: {
            const Vector shift = g - demo.front();
            start = g;
            goal = demo.back() + shift;
            break;
        }
    }
    switch (rep) {
        case Representation::ElasticMap: {
            if (!pool.elastic) fail(ErrorKind::InvalidArgument, "elastic map not trained");
            const auto& map = *pool.elastic;
            const auto rep_nodes = reproduce_constrained(map, endpoint_pins(map.node_count(), start, goal)).nodes;
            return resample(node_polyline(rep_nodes), demo.size());
        }
        case Representation::Dmp:
            if (!pool.dmp) fail(ErrorKind::InvalidArgument, "DMP not trained");
            return dmp_reproduce(*pool.dmp, start, goal, demo.size());
        case Representation::Lte:
            if (!pool.lte) fail(ErrorKind::InvalidArgument, "LTE not trained");
            return lte_reproduce(*pool.lte, start, goal, demo.size());
    }
    fail(ErrorKind::InvalidArgument, "unknown representation");
}

SimilarityRegion build_region(const Trajectory& demo, const RegionSpec& spec) {
    const std::size_t d = demo.dim();
    if (d > 3) fail(ErrorKind::InvalidArgument, "similarity regions support at most three dimensions");
    if (spec.resolution < 2) fail(ErrorKind::InvalidArgument, "resolution must be at least 2");
    if (!(spec.tau > 0.0 && spec.tau < 1.0)) fail(ErrorKind::InvalidArgument, "threshold tau must lie in (0, 1)");
    if (static_cast<std::size_t>(spec.half_extents.size()) != d || !(spec.half_extents.array() > 0.0).all())
        fail(ErrorKind::InvalidArgument, "half extents must be positive, one per dimension");
    if (spec.representations.empty()) fail(ErrorKind::InvalidArgument, "representation pool is empty");
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        total *= spec.resolution;
        if (total > kMaxGridPoints) fail(ErrorKind::InvalidArgument, "grid exceeds 15^3 points");
    }
    const Vector center = spec.center ? *spec.center : (spec.poi == PoiKind::Final ? demo.back() : demo.front());
    if (static_cast<std::size_t>(center.size()) != d) fail(ErrorKind::InvalidArgument, "center has the wrong dimension");
    const double sigma = spec.sigma ? *spec.sigma : default_sigma(demo);
    if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "sigma must be positive");

    std::vector<Representation> reps;
    for (auto r : kAllRepresentations)
        if (std::find(spec.representations.begin(), spec.representations.end(), r) != spec.representations.end())
            reps.push_back(r);

    SimilarityRegion region;
    region.dim = d;
    region.resolution = spec.resolution;
    region.lower = center - spec.half_extents;
    region.upper = center + spec.half_extents;
    region.tau = spec.tau;
    region.sigma = sigma;
    region.metric = spec.metric;
    region.poi = spec.poi;
    region.representations = reps;
    region.grid.resize(total);

    const RepresentationPool pool = train_pool(demo, reps, spec.options);

    parallel_for(total, [&](std::size_t flat) {
        GridPoint& point = region.grid[flat];
        const auto index = unravel(flat, d, spec.resolution);
        point.g.resize(static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double u = 2.0 * static_cast<double>(index[k]) / static_cast<double>(spec.resolution - 1) - 1.0;
            point.g(kk) = center(kk) + spec.half_extents(kk) * u;
        }
        point.score.fill(std::numeric_limits<double>::quiet_NaN());
        point.best_score = -1.0;
        for (auto rep : reps) {
            double s = 0.0;
            try {
                s = similarity(spec.metric, reproduce_at(pool, rep, spec.poi, point.g), demo, sigma);
                if (!std::isfinite(s)) {
                    point.diagnostics.push_back(std::string(to_string(rep)) + ": non-finite score");
                    s = 0.0;
                }
            } catch (const std::exception& e) {
                point.diagnostics.push_back(std::string(to_string(rep)) + ": " + e.what());
                s = 0.0;
            }
            point.score[rep_slot(rep)] = s;
            if (s > point.best_score) {
                point.best_score = s;
                point.best = rep;
            }
        }
        point.inside = point.best_score >= spec.tau;
    });
    return region;
}

Selection select(const SimilarityRegion& region, const Vector& g) {
    if (static_cast<std::size_t>(g.size()) != region.dim) fail(ErrorKind::InvalidArgument, "query has the wrong dimension");
    bool outside = false;
    std::vector<double> nearest(region.dim);
    for (std::size_t k = 0; k < region.dim; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        nearest[k] = std::clamp(g(kk), region.lower(kk), region.upper(kk));
        if (!(g(kk) >= region.lower(kk) && g(kk) <= region.upper(kk))) outside = true;
    }
    if (outside) {
        std::ostringstream os;
        os << "query lies outside the similarity region; nearest boundary point (";
        for (std::size_t k = 0; k < nearest.size(); ++k) os << (k ? ", " : "") << nearest[k];
        os << ")";
        throw OutOfRegionError(os.str(), nearest);
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < region.dim; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const double step = (region.upper(kk) - region.lower(kk)) / static_cast<double>(region.resolution - 1);
        const double pos = (g(kk) - region.lower(kk)) / step;
        auto i = static_cast<std::size_t>(std::floor(pos));
        if (pos - static_cast<double>(i) > 0.5) ++i;
        i = std::min(i, region.resolution - 1);
        flat = flat * region.resolution + i;
    }
    const GridPoint& p = region.grid[flat];
    return {flat, p.g, p.best, p.best_score};
}

}  // namespace skillforge
