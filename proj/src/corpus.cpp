#include "skillforge/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "skillforge/error.hpp"

namespace skillforge {

namespace {

constexpr const char* kModule = "cli_io";
constexpr double kPi = std::numbers::pi;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Matrix shape(SkillFamily family, std::size_t n, double jitter, Rng& rng, Label label = Label::Success) {
    Matrix p(static_cast<Eigen::Index>(n), 2);
    const auto s_at = [n](Eigen::Index i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
    switch (family) {
        case SkillFamily::Line: {
            Eigen::Vector2d a(uniform(rng, -jitter, jitter), uniform(rng, -jitter, jitter));
            Eigen::Vector2d b(1.0 + uniform(rng, -jitter, jitter), 1.0 + uniform(rng, -jitter, jitter));
            for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) = (a + s_at(i) * (b - a)).transpose();
            break;
        }
        case SkillFamily::Sine: {
            const double amp = 0.25 * (1.0 + uniform(rng, -jitter, jitter) * 4.0);
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const double s = s_at(i);
                p(i, 0) = s;
                p(i, 1) = amp * std::sin(2.0 * kPi * s);
            }
            break;
        }
        case SkillFamily::Arc: {
            const double r = 0.5 * (1.0 + uniform(rng, -jitter, jitter));
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const double s = s_at(i);
                p(i, 0) = r - r * std::cos(kPi * s);
                p(i, 1) = r * std::sin(kPi * s);
            }
            break;
        }
        case SkillFamily::LShape: {
            const double h = 1.0 + uniform(rng, -jitter, jitter);
            const double w = 1.0 + uniform(rng, -jitter, jitter);
            const double corner = h / (h + w);
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const double s = s_at(i);
                if (s <= corner) {
                    p(i, 0) = 0.0;
                    p(i, 1) = h * s / corner;
                } else {
                    p(i, 0) = w * (s - corner) / (1.0 - corner);
                    p(i, 1) = h;
                }
            }
            break;
        }
        case SkillFamily::Pushing: {
            const double amp = label == Label::Success ? uniform(rng, 0.2, 0.3) : uniform(rng, -0.03, 0.03);
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const double s = s_at(i);
                p(i, 0) = s;
                p(i, 1) = amp * std::sin(kPi * s);
            }
            break;
        }
    }
    return p;
}

void add_noise(Matrix& p, double sigma, Rng& rng, bool keep_ends) {
    if (sigma <= 0.0) return;
    std::normal_distribution<double> nd(0.0, sigma);
    const Eigen::Index lo = keep_ends ? 1 : 0, hi = keep_ends ? p.rows() - 1 : p.rows();
    for (Eigen::Index i = lo; i < hi; ++i)
        for (Eigen::Index c = 0; c < p.cols(); ++c) p(i, c) += nd(rng);
}

Trajectory perturb(const Trajectory& base, Perturbation kind, Rng& rng) {
    Matrix p = base.points();
    const Eigen::RowVector2d centroid = p.colwise().mean();
    switch (kind) {
        case Perturbation::Translation: {
            const double a = uniform(rng, 0.0, 2.0 * kPi);
            p.rowwise() += Eigen::RowVector2d(std::cos(a), std::sin(a));
            break;
        }
        case Perturbation::Rotation: {
            const double a = uniform(rng, 0.2, 1.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
            Eigen::Matrix2d r;
            r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            p = ((p.rowwise() - centroid) * r.transpose()).rowwise() + centroid;
            break;
        }
        case Perturbation::Scaling: {
            const double f = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
            p = ((p.rowwise() - centroid) * f).rowwise() + centroid;
            break;
        }
        case Perturbation::Noise:
            add_noise(p, 0.02, rng, false);
            break;
        case Perturbation::TimeWarp: {
            const double gamma = uniform(rng, 0.6, 1.6);
            const auto& t = base.times();
            const double t0 = t(0), span = base.duration();
            for (Eigen::Index i = 0; i < p.rows(); ++i) {
                const double u = (t(i) - t0) / span;
                p.row(i) = base.at(t0 + span * std::pow(u, gamma)).transpose();
            }
            break;
        }
        case Perturbation::Occlusion: {
            const auto n = p.rows();
            const auto cut_lo = static_cast<Eigen::Index>(std::floor(0.4 * static_cast<double>(n)));
            const auto cut_hi = static_cast<Eigen::Index>(std::floor(0.6 * static_cast<double>(n)));
            const auto kept = n - (cut_hi - cut_lo);
            Matrix q(kept, p.cols());
            Vector t(kept);
            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i >= cut_lo && i < cut_hi) continue;
                q.row(k) = p.row(i);
                t(k++) = base.times()(i);
            }
            return Trajectory(std::move(t), std::move(q));
        }
    }
    return Trajectory(base.times(), std::move(p));
}

}  // namespace

const char* to_string(SkillFamily f) noexcept {
    switch (f) {
        case SkillFamily::Line: return "line";
        case SkillFamily::Sine: return "sine";
        case SkillFamily::Arc: return "arc";
        case SkillFamily::LShape: return "l_shape";
        case SkillFamily::Pushing: return "pushing";
    }
    return "?";
}

SkillFamily parse_skill_family(const std::string& s) {
    for (auto f : {SkillFamily::Line, SkillFamily::Sine, SkillFamily::Arc, SkillFamily::LShape, SkillFamily::Pushing})
        if (s == to_string(f)) return f;
    throw Error(ErrorKind::InvalidArgument, kModule, "unknown skill family '" + s + "'");
}

Vector pushing_obstacle() { return Eigen::Vector2d(0.5, 0.0); }

GeneratedCorpus generate_corpus(std::uint64_t seed, const CorpusSpec& spec) {
    if (spec.count == 0) throw Error(ErrorKind::InvalidArgument, kModule, "count must be positive");
    if (spec.samples < 3) throw Error(ErrorKind::InvalidArgument, kModule, "need at least 3 samples");
    if (!(spec.noise >= 0.0) || !(spec.jitter >= 0.0))
        throw Error(ErrorKind::InvalidArgument, kModule, "noise and jitter must be non-negative");
    Rng rng(seed);
    GeneratedCorpus out;
    const Vector times = uniform_times(0.0, 1.0, spec.samples);
    auto emit = [&](Label label) {
        Matrix p = shape(spec.family, spec.samples, spec.jitter, rng, label);
        add_noise(p, spec.noise, rng, true);
        out.demos.emplace_back(times, std::move(p));
        out.labels.push_back(label);
    };
    for (std::size_t i = 0; i < spec.count; ++i) {
        emit(Label::Success);
        if (spec.family == SkillFamily::Pushing) emit(Label::Failure);
    }
    return out;
}

DemoManifest write_corpus(const std::filesystem::path& dir, std::uint64_t seed, const CorpusSpec& spec) {
    const auto corpus = generate_corpus(seed, spec);
    std::filesystem::create_directories(dir);
    DemoManifest manifest;
    for (std::size_t i = 0; i < corpus.demos.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "demo_%03zu.csv", i);
        save_trajectory(dir / name, corpus.demos[i]);
        manifest.entries.push_back({name, corpus.labels[i]});
    }
    write_file_atomic(dir / "manifest.json", manifest_to_json(manifest));
    return manifest;
}

std::vector<TrajectoryPair> make_bias_corpus(std::uint64_t seed, std::size_t pairs) {
    static constexpr SkillFamily kFamilies[] = {SkillFamily::Line, SkillFamily::Sine, SkillFamily::Arc,
                                                SkillFamily::LShape, SkillFamily::Pushing};
    Rng rng(seed);
    const Vector times = uniform_times(0.0, 1.0, 60);
    std::vector<TrajectoryPair> out;
    out.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto kind = kAllPerturbations[i % kAllPerturbations.size()];
        const auto family = kFamilies[(i / kAllPerturbations.size()) % std::size(kFamilies)];
        Trajectory base(times, shape(family, 60, 0.05, rng));
        Trajectory perturbed = perturb(base, kind, rng);
        out.push_back({kind, std::move(base), std::move(perturbed)});
    }
    return out;
}

}  // namespace skillforge
