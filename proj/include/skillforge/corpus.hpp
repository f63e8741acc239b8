#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skillforge/io.hpp"
#include "skillforge/similarity.hpp"
#include "skillforge/trajectory.hpp"

namespace skillforge {

enum class SkillFamily { Line, Sine, Arc, LShape, Pushing };

[[nodiscard]] const char* to_string(SkillFamily f) noexcept;
/// "line", "sine", "arc", "l_shape", "pushing"; anything else is invalid-argument.
[[nodiscard]] SkillFamily parse_skill_family(const std::string& s);

struct CorpusSpec {
    SkillFamily family = SkillFamily::Line;
    std::size_t count = 5;      // demos per label; pushing emits `count` of each
    std::size_t samples = 100;
    double noise = 0.0;         // std-dev of additive Gaussian noise on interior samples
    double jitter = 0.05;       // shape variation between demos
};

struct GeneratedCorpus {
    std::vector<Trajectory> demos;
    std::vector<Label> labels;
};

/// Pushing task: (0,0) -> (1,0) with an obstacle at this point. Successful
/// demos bulge around it (y = a sin(pi s), a in [0.2, 0.3]); failed ones pass
/// within 0.03 of it.
[[nodiscard]] Vector pushing_obstacle();

/// 2-D demos on uniform times over [0, 1]. Deterministic in `seed`.
[[nodiscard]] GeneratedCorpus generate_corpus(std::uint64_t seed, const CorpusSpec& spec);

/// Writes demo_000.csv, ... and manifest.json into `dir`.
DemoManifest write_corpus(const std::filesystem::path& dir, std::uint64_t seed, const CorpusSpec& spec);

/// Base/perturbed pairs cycling over the six perturbation families and the
/// five skill families.
[[nodiscard]] std::vector<TrajectoryPair> make_bias_corpus(std::uint64_t seed, std::size_t pairs = 286);

}  // namespace skillforge
