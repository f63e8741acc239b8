#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skillforge/dmp.hpp"
#include "skillforge/elastic_map.hpp"
#include "skillforge/failure_aware.hpp"
#include "skillforge/lte.hpp"
#include "skillforge/settings.hpp"
#include "skillforge/trajectory.hpp"

namespace skillforge {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kFormatVersion = "1.0";

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

// --- trajectories: CSV with header `t,x1,...,xd` -------------------------

/// Throws format-error (missing/odd header, unparsable or non-finite value)
/// or invalid-trajectory (non-increasing t); both name the data row (1-based,
/// header excluded) and the line.
[[nodiscard]] Trajectory parse_trajectory_csv(std::string_view text, const std::string& source = "<memory>");
[[nodiscard]] std::string trajectory_to_csv(const Trajectory& traj);
[[nodiscard]] Trajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
/// FNV-1a 64-bit, 16 hex digits.
[[nodiscard]] std::string content_hash(std::string_view bytes);

// --- demo manifests --------------------------------------------------------

struct ManifestEntry {
    std::filesystem::path path;  // relative entries resolve against the manifest's directory
    Label label = Label::Success;
};

struct DemoManifest {
    std::string version = kFormatVersion;
    std::optional<std::string> units;
    std::vector<ManifestEntry> entries;
};

[[nodiscard]] DemoManifest parse_manifest(std::string_view text);
[[nodiscard]] std::string manifest_to_json(const DemoManifest& manifest);
[[nodiscard]] DemoManifest load_manifest(const std::filesystem::path& path);
/// Loads every entry; relative paths are taken relative to `base`.
[[nodiscard]] DemoSet load_demos(const DemoManifest& manifest, const std::filesystem::path& base);
[[nodiscard]] Label parse_label(const std::string& s);

// --- skill model files -----------------------------------------------------

enum class ModelKind { ElasticMap, Dmp, Lte, FailureAware };

[[nodiscard]] const char* to_string(ModelKind kind) noexcept;
[[nodiscard]] ModelKind parse_model_kind(const std::string& s);

struct Provenance {
    std::map<std::string, std::string> input_hashes;
    nlohmann::json parameters = nlohmann::json::object();
    std::string tool_version = kToolVersion;
};

struct SkillModelFile {
    std::string format_version = kFormatVersion;
    ModelKind kind = ModelKind::ElasticMap;
    nlohmann::json payload;
    Provenance provenance;
    NumericSettings settings;
};

/// Canonical text: sorted keys, two-space indent, trailing newline. Parsing
/// and re-serializing canonical text is byte-identical.
[[nodiscard]] std::string serialize_model(const SkillModelFile& file);
/// Throws format-error or version-mismatch (major.minor must match).
[[nodiscard]] SkillModelFile parse_model(std::string_view text);
void save_model(const std::filesystem::path& path, const SkillModelFile& file);
[[nodiscard]] SkillModelFile load_model(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json to_json(const Matrix& m);
[[nodiscard]] nlohmann::json to_json(const Vector& v);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j);
[[nodiscard]] Vector vector_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const Trajectory& traj);
[[nodiscard]] Trajectory trajectory_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const ElasticMap& map);
[[nodiscard]] ElasticMap elastic_map_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const DmpModel& model);
[[nodiscard]] DmpModel dmp_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const LteModel& model);
[[nodiscard]] LteModel lte_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const StatModel& model);
[[nodiscard]] StatModel stat_model_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const NumericSettings& s);
[[nodiscard]] NumericSettings settings_from_json(const nlohmann::json& j);

}  // namespace skillforge
