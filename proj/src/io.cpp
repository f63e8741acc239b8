#include "skillforge/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "skillforge/error.hpp"

namespace skillforge {

using nlohmann::json;

namespace {

constexpr const char* kModule = "cli_io";

[[noreturn]] void format_error(const std::string& msg) { throw Error(ErrorKind::FormatError, kModule, msg); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string where(const std::string& source, std::size_t row, std::size_t line) {
    return source + ": row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

// Parses "major.minor[.patch]" into its first two components.
std::pair<int, int> major_minor(const std::string& v) {
    auto parts = split(v, '.');
    if (parts.size() < 2) format_error("bad version string '" + v + "'");
    std::array<int, 2> mm{};
    for (int i = 0; i < 2; ++i) {
        auto p = parts[static_cast<std::size_t>(i)];
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), mm[static_cast<std::size_t>(i)]);
        if (ec != std::errc{} || ptr != p.data() + p.size()) format_error("bad version string '" + v + "'");
    }
    return {mm[0], mm[1]};
}

void check_version(const std::string& found) {
    if (major_minor(found) != major_minor(kFormatVersion))
        throw Error(ErrorKind::VersionMismatch, kModule,
                    std::string("format version ") + found + " is not compatible with " + kFormatVersion);
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        format_error(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) format_error("cannot format number");
    return std::string(buf.data(), ptr);
}

Trajectory parse_trajectory_csv(std::string_view text, const std::string& source) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    auto lines = split(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) format_error(source + ": empty file, expected header t,x1,...");

    auto header = split(trim(lines[0]), ',');
    if (header.size() < 2 || trim(header[0]) != "t")
        format_error(source + ": missing header, expected t,x1,...,xd");
    for (std::size_t k = 1; k < header.size(); ++k)
        if (trim(header[k]) != "x" + std::to_string(k))
            format_error(source + ": header column " + std::to_string(k + 1) + " should be x" + std::to_string(k));
    const std::size_t d = header.size() - 1;
    const std::size_t n = lines.size() - 1;

    Vector times(static_cast<Eigen::Index>(n));
    Matrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t row = r + 1, line = r + 2;
        auto fields = split(trim(lines[r + 1]), ',');
        if (fields.size() != d + 1)
            format_error(where(source, row, line) + ": expected " + std::to_string(d + 1) + " fields, got " +
                         std::to_string(fields.size()));
        for (std::size_t c = 0; c <= d; ++c) {
            auto f = trim(fields[c]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size())
                format_error(where(source, row, line) + ": cannot parse '" + std::string(f) + "'");
            if (!std::isfinite(v)) format_error(where(source, row, line) + ": non-finite value");
            if (c == 0)
                times(static_cast<Eigen::Index>(r)) = v;
            else
                points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = v;
        }
        if (r > 0 && !(times(static_cast<Eigen::Index>(r)) > times(static_cast<Eigen::Index>(r - 1))))
            throw Error(ErrorKind::InvalidTrajectory, kModule,
                        where(source, row, line) + ": time " + format_double(times(static_cast<Eigen::Index>(r))) +
                            " does not increase");
    }
    return Trajectory(std::move(times), std::move(points));
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t";
    for (std::size_t k = 1; k <= traj.dim(); ++k) out += ",x" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out += format_double(traj.times()(r));
        for (Eigen::Index c = 0; c < traj.points().cols(); ++c) out += "," + format_double(traj.points()(r, c));
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, kModule, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::InvalidArgument, kModule, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw Error(ErrorKind::InvalidArgument, kModule, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorKind::InvalidArgument, kModule, "cannot replace " + path.string() + ": " + ec.message());
    }
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    return parse_trajectory_csv(read_file(path), path.string());
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    write_file_atomic(path, trajectory_to_csv(traj));
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::array<char, 17> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + 16, h, 16);
    (void)ec;
    std::string hex(buf.data(), ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

Label parse_label(const std::string& s) {
    if (s == "success") return Label::Success;
    if (s == "failure") return Label::Failure;
    format_error("unknown label '" + s + "' (expected success or failure)");
}

DemoManifest parse_manifest(std::string_view text) {
    return guarded("manifest", [&] {
        json j = json::parse(text);
        DemoManifest m;
        m.version = j.at("version").get<std::string>();
        check_version(m.version);
        if (j.contains("units") && !j["units"].is_null()) m.units = j["units"].get<std::string>();
        for (const auto& e : j.at("entries")) {
            ManifestEntry entry;
            entry.path = e.at("path").get<std::string>();
            entry.label = e.contains("label") ? parse_label(e["label"].get<std::string>()) : Label::Success;
            m.entries.push_back(std::move(entry));
        }
        if (m.entries.empty()) format_error("manifest has no entries");
        return m;
    });
}

std::string manifest_to_json(const DemoManifest& manifest) {
    json j;
    j["version"] = manifest.version;
    if (manifest.units) j["units"] = *manifest.units;
    j["entries"] = json::array();
    for (const auto& e : manifest.entries)
        j["entries"].push_back({{"path", e.path.generic_string()}, {"label", to_string(e.label)}});
    return j.dump(2) + "\n";
}

DemoManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

DemoSet load_demos(const DemoManifest& manifest, const std::filesystem::path& base) {
    std::vector<Trajectory> demos;
    std::vector<Label> labels;
    for (const auto& e : manifest.entries) {
        demos.push_back(load_trajectory(e.path.is_absolute() ? e.path : base / e.path));
        labels.push_back(e.label);
    }
    return DemoSet(std::move(demos), std::move(labels));
}

const char* to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::ElasticMap: return "elastic_map";
        case ModelKind::Dmp: return "dmp";
        case ModelKind::Lte: return "lte";
        case ModelKind::FailureAware: return "failure_aware";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    for (auto k : {ModelKind::ElasticMap, ModelKind::Dmp, ModelKind::Lte, ModelKind::FailureAware})
        if (s == to_string(k)) return k;
    format_error("unknown model kind '" + s + "'");
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) format_error("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) format_error("ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) format_error("vector must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json to_json(const Trajectory& traj) { return {{"times", to_json(traj.times())}, {"points", to_json(traj.points())}}; }

Trajectory trajectory_from_json(const json& j) {
    return Trajectory(vector_from_json(j.at("times")), matrix_from_json(j.at("points")));
}

json to_json(const ElasticMap& map) {
    json j{{"nodes", to_json(map.nodes)},
           {"lambda", map.lambda},
           {"mu", map.mu},
           {"init", to_string(map.strategy.init)},
           {"weight", to_string(map.strategy.weight)}};
    if (map.summary)
        j["summary"] = {{"mass", to_json(map.summary->mass)},
                        {"moment", to_json(map.summary->moment)},
                        {"second", map.summary->second}};
    return j;
}

ElasticMap elastic_map_from_json(const json& j) {
    return guarded("elastic map", [&] {
        ElasticMap m;
        m.nodes = matrix_from_json(j.at("nodes"));
        m.lambda = j.at("lambda").get<double>();
        m.mu = j.at("mu").get<double>();
        m.strategy.init = parse_init_scheme(j.at("init").get<std::string>());
        m.strategy.weight = parse_weight_scheme(j.at("weight").get<std::string>());
        if (j.contains("summary")) {
            const auto& s = j["summary"];
            m.summary = DataSummary{vector_from_json(s.at("mass")), matrix_from_json(s.at("moment")),
                                    s.at("second").get<double>()};
        }
        return m;
    });
}

json to_json(const DmpModel& model) {
    return {{"n_basis", model.n_basis},     {"weights", to_json(model.weights)},
            {"centers", to_json(model.centers)}, {"widths", to_json(model.widths)},
            {"alpha_z", model.alpha_z},     {"beta_z", model.beta_z},
            {"alpha_x", model.alpha_x},     {"tau", model.tau},
            {"start", to_json(model.start)}, {"goal", to_json(model.goal)},
            {"start_velocity", to_json(model.start_velocity)}};
}

DmpModel dmp_from_json(const json& j) {
    return guarded("dmp model", [&] {
        DmpModel m;
        m.n_basis = j.at("n_basis").get<std::size_t>();
        m.weights = matrix_from_json(j.at("weights"));
        m.centers = vector_from_json(j.at("centers"));
        m.widths = vector_from_json(j.at("widths"));
        m.alpha_z = j.at("alpha_z").get<double>();
        m.beta_z = j.at("beta_z").get<double>();
        m.alpha_x = j.at("alpha_x").get<double>();
        m.tau = j.at("tau").get<double>();
        m.start = vector_from_json(j.at("start"));
        m.goal = vector_from_json(j.at("goal"));
        m.start_velocity = vector_from_json(j.at("start_velocity"));
        return m;
    });
}

json to_json(const LteModel& model) { return {{"demo", to_json(model.demo)}, {"delta", to_json(model.delta)}}; }

LteModel lte_from_json(const json& j) {
    return guarded("lte model", [&] {
        return LteModel{trajectory_from_json(j.at("demo")), matrix_from_json(j.at("delta"))};
    });
}

namespace {

json stats_to_json(const StepStatistics& s) {
    json w = json::array();
    for (const auto& m : s.weight) w.push_back(to_json(m));
    return {{"mean", to_json(s.mean)}, {"weight", w}};
}

StepStatistics stats_from_json(const json& j) {
    StepStatistics s;
    s.mean = matrix_from_json(j.at("mean"));
    for (const auto& w : j.at("weight")) s.weight.push_back(matrix_from_json(w));
    return s;
}

}  // namespace

json to_json(const StatModel& model) {
    json j{{"steps", model.steps}, {"dim", model.dim}, {"eps_reg", model.eps_reg}};
    if (model.success) j["success"] = stats_to_json(*model.success);
    if (model.failure) j["failure"] = stats_to_json(*model.failure);
    return j;
}

StatModel stat_model_from_json(const json& j) {
    return guarded("failure-aware model", [&] {
        StatModel m;
        m.steps = j.at("steps").get<std::size_t>();
        m.dim = j.at("dim").get<std::size_t>();
        m.eps_reg = j.at("eps_reg").get<double>();
        if (j.contains("success")) m.success = stats_from_json(j["success"]);
        if (j.contains("failure")) m.failure = stats_from_json(j["failure"]);
        return m;
    });
}

json to_json(const NumericSettings& s) {
    return {{"symmetry_tol", s.symmetry_tol},     {"rank_tol", s.rank_tol},
            {"hessian_margin", s.hessian_margin}, {"dual_zero_tol", s.dual_zero_tol},
            {"confidence_eps", s.confidence_eps}, {"beta_bisection_steps", s.beta_bisection_steps}};
}

NumericSettings settings_from_json(const json& j) {
    return guarded("numeric settings", [&] {
        NumericSettings s;
        s.symmetry_tol = j.at("symmetry_tol").get<double>();
        s.rank_tol = j.at("rank_tol").get<double>();
        s.hessian_margin = j.at("hessian_margin").get<double>();
        s.dual_zero_tol = j.at("dual_zero_tol").get<double>();
        s.confidence_eps = j.at("confidence_eps").get<double>();
        s.beta_bisection_steps = j.at("beta_bisection_steps").get<int>();
        return s;
    });
}

std::string serialize_model(const SkillModelFile& file) {
    json j{{"format_version", file.format_version},
           {"kind", to_string(file.kind)},
           {"payload", file.payload},
           {"provenance",
            {{"input_hashes", file.provenance.input_hashes},
             {"parameters", file.provenance.parameters},
             {"tool_version", file.provenance.tool_version}}},
           {"numeric_settings", to_json(file.settings)}};
    return j.dump(2) + "\n";
}

SkillModelFile parse_model(std::string_view text) {
    return guarded("model file", [&] {
        json j = json::parse(text);
        SkillModelFile f;
        f.format_version = j.at("format_version").get<std::string>();
        check_version(f.format_version);
        f.kind = parse_model_kind(j.at("kind").get<std::string>());
        f.payload = j.at("payload");
        const auto& p = j.at("provenance");
        f.provenance.input_hashes = p.at("input_hashes").get<std::map<std::string, std::string>>();
        f.provenance.parameters = p.at("parameters");
        f.provenance.tool_version = p.at("tool_version").get<std::string>();
        f.settings = settings_from_json(j.at("numeric_settings"));
        return f;
    });
}

void save_model(const std::filesystem::path& path, const SkillModelFile& file) {
    write_file_atomic(path, serialize_model(file));
}

SkillModelFile load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace skillforge
