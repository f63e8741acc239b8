#include "skillforge/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "skillforge/corpus.hpp"
#include "skillforge/dmp.hpp"
#include "skillforge/elastic_map.hpp"
#include "skillforge/error.hpp"
#include "skillforge/failure_aware.hpp"
#include "skillforge/framework.hpp"
#include "skillforge/io.hpp"
#include "skillforge/lte.hpp"
#include "skillforge/similarity.hpp"

namespace skillforge {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void usage(const std::string& msg) { throw UsageError(msg); }

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        usage("parameter " + key + ": '" + s + "' is not a finite number");
    return v;
}

std::size_t to_size(const std::string& key, const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        usage("parameter " + key + ": '" + s + "' is not a non-negative integer");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

Vector parse_point(const std::string& key, const std::string& s) {
    auto parts = split(s, ':');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(key, parts[i]);
    return v;
}

// Hands out parameters by key and complains about leftovers.
class Params {
public:
    explicit Params(std::map<std::string, std::string> raw) : raw_(std::move(raw)) {}

    bool has(const std::string& k) const { return raw_.count(k) != 0; }
    std::optional<std::string> str(const std::string& k) {
        used_.insert(k);
        auto it = raw_.find(k);
        if (it == raw_.end()) return std::nullopt;
        return it->second;
    }
    std::string str(const std::string& k, const std::string& dflt) { return str(k).value_or(dflt); }
    std::optional<double> num(const std::string& k) {
        auto s = str(k);
        if (!s) return std::nullopt;
        return to_double(k, *s);
    }
    double num(const std::string& k, double dflt) { return num(k).value_or(dflt); }
    std::size_t size(const std::string& k, std::size_t dflt) {
        auto s = str(k);
        return s ? to_size(k, *s) : dflt;
    }
    bool flag(const std::string& k, bool dflt) {
        auto s = str(k);
        if (!s) return dflt;
        if (*s == "1" || *s == "true") return true;
        if (*s == "0" || *s == "false") return false;
        usage("parameter " + k + ": expected 0/1 or true/false");
    }
    void finish() const {
        for (const auto& [k, v] : raw_)
            if (!used_.count(k)) usage("unknown parameter '" + k + "'");
    }
    const std::map<std::string, std::string>& raw() const { return raw_; }

private:
    std::map<std::string, std::string> raw_;
    std::set<std::string> used_;
};

struct Common {
    std::vector<std::string> inputs;
    std::string manifest;
    std::string model;
    std::string out;
    std::string params;
    std::uint64_t seed = 0;
    std::string format = "csv";
};

struct Context {
    const std::vector<std::string>& argv;
    std::string command;
    Common& opts;
    Params params;
    std::ostream& out;
    json results = json::object();
    std::map<std::string, std::string> input_hashes;
    std::vector<std::string> outputs;
};

std::string require_out(const Context& ctx) {
    if (ctx.opts.out.empty()) usage(ctx.command + ": --out is required");
    return ctx.opts.out;
}

DemoSet load_input_demos(Context& ctx) {
    const auto& o = ctx.opts;
    if (!o.manifest.empty() && !o.inputs.empty()) usage("give either --input or --manifest, not both");
    if (!o.manifest.empty()) {
        const std::filesystem::path mpath(o.manifest);
        const auto text = read_file(mpath);
        ctx.input_hashes[o.manifest] = content_hash(text);
        const auto manifest = parse_manifest(text);
        for (const auto& e : manifest.entries) {
            const auto p = e.path.is_absolute() ? e.path : mpath.parent_path() / e.path;
            ctx.input_hashes[p.generic_string()] = content_hash(read_file(p));
        }
        return load_demos(manifest, mpath.parent_path());
    }
    if (o.inputs.empty()) usage(ctx.command + ": --input or --manifest is required");
    std::vector<Trajectory> demos;
    for (const auto& p : o.inputs) {
        const auto text = read_file(p);
        ctx.input_hashes[p] = content_hash(text);
        demos.push_back(parse_trajectory_csv(text, p));
    }
    return DemoSet(std::move(demos));
}

Trajectory single_input(Context& ctx) {
    auto set = load_input_demos(ctx);
    auto successes = set.subset(Label::Success);
    if (successes.empty()) throw Error(ErrorKind::InvalidArgument, "cli_io", "no successful demonstration in input");
    return successes.front();
}

SkillModelFile load_input_model(Context& ctx) {
    if (ctx.opts.model.empty()) usage(ctx.command + ": --model is required");
    const auto text = read_file(ctx.opts.model);
    ctx.input_hashes[ctx.opts.model] = content_hash(text);
    auto file = parse_model(text);
    set_numeric_settings(file.settings);
    return file;
}

void write_artifact(Context& ctx, const std::filesystem::path& path, const std::string& content) {
    write_file_atomic(path, content);
    ctx.outputs.push_back(path.generic_string());
}

void write_trajectory(Context& ctx, const std::filesystem::path& path, const Trajectory& traj) {
    if (ctx.opts.format == "json")
        write_artifact(ctx, path, to_json(traj).dump(2) + "\n");
    else
        write_artifact(ctx, path, trajectory_to_csv(traj));
}

using Row = std::vector<std::string>;

void write_table(Context& ctx, const std::filesystem::path& path, const Row& header, const std::vector<Row>& rows) {
    std::string text;
    if (ctx.opts.format == "json") {
        json j{{"columns", header}, {"rows", rows}};
        text = j.dump(2) + "\n";
    } else {
        auto line = [](const Row& r) {
            std::string s;
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
            return s + "\n";
        };
        text = line(header);
        for (const auto& r : rows) text += line(r);
    }
    if (path.empty())
        ctx.out << text;
    else
        write_artifact(ctx, path, text);
}

Trajectory points_trajectory(const Matrix& points) {
    return Trajectory(uniform_times(0.0, 1.0, static_cast<std::size_t>(points.rows())), points);
}

ElasticMap elastic_model(const SkillModelFile& file) {
    if (file.kind != ModelKind::ElasticMap)
        throw Error(ErrorKind::InvalidArgument, "cli_io", "this command needs an elastic_map model");
    return elastic_map_from_json(file.payload);
}

json duals_json(const DualReport& r) {
    return {{"duals", to_json(r.duals)},
            {"value_unconstrained", r.value_unconstrained},
            {"value_constrained", r.value_constrained},
            {"kappa", r.kappa}};
}

// --- subcommands ------------------------------------------------------------

void cmd_fit(Context& ctx) {
    auto& p = ctx.params;
    const auto kind = parse_model_kind(p.str("kind", "elastic_map"));
    const auto k = p.size("K", 20);
    const auto strategy_index = p.size("strategy", 1);
    const auto lambda = p.num("lambda");
    const auto mu = p.num("mu");
    const auto max_iters = p.size("max_iters", 100);
    const auto n_basis = p.size("n_basis", 30);
    const auto eps_reg = p.num("eps_reg", 1e-3);
    const auto samples = p.size("samples", 0);
    p.finish();
    const auto out = require_out(ctx);

    DemoSet demos = load_input_demos(ctx);
    SkillModelFile file;
    file.kind = kind;
    file.settings = numeric_settings();
    switch (kind) {
        case ModelKind::ElasticMap: {
            const std::size_t t = samples ? samples : (demos.common_len() ? demos.common_len() : demos.shortest());
            const DemoSet aligned = demos.common_len() == t ? demos : align(demos, t);
            const auto init = construct(aligned, k, Strategy::from_index(static_cast<int>(strategy_index)), lambda, mu);
            const auto res = fit(init, aligned, FitOptions{static_cast<int>(max_iters), 1e-12});
            file.payload = to_json(res.map);
            ctx.results = {{"trace", res.trace},
                           {"iterations", res.iterations},
                           {"converged", res.converged},
                           {"energy", res.trace.empty() ? 0.0 : res.trace.back()},
                           {"strategy", res.map.strategy.name()},
                           {"lambda", res.map.lambda},
                           {"mu", res.map.mu}};
            break;
        }
        case ModelKind::Dmp: {
            const auto demo = demos.subset(Label::Success).at(0);
            file.payload = to_json(dmp_train(demo, n_basis));
            ctx.results = {{"n_basis", n_basis}};
            break;
        }
        case ModelKind::Lte: {
            const auto demo = demos.subset(Label::Success).at(0);
            file.payload = to_json(lte_train(demo));
            ctx.results = {{"samples", demo.size()}};
            break;
        }
        case ModelKind::FailureAware: {
            const std::size_t t = samples ? samples : (demos.common_len() ? demos.common_len() : demos.shortest());
            const auto model = encode(demos.common_len() == t ? demos : align(demos, t), eps_reg);
            file.payload = to_json(model);
            ctx.results = {{"steps", model.steps},
                           {"has_success", model.success.has_value()},
                           {"has_failure", model.failure.has_value()}};
            break;
        }
    }
    file.provenance.input_hashes = ctx.input_hashes;
    file.provenance.parameters = ctx.params.raw();
    write_artifact(ctx, out, serialize_model(file));
}

void cmd_reproduce(Context& ctx) {
    auto& p = ctx.params;
    const auto n = p.size("n", 0);
    const auto start = p.str("start");
    const auto goal = p.str("goal");
    const auto beta = p.num("beta", 0.0);
    const auto lambda = p.num("lambda", 0.0);
    const auto mu = p.num("mu", 0.0);
    p.finish();
    const auto out = require_out(ctx);
    const auto file = load_input_model(ctx);

    auto endpoints = [&](const Vector& s0, const Vector& g0) {
        return std::pair{start ? parse_point("start", *start) : s0, goal ? parse_point("goal", *goal) : g0};
    };
    switch (file.kind) {
        case ModelKind::ElasticMap: {
            const auto map = elastic_model(file);
            const std::size_t samples = n ? n : 200;
            if (!start && !goal) {
                write_trajectory(ctx, out, reproduce(map, samples));
                break;
            }
            const Vector first = map.nodes.row(0).transpose(), last = map.nodes.row(map.nodes.rows() - 1).transpose();
            auto [s, g] = endpoints(first, last);
            const auto rep = reproduce_constrained(map, endpoint_pins(map.node_count(), s, g));
            ctx.results = duals_json(rep.report);
            write_trajectory(ctx, out, resample(rep.trajectory(), samples));
            break;
        }
        case ModelKind::Dmp: {
            const auto model = dmp_from_json(file.payload);
            auto [s, g] = endpoints(model.start, model.goal);
            write_trajectory(ctx, out, dmp_reproduce(model, s, g, n ? n : 200));
            break;
        }
        case ModelKind::Lte: {
            const auto model = lte_from_json(file.payload);
            auto [s, g] = endpoints(model.demo.front(), model.demo.back());
            write_trajectory(ctx, out, lte_reproduce(model, s, g, n ? n : model.demo.size()));
            break;
        }
        case ModelKind::FailureAware: {
            const auto model = stat_model_from_json(file.payload);
            ConstraintSet cons;
            if (start) cons.pins.push_back({0, parse_point("start", *start), PinKind::Initial});
            if (goal) cons.pins.push_back({model.steps - 1, parse_point("goal", *goal), PinKind::Final});
            const auto res = solve_repro(model, beta, {lambda, mu}, cons);
            ctx.results = {{"beta_used", res.beta_used}, {"min_hessian_eigenvalue", res.min_hessian_eigenvalue}};
            write_trajectory(ctx, out, points_trajectory(res.points));
            break;
        }
    }
}

void cmd_confidence(Context& ctx) {
    auto& p = ctx.params;
    const auto pins = p.str("pins");
    const auto kappa = p.num("kappa", 1.0);
    p.finish();
    const auto out = require_out(ctx);
    if (!pins) usage("confidence: params must include pins=...");
    const auto map = elastic_model(load_input_model(ctx));
    const auto cons = parse_pins(*pins, map.node_count(), kappa);
    const auto rep = reproduce_constrained(map, cons);
    ctx.results = duals_json(rep.report);
    ctx.results["achieved_kappa"] = confidence(rep.report);
    ctx.results["max_violation"] = max_pin_violation(rep.nodes, cons);
    write_trajectory(ctx, out, rep.trajectory());
}

void cmd_sweep(Context& ctx) {
    auto& p = ctx.params;
    const auto pins = p.str("pins");
    const auto kappas = parse_list(p.str("kappas", "0.1;0.2;0.3;0.4;0.5;0.6;0.7;0.8;0.9;1"));
    p.finish();
    const auto out = require_out(ctx);
    if (!pins) usage("sweep: params must include pins=...");
    const auto map = elastic_model(load_input_model(ctx));
    const auto cons = parse_pins(*pins, map.node_count());
    const auto entries = confidence_sweep(node_problem(map), cons, kappas);
    std::vector<Row> rows;
    json summary = json::array();
    for (const auto& e : entries) {
        rows.push_back({format_double(e.target_kappa), format_double(e.achieved_kappa), format_double(e.max_violation)});
        summary.push_back({{"target_kappa", e.target_kappa},
                           {"achieved_kappa", e.achieved_kappa},
                           {"max_violation", e.max_violation}});
    }
    ctx.results = {{"sweep", summary}};
    write_table(ctx, out, {"target_kappa", "achieved_kappa", "max_violation"}, rows);
}

void cmd_prune(Context& ctx) {
    auto& p = ctx.params;
    const auto pins = p.str("pins");
    const auto threshold = p.num("threshold", 1e-6);
    const auto iterative = p.flag("iterative", false);
    p.finish();
    const auto out = require_out(ctx);
    if (!pins) usage("prune: params must include pins=...");
    const auto map = elastic_model(load_input_model(ctx));
    const auto problem = node_problem(map);
    const auto cons = parse_pins(*pins, map.node_count());
    const auto res = prune(problem, cons, threshold, iterative);
    json kept = json::array(), removed = json::array();
    for (const auto& pin : res.kept.pins) kept.push_back(pin.node);
    for (const auto& pin : res.removed) removed.push_back(pin.node);
    ctx.results = {{"kept", kept}, {"removed", removed}, {"dual_norms", to_json(res.dual_norms)}, {"delta", res.delta}};
    write_trajectory(ctx, out, reproduce_constrained(problem, res.kept).trajectory());
}

void cmd_failaware(Context& ctx) {
    auto& p = ctx.params;
    const auto mode = p.str("mode", "aware");
    const auto beta = p.num("beta", 0.5);
    const auto rho = p.num("rho");
    const auto eps_reg = p.num("eps_reg", 1e-3);
    const auto lambda = p.num("lambda", 0.0);
    const auto mu = p.num("mu", 0.0);
    const auto samples = p.size("samples", 0);
    const auto pins = p.str("pins");
    p.finish();
    const auto out = require_out(ctx);
    if (mode != "aware" && mode != "failed_only") usage("failaware: mode must be aware or failed_only");

    const auto demos = load_input_demos(ctx);
    const std::size_t t = samples ? samples : (demos.common_len() ? demos.common_len() : demos.shortest());
    const auto model = encode(demos.common_len() == t ? demos : align(demos, t), eps_reg);
    const auto cons = pins ? parse_pins(*pins, model.steps) : ConstraintSet{};
    const Smoothing smooth{lambda, mu};
    Matrix points;
    if (mode == "aware") {
        const auto res = solve_repro(model, beta, smooth, cons);
        points = res.points;
        ctx.results = {{"beta_used", res.beta_used}, {"min_hessian_eigenvalue", res.min_hessian_eigenvalue}};
    } else {
        const double min_rho = min_trust_region(model, beta);
        const double r = rho.value_or(2.0 * min_rho + 1.0);
        points = solve_failed_only(model, r, std::nullopt, beta, smooth, cons);
        ctx.results = {{"rho", r}, {"min_rho", min_rho}};
    }
    if (model.failure) ctx.results["repulsion"] = repulsion(model, points);
    write_trajectory(ctx, out, points_trajectory(points));
}

void cmd_similarity(Context& ctx) {
    auto& p = ctx.params;
    const auto metric = p.str("metric", "all");
    const auto sigma = p.num("sigma");
    const auto normalize = p.flag("dtw_normalize", false);
    p.finish();
    if (ctx.opts.inputs.size() != 2) usage("similarity: exactly two --input files are required");
    const auto set = load_input_demos(ctx);
    const auto& a = set[0];
    const auto& b = set[1];
    const double s = sigma.value_or(default_sigma(a));
    std::vector<MetricId> ids;
    if (metric == "all")
        ids.assign(kAllMetrics.begin(), kAllMetrics.end());
    else
        ids.push_back(parse_metric(metric));
    std::vector<Row> rows;
    for (auto id : ids) {
        const double d = distance(id, a, b, {normalize});
        rows.push_back({to_string(id), format_double(d), format_double(similarity_from_distance(d, s))});
        ctx.results[to_string(id)] = d;
    }
    ctx.results["sigma"] = s;
    write_table(ctx, ctx.opts.out, {"metric", "distance", "similarity"}, rows);
}

void cmd_bias_report(Context& ctx) {
    auto& p = ctx.params;
    const auto pairs = p.size("pairs", 286);
    p.finish();
    const auto rows_in = bias_report(make_bias_corpus(ctx.opts.seed, pairs));
    Row header{"metric"};
    for (auto f : kAllPerturbations) header.push_back(std::string("mean_") + to_string(f));
    for (auto f : kAllPerturbations) header.push_back(std::string("invariant_") + to_string(f));
    std::vector<Row> rows;
    for (const auto& r : rows_in) {
        Row row{to_string(r.metric)};
        for (double m : r.mean) row.push_back(format_double(m));
        for (bool inv : r.invariant) row.push_back(inv ? "1" : "0");
        rows.push_back(std::move(row));
    }
    ctx.results = {{"pairs", pairs}};
    write_table(ctx, ctx.opts.out, header, rows);
}

void cmd_region(Context& ctx) {
    auto& p = ctx.params;
    RegionSpec spec;
    spec.metric = parse_metric(p.str("metric", "frechet"));
    spec.resolution = p.size("resolution", 5);
    spec.poi = parse_poi_kind(p.str("poi", "initial"));
    spec.tau = p.num("tau", 0.5);
    spec.sigma = p.num("sigma");
    const auto half = p.num("half");
    const auto center = p.str("center");
    const auto reps = p.str("reps");
    spec.options.elastic_nodes = p.size("K", spec.options.elastic_nodes);
    spec.options.dmp_basis = p.size("n_basis", spec.options.dmp_basis);
    spec.options.elastic_strategy = Strategy::from_index(static_cast<int>(p.size("strategy", 1)));
    spec.options.elastic_lambda = p.num("lambda");
    spec.options.elastic_mu = p.num("mu");
    p.finish();
    const auto out = require_out(ctx);

    if (reps) {
        spec.representations.clear();
        for (const auto& r : split(*reps, ';')) spec.representations.push_back(parse_representation(r));
    }
    const auto demo = single_input(ctx);
    if (center) spec.center = parse_point("center", *center);
    spec.half_extents = Vector::Constant(static_cast<Eigen::Index>(demo.dim()), half.value_or(0.1 * arc_length(demo)));

    const auto region = build_region(demo, spec);
    Row header;
    for (std::size_t k = 1; k <= region.dim; ++k) header.push_back("g" + std::to_string(k));
    for (auto r : kAllRepresentations) header.push_back(std::string("s_") + to_string(r));
    header.insert(header.end(), {"v", "best", "inside"});
    std::vector<Row> rows;
    std::size_t inside = 0;
    json diagnostics = json::array();
    for (const auto& gp : region.grid) {
        Row row;
        for (Eigen::Index k = 0; k < gp.g.size(); ++k) row.push_back(format_double(gp.g(k)));
        for (double s : gp.score) row.push_back(format_double(s));
        row.push_back(format_double(gp.best_score));
        row.push_back(to_string(gp.best));
        row.push_back(gp.inside ? "1" : "0");
        rows.push_back(std::move(row));
        inside += gp.inside ? 1 : 0;
        for (const auto& d : gp.diagnostics) diagnostics.push_back(d);
    }
    ctx.results = {{"points", region.grid.size()},
                   {"inside", inside},
                   {"sigma", region.sigma},
                   {"lower", to_json(region.lower)},
                   {"upper", to_json(region.upper)},
                   {"diagnostics", diagnostics}};
    write_table(ctx, out, header, rows);
}

void cmd_gen_corpus(Context& ctx) {
    auto& p = ctx.params;
    CorpusSpec spec;
    spec.family = parse_skill_family(p.str("family", "line"));
    spec.count = p.size("count", spec.count);
    spec.samples = p.size("samples", spec.samples);
    spec.noise = p.num("noise", spec.noise);
    spec.jitter = p.num("jitter", spec.jitter);
    p.finish();
    const auto out = require_out(ctx);
    const auto manifest = write_corpus(out, ctx.opts.seed, spec);
    for (const auto& e : manifest.entries) ctx.outputs.push_back((std::filesystem::path(out) / e.path).generic_string());
    ctx.outputs.push_back((std::filesystem::path(out) / "manifest.json").generic_string());
    ctx.results = {{"demos", manifest.entries.size()}};
}

void cmd_convert(Context& ctx) {
    ctx.params.finish();
    const auto out = require_out(ctx);
    if (ctx.opts.inputs.size() == 1 && ctx.opts.model.empty()) {
        const auto& in = ctx.opts.inputs[0];
        const auto text = read_file(in);
        ctx.input_hashes[in] = content_hash(text);
        if (std::filesystem::path(in).extension() == ".json") {
            const auto j = [&] {
                try {
                    return json::parse(text);
                } catch (const json::exception& e) {
                    throw Error(ErrorKind::FormatError, "cli_io", in + ": " + e.what());
                }
            }();
            if (j.contains("kind")) {
                write_artifact(ctx, out, serialize_model(parse_model(text)));
                return;
            }
            write_trajectory(ctx, out, trajectory_from_json(j));
        } else {
            write_trajectory(ctx, out, parse_trajectory_csv(text, in));
        }
        return;
    }
    if (!ctx.opts.model.empty() && ctx.opts.inputs.empty()) {
        write_artifact(ctx, out, serialize_model(load_input_model(ctx)));
        return;
    }
    usage("convert: give exactly one --input or one --model");
}

void write_report(const Context& ctx, double seconds) {
    if (ctx.opts.out.empty()) return;
    json report{{"tool_version", kToolVersion},
                {"command", ctx.command},
                {"argv", ctx.argv},
                {"seed", ctx.opts.seed},
                {"params", ctx.params.raw()},
                {"inputs", ctx.input_hashes},
                {"outputs", ctx.outputs},
                {"results", ctx.results},
                {"numeric_settings", to_json(numeric_settings())},
                {"timings", {{"total_seconds", seconds}}}};
    auto path = std::filesystem::path(ctx.opts.out);
    if (path.has_filename())
        path += ".report.json";
    else
        path = path.parent_path().string() + ".report.json";
    write_file_atomic(path, report.dump(2) + "\n");
}

}  // namespace

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    if (text.empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) usage("malformed parameter '" + item + "' (expected key=value)");
        const auto key = item.substr(0, eq);
        if (!out.emplace(key, item.substr(eq + 1)).second) usage("parameter '" + key + "' given twice");
    }
    return out;
}

ConstraintSet parse_pins(const std::string& text, std::size_t k, double confidence) {
    ConstraintSet cons;
    cons.confidence = confidence;
    for (const auto& item : split(text, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) usage("malformed pin '" + item + "' (expected node:x1:...:xd)");
        const auto node = to_size("pins", item.substr(0, colon));
        const auto kind = node == 0 ? PinKind::Initial : (node + 1 == k ? PinKind::Final : PinKind::Via);
        cons.pins.push_back({node, parse_point("pins", item.substr(colon + 1)), kind});
    }
    return cons;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text, ';')) out.push_back(to_double("list", s));
    return out;
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learn and reproduce point-to-point skills from demonstrations", "skillforge"};
    app.require_subcommand(1);
    Common opts;
    using Handler = void (*)(Context&);
    const std::vector<std::pair<std::string, Handler>> commands = {
        {"fit", cmd_fit},           {"reproduce", cmd_reproduce},     {"confidence", cmd_confidence},
        {"sweep", cmd_sweep},       {"prune", cmd_prune},             {"failaware", cmd_failaware},
        {"similarity", cmd_similarity}, {"bias-report", cmd_bias_report}, {"region", cmd_region},
        {"gen-corpus", cmd_gen_corpus}, {"convert", cmd_convert},
    };
    const std::map<std::string, std::string> blurbs = {
        {"fit", "fit an elastic_map, dmp, lte or failure_aware model to demos"},
        {"reproduce", "reproduce a model, optionally with new start/goal"},
        {"confidence", "elastic-map reproduction under pins at one confidence"},
        {"sweep", "pin violation and achieved confidence over a kappa list"},
        {"prune", "drop pins whose duals are negligible"},
        {"failaware", "reproduce from successful and failed demos"},
        {"similarity", "compare two trajectories under the metric set"},
        {"bias-report", "metric x perturbation bias table on a synthetic corpus"},
        {"region", "similarity region around a demo's point of interest"},
        {"gen-corpus", "write a synthetic demo corpus with manifest"},
        {"convert", "re-emit a trajectory or model file canonically"},
    };
    for (const auto& [name, handler] : commands) {
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--input", opts.inputs, "trajectory CSV (repeatable)");
        sub->add_option("--manifest", opts.manifest, "demo manifest JSON");
        sub->add_option("--model", opts.model, "model file");
        sub->add_option("--out", opts.out, "output path");
        sub->add_option("--params", opts.params, "key=val,...");
        sub->add_option("--seed", opts.seed, "random seed");
        sub->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    std::vector<const char*> raw;
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        for (const auto& [name, handler] : commands) {
            if (!app.got_subcommand(name)) continue;
            Context ctx{argv, name, opts, Params(parse_params(opts.params)), out, json::object(), {}, {}};
            handler(ctx);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            write_report(ctx, seconds);
        }
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "cli_io:internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int replay(const std::filesystem::path& report, std::ostream& out, std::ostream& err) {
    const auto j = json::parse(read_file(report));
    return run_cli(j.at("argv").get<std::vector<std::string>>(), out, err);
}

}  // namespace skillforge
