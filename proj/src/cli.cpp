#include "pbmkit/cli.hpp"

#include "pbmkit/counterexamples.hpp"
#include "pbmkit/errors.hpp"
#include "pbmkit/intrinsic.hpp"
#include "pbmkit/variation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

namespace pbm::cli {

namespace {

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open \"" + path + "\"");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError("\"" + path + "\" is not valid JSON: " + e.what());
    }
}

/// Inline JSON text, or the path of a JSON file.
Json json_argument(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigurationError(std::string("--body is not valid JSON: ") + e.what());
        }
    }
    return read_json_file(text);
}

template <class T>
void take(const Json& j, const char* key, T& dst) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("config field \"") + key + "\": " + e.what());
    }
}

template <class T>
void take(const Json& j, const char* key, std::optional<T>& dst) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    take(j, key, v);
    dst = v;
}

template <class T>
Json opt_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

struct Context {
    const ExperimentConfig& cfg;
    std::ostream& out;
    std::ostream& err;
};

GridMethod resolve_method(const ExperimentConfig& cfg, int n) {
    if (cfg.grid_method) return grid_method_from_string(*cfg.grid_method);
    return n <= 6 ? GridMethod::ProductAngular : GridMethod::MonteCarlo;
}

int resolve_resolution(const ExperimentConfig& cfg, int n, GridMethod m) {
    if (cfg.grid_res) return *cfg.grid_res;
    switch (m) {
        case GridMethod::ProductAngular: return reference_resolution(n);
        case GridMethod::MonteCarlo: return 20000;
        case GridMethod::IcosphereN3: return 6;
        case GridMethod::Lattice: return 4;
    }
    return reference_resolution(n);
}

std::shared_ptr<const SphericalGrid> make_grid(const ExperimentConfig& cfg, int n) {
    const GridMethod m = resolve_method(cfg, n);
    return std::make_shared<const SphericalGrid>(build_grid(n, resolve_resolution(cfg, n, m), m, cfg.seed));
}

Json grid_summary(const SphericalGrid& g) {
    return {{"dimension", g.dimension()},
            {"method", std::string(to_string(g.method()))},
            {"resolution", g.resolution()},
            {"seed", g.seed()},
            {"size", g.size()},
            {"fingerprint", g.fingerprint()}};
}

Body configured_body(const ExperimentConfig& cfg) {
    if (!cfg.body) return make_ball(1.0);
    Body b = body_from_json(*cfg.body);
    if (const auto bn = body_dimension(b); bn && *bn != cfg.n) {
        throw ConfigurationError("body dimension " + std::to_string(*bn) + " does not match --n " +
                                 std::to_string(cfg.n));
    }
    return b;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigurationError("cannot write \"" + path + "\"");
    f << content;
}

void emit_report(const Context& ctx, const Json& result, const SphericalGrid* grid) {
    if (!ctx.cfg.json) return;
    Json report = {{"schema_version", kSchemaVersion},
                   {"library_version", library_version()},
                   {"command", ctx.cfg.command},
                   {"config", ctx.cfg.to_json()},
                   {"grid", grid ? grid_summary(*grid) : Json(nullptr)},
                   {"result", result}};
    write_file(*ctx.cfg.json, report.dump(2) + "\n");
}

void print_kv(std::ostream& out, const std::string& key, const std::string& value) {
    out << key << " = " << value << "\n";
}

void print_kv(std::ostream& out, const std::string& key, double value) {
    print_kv(out, key, format_double(value));
}

void print_grid(std::ostream& out, const SphericalGrid& g) {
    print_kv(out, "grid", std::string(to_string(g.method())) + " res=" + std::to_string(g.resolution()) +
                              " nodes=" + std::to_string(g.size()) + " fingerprint=" + g.fingerprint());
}

int cmd_vk(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Body body = configured_body(cfg);
    std::shared_ptr<const SphericalGrid> grid;
    IntrinsicVolumeResult r;
    if (is_smooth(body)) {
        grid = make_grid(cfg, cfg.n);
        r = vk_quadrature(body, cfg.k, *grid);
        print_grid(ctx.out, *grid);
    } else if (std::holds_alternative<Box>(body) || std::holds_alternative<EmbeddedCube>(body)) {
        grid = nullptr;
        r = vk(body, cfg.k, build_grid(2, 1, GridMethod::ProductAngular));
    } else {
        throw UnsupportedError("V_k of a " + std::string(body_kind(body)) + " body is not available");
    }
    print_kv(ctx.out, "body", std::string(body_kind(body)));
    print_kv(ctx.out, "k", std::to_string(r.k));
    print_kv(ctx.out, "value", r.value);
    print_kv(ctx.out, "method", std::string(to_string(r.method)));
    print_kv(ctx.out, "error_estimate", r.error_estimate);
    if (r.non_positive_nodes) {
        ctx.err << "warning: Q[h] not positive definite at " << r.non_positive_nodes << " nodes\n";
    }
    Json result = to_json(r);
    result["body"] = body_to_json(body);
    emit_report(ctx, result, grid.get());
    return Ok;
}

int cmd_concavity(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto grid = make_grid(cfg, cfg.n);
    const TestFunction psi = test_function_from_name(cfg.psi, cfg.n, cfg.amplitude);
    const VariationPath path(configured_body(cfg), psi, cfg.k, grid);
    const ConcavityReport r = concavity_scan(path, linspace(cfg.s_min, cfg.s_max, cfg.s_steps), cfg.tol);
    print_grid(ctx.out, *grid);
    print_kv(ctx.out, "f0", r.f0);
    print_kv(ctx.out, "tolerance", r.tolerance);
    double hmax = r.h.front();
    for (double h : r.h) hmax = std::max(hmax, h);
    print_kv(ctx.out, "max_H", hmax);
    print_kv(ctx.out, "verdict", std::string(to_string(r.verdict)));
    if (r.s_star) print_kv(ctx.out, "s_star", *r.s_star);
    if (cfg.out) {
        std::ostringstream csv;
        write_concavity_csv(csv, r);
        write_file(*cfg.out, csv.str());
    }
    emit_report(ctx, to_json(r), grid.get());
    return r.verdict == ConcavityVerdict::Violated ? CheckFailed : Ok;
}

int cmd_thresholds(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<std::vector<std::string>> rows;
    Json table = Json::array();
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        for (int k = 2; k <= n - 1; ++k) {
            const Threshold t = threshold_pbar(n, k);
            rows.push_back({std::to_string(n), std::to_string(k), format_double(t.value),
                            std::string(to_string(t.branch))});
            table.push_back({{"n", n}, {"k", k}, {"pbar", t.value}, {"branch", std::string(to_string(t.branch))}});
        }
    }
    std::ostringstream csv;
    write_csv(csv, {"n", "k", "pbar", "branch"}, rows);
    ctx.out << csv.str();
    if (cfg.out) write_file(*cfg.out, csv.str());
    emit_report(ctx, {{"rows", table}}, nullptr);
    return Ok;
}

int cmd_counterexample(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.sweep) {
        const auto rows = counterexample_sweep(cfg.n_min, cfg.n_max, cfg.sweep_factor);
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        if (cfg.out) {
            write_file(*cfg.out, csv.str());
        } else {
            ctx.out << csv.str();
        }
        bool ok = true;
        Json arr = Json::array();
        for (const auto& r : rows) {
            if (r.p < r.pbar.value && r.verdict.conclusion != Conclusion::InequalityFails) ok = false;
            Json row = to_json(r.verdict);
            row["n"] = r.n;
            row["k"] = r.k;
            row["p"] = r.p;
            row["pbar"] = r.pbar.value;
            row["branch"] = std::string(to_string(r.pbar.branch));
            arr.push_back(row);
        }
        emit_report(ctx, {{"rows", arr}}, nullptr);
        return ok ? Ok : CheckFailed;
    }
    const Threshold pbar = threshold_pbar(cfg.n, cfg.k);
    const Verdict v = verify_counterexample(cfg.n, cfg.k, cfg.p, cfg.t);
    print_kv(ctx.out, "pbar", pbar.value);
    print_kv(ctx.out, "branch", std::string(to_string(pbar.branch)));
    print_kv(ctx.out, "vk_upper_bound", v.vk_lhs);
    print_kv(ctx.out, "vk_rhs", v.vk_rhs);
    print_kv(ctx.out, "vk_margin", v.vk_margin);
    print_kv(ctx.out, "lhs", v.lhs);
    print_kv(ctx.out, "rhs", v.rhs);
    print_kv(ctx.out, "margin", v.margin);
    print_kv(ctx.out, "conclusion", std::string(to_string(v.conclusion)));
    Json result = to_json(v);
    result["pbar"] = to_json(pbar);
    emit_report(ctx, result, nullptr);
    if (cfg.p < pbar.value && v.conclusion != Conclusion::InequalityFails) return CheckFailed;
    return Ok;
}

int cmd_christoffel(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto grid = make_grid(cfg, cfg.n);
    const Body body = configured_body(cfg);
    const double r = christoffel_max_residual(body, cfg.p, cfg.k, *grid);
    print_grid(ctx.out, *grid);
    print_kv(ctx.out, "max_residual", r);
    emit_report(ctx, {{"max_residual", r}, {"body", body_to_json(body)}}, grid.get());
    return cfg.tol && r > *cfg.tol ? CheckFailed : Ok;
}

int cmd_poincare(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto grid = make_grid(cfg, cfg.n);
    const TestFunction psi = test_function_from_name(cfg.psi, cfg.n, cfg.amplitude);
    const PoincareResult r = poincare_check(psi, *grid);
    print_grid(ctx.out, *grid);
    print_kv(ctx.out, "lhs", r.lhs);
    print_kv(ctx.out, "rhs", r.rhs);
    print_kv(ctx.out, "ratio", r.ratio);
    if (r.exact_equality) print_kv(ctx.out, "exact_equality", "true");
    emit_report(ctx, to_json(r), grid.get());
    return r.ratio <= 1.0 + cfg.tol.value_or(1e-4) ? Ok : CheckFailed;
}

int cmd_ibp(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto grid = make_grid(cfg, cfg.n);
    const Body body = configured_body(cfg);
    std::mt19937_64 rng(cfg.seed);
    double worst1 = 0.0;
    double worst2 = 0.0;
    Json arr = Json::array();
    for (int i = 0; i < cfg.instances; ++i) {
        const TestFunction phi = TestFunction::random_even_quadratic(cfg.n, rng);
        const TestFunction phi_bar = TestFunction::random_even_quadratic(cfg.n, rng);
        const TestFunction psi = TestFunction::random_even_quadratic(cfg.n, rng);
        const IbpResult r = ibp_check(body, phi, phi_bar, psi, cfg.k, *grid);
        worst1 = std::max(worst1, r.residual1);
        worst2 = std::max(worst2, r.residual2);
        arr.push_back(to_json(r));
    }
    const double tol = cfg.tol.value_or(1e-5);
    print_grid(ctx.out, *grid);
    print_kv(ctx.out, "max_residual1", worst1);
    print_kv(ctx.out, "max_residual2", worst2);
    emit_report(ctx, {{"instances", arr}, {"max_residual1", worst1}, {"max_residual2", worst2}}, grid.get());
    return worst1 <= tol && worst2 <= tol ? Ok : CheckFailed;
}

}  // namespace

Json ExperimentConfig::to_json() const {
    return {{"command", command},
            {"n", n},
            {"k", k},
            {"p", p},
            {"t", t},
            {"grid_res", opt_json(grid_res)},
            {"grid_method", opt_json(grid_method)},
            {"seed", seed},
            {"psi", psi},
            {"amplitude", amplitude},
            {"s_min", s_min},
            {"s_max", s_max},
            {"s_steps", s_steps},
            {"out", opt_json(out)},
            {"json", opt_json(json)},
            {"tol", opt_json(tol)},
            {"body", body ? *body : Json(nullptr)},
            {"n_min", n_min},
            {"n_max", n_max},
            {"sweep", sweep},
            {"sweep_factor", sweep_factor},
            {"instances", instances}};
}

void ExperimentConfig::merge(const Json& j) {
    if (!j.is_object()) throw ConfigurationError("config document must be a JSON object");
    take(j, "n", n);
    take(j, "k", k);
    take(j, "p", p);
    take(j, "t", t);
    take(j, "grid_res", grid_res);
    take(j, "grid_method", grid_method);
    take(j, "seed", seed);
    if (j.contains("psi") && j.at("psi").is_object()) {
        psi = j.at("psi").dump();
    } else {
        take(j, "psi", psi);
    }
    take(j, "amplitude", amplitude);
    take(j, "s_min", s_min);
    take(j, "s_max", s_max);
    take(j, "s_steps", s_steps);
    take(j, "out", out);
    take(j, "json", json);
    take(j, "tol", tol);
    if (j.contains("body") && !j.at("body").is_null()) body = j.at("body");
    take(j, "n_min", n_min);
    take(j, "n_max", n_max);
    take(j, "sweep", sweep);
    take(j, "sweep_factor", sweep_factor);
    take(j, "instances", instances);
}

void ExperimentConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigurationError(msg); };
    if (n < 2) fail("--n must be at least 2");
    if (grid_res && *grid_res < 1) fail("--grid-res must be at least 1");
    if (grid_method) grid_method_from_string(*grid_method);
    if (!std::isfinite(amplitude)) fail("--amplitude must be finite");
    if (tol && !(*tol >= 0.0)) fail("--tol must be non-negative");
    if (command == "vk" || command == "concavity" || command == "christoffel") {
        if (k < 1 || k > n) fail("--k must lie in [1, n]");
    }
    if (command == "ibp-check" && (k < 1 || k > n - 1)) fail("--k must lie in [1, n-1] for ibp-check");
    if (command == "concavity") {
        if (s_min < -2.0 || s_max > 2.0 || s_min > s_max) fail("--s-min/--s-max must satisfy -2 <= s-min <= s-max <= 2");
        if (s_steps < 1) fail("--s-steps must be at least 1");
    }
    if (command == "christoffel" && !(p >= 0.0 && p < 1.0)) fail("--p must lie in [0, 1)");
    if (command == "counterexample") {
        if (sweep) {
            if (n_min < 3 || n_max < n_min) fail("--n-min/--n-max must satisfy 3 <= n-min <= n-max");
            if (!(sweep_factor > 0.0 && sweep_factor < 1.0)) fail("--sweep-factor must lie in (0, 1)");
        } else {
            if (n < 3) fail("--n must be at least 3 for counterexample");
            if (k < 2 || k > n - 1) fail("--k must lie in [2, n-1] for counterexample");
            if (!(p > 0.0 && p < 1.0)) fail("--p must lie in (0, 1)");
            if (!(t > 0.0 && t < 1.0)) fail("--t must lie in (0, 1)");
        }
    }
    if (command == "thresholds" && (n_min < 3 || n_max < n_min)) {
        fail("--n-min/--n-max must satisfy 3 <= n-min <= n-max");
    }
    if (command == "ibp-check" && instances < 1) fail("--instances must be at least 1");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Support-function toolkit for p-Brunn-Minkowski experiments"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(library_version()));

    std::optional<std::string> config_path;
    std::optional<int> n, k, grid_res, s_steps, n_min, n_max, instances;
    std::optional<double> p, t, amplitude, s_min, s_max, tol, sweep_factor;
    std::optional<std::string> grid_method, psi, out_path, json_path, body;
    std::optional<std::uint64_t> seed;
    bool sweep = false;

    app.add_option("--config", config_path, "JSON config document; flags override its values");
    app.add_option("--n", n, "ambient dimension");
    app.add_option("--k", k, "intrinsic volume order");
    app.add_option("--p", p, "exponent of the p-mean");
    app.add_option("--t", t, "combination parameter");
    app.add_option("--grid-res", grid_res, "grid resolution");
    app.add_option("--grid-method", grid_method, "product-angular | monte-carlo | icosphere-n3 | lattice");
    app.add_option("--seed", seed, "seed for randomized grids and instances");
    app.add_option("--psi", psi, "const | x1sq | x1sq-centered | harm4 | JSON test function");
    app.add_option("--amplitude", amplitude, "amplitude of psi");
    app.add_option("--s-min", s_min, "first s of the scan");
    app.add_option("--s-max", s_max, "last s of the scan");
    app.add_option("--s-steps", s_steps, "number of s values");
    app.add_option("--out", out_path, "CSV output path");
    app.add_option("--json", json_path, "JSON report path");
    app.add_option("--tol", tol, "tolerance override");
    app.add_option("--body", body, "body as inline JSON or a JSON file path");
    app.add_option("--n-min", n_min, "smallest n of a table or sweep");
    app.add_option("--n-max", n_max, "largest n of a table or sweep");
    app.add_flag("--sweep", sweep, "sweep all (n, k) at p = factor * pbar");
    app.add_option("--sweep-factor", sweep_factor, "p / pbar in sweep mode");
    app.add_option("--instances", instances, "number of random instances");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"vk", "intrinsic volume of a body"},
        {"concavity", "log-concavity scan of f_k along h e^{s psi}"},
        {"thresholds", "table of the threshold exponents"},
        {"counterexample", "failure certificate for the cube pair"},
        {"christoffel", "Christoffel-Minkowski residual over the grid"},
        {"poincare", "Poincare ratio of an even centered test function"},
        {"ibp-check", "integration-by-parts residuals on random instances"},
    };
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : ConfigError;
    }

    ExperimentConfig cfg;
    try {
        if (config_path) cfg.merge(read_json_file(*config_path));
        if (n) cfg.n = *n;
        if (k) cfg.k = *k;
        if (p) cfg.p = *p;
        if (t) cfg.t = *t;
        if (grid_res) cfg.grid_res = grid_res;
        if (grid_method) cfg.grid_method = grid_method;
        if (seed) cfg.seed = *seed;
        if (psi) cfg.psi = *psi;
        if (amplitude) cfg.amplitude = *amplitude;
        if (s_min) cfg.s_min = *s_min;
        if (s_max) cfg.s_max = *s_max;
        if (s_steps) cfg.s_steps = *s_steps;
        if (out_path) cfg.out = out_path;
        if (json_path) cfg.json = json_path;
        if (tol) cfg.tol = tol;
        if (body) cfg.body = json_argument(*body);
        if (n_min) cfg.n_min = *n_min;
        if (n_max) cfg.n_max = *n_max;
        if (sweep) cfg.sweep = true;
        if (sweep_factor) cfg.sweep_factor = *sweep_factor;
        if (instances) cfg.instances = *instances;
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.validate();

        out << std::setprecision(17);
        const Context ctx{cfg, out, err};
        if (cfg.command == "vk") return cmd_vk(ctx);
        if (cfg.command == "concavity") return cmd_concavity(ctx);
        if (cfg.command == "thresholds") return cmd_thresholds(ctx);
        if (cfg.command == "counterexample") return cmd_counterexample(ctx);
        if (cfg.command == "christoffel") return cmd_christoffel(ctx);
        if (cfg.command == "poincare") return cmd_poincare(ctx);
        return cmd_ibp(ctx);
    } catch (const PathValidityError& e) {
        err << "error: " << e.what() << " (s=" << e.s() << ", node=" << e.node() << ")\n";
        return NumericalError;
    } catch (const EvaluationError& e) {
        err << "error: " << e.what() << " (node " << e.node() << ")\n";
        return NumericalError;
    } catch (const UnboundedError& e) {
        err << "error: " << e.what() << "\n";
        return NumericalError;
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigError;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigError;
    } catch (const UnsupportedError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return NumericalError;
    }
}

}  // namespace pbm::cli
