#include "pbmkit/serialization.hpp"

#include "pbmkit/errors.hpp"

#include <charconv>
#include <ostream>

namespace pbm {

namespace {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigurationError(std::string("missing field \"") + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("field \"") + key + "\": " + e.what());
    }
}

Json vec_to_json(const Vec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json details_json(const std::vector<std::pair<std::string, double>>& details) {
    Json d = Json::object();
    for (const auto& [key, value] : details) d[key] = value;
    return d;
}

}  // namespace

const char* library_version() { return PBMKIT_VERSION; }

Json grid_to_json(const SphericalGrid& grid) {
    Json nodes = Json::array();
    for (const Vec& x : grid.nodes()) nodes.push_back(vec_to_json(x));
    return {
        {"schema_version", kSchemaVersion},
        {"dimension", grid.dimension()},
        {"method", std::string(to_string(grid.method()))},
        {"resolution", grid.resolution()},
        {"seed", grid.seed()},
        {"fingerprint", grid.fingerprint()},
        {"nodes", nodes},
        {"weights", std::vector<double>(grid.weights().begin(), grid.weights().end())},
    };
}

SphericalGrid grid_from_json(const Json& j) {
    const int version = field<int>(j, "schema_version");
    if (version != kSchemaVersion) {
        throw ConfigurationError("unsupported grid schema version " + std::to_string(version));
    }
    const int n = field<int>(j, "dimension");
    const auto raw_nodes = field<std::vector<std::vector<double>>>(j, "nodes");
    std::vector<Vec> nodes;
    nodes.reserve(raw_nodes.size());
    for (const auto& r : raw_nodes) {
        if (static_cast<int>(r.size()) != n) throw ConfigurationError("grid node has the wrong dimension");
        nodes.push_back(Eigen::Map<const Vec>(r.data(), n));
    }
    return SphericalGrid(n, grid_method_from_string(field<std::string>(j, "method")), field<int>(j, "resolution"),
                         field<std::uint64_t>(j, "seed"), std::move(nodes), field<std::vector<double>>(j, "weights"));
}

Json test_function_to_json(const TestFunction& psi) {
    Json terms = Json::array();
    for (const Monomial& m : psi.terms()) terms.push_back({{"coef", m.coef}, {"exponents", m.exponents}});
    return {{"dimension", psi.dimension()},
            {"terms", terms},
            {"amplitude", psi.amplitude()},
            {"offset", psi.offset()}};
}

TestFunction test_function_from_json(const Json& j) {
    std::vector<Monomial> terms;
    const Json t = field<Json>(j, "terms");
    if (!t.is_array()) throw ConfigurationError("\"terms\" must be an array");
    for (const Json& m : t) terms.push_back({field<double>(m, "coef"), field<std::vector<int>>(m, "exponents")});
    return TestFunction(field<int>(j, "dimension"), std::move(terms), j.value("amplitude", 1.0),
                        j.value("offset", 0.0));
}

TestFunction test_function_from_name(const std::string& name, int n, double amplitude) {
    if (name == "const") return TestFunction::constant(n, 1.0).with_amplitude(amplitude);
    if (name == "x1sq") return TestFunction::coordinate_square(n, 0).with_amplitude(amplitude);
    if (name == "x1sq-centered") return TestFunction::coordinate_square(n, 0, 1.0 / n).with_amplitude(amplitude);
    if (name == "harm4") return TestFunction::degree4_harmonic(n).with_amplitude(amplitude);
    Json doc;
    try {
        doc = Json::parse(name);
    } catch (const nlohmann::json::exception&) {
        throw ConfigurationError("unknown test function \"" + name +
                                 "\"; use const, x1sq, x1sq-centered, harm4 or a JSON document");
    }
    if (!doc.contains("dimension")) doc["dimension"] = n;
    TestFunction psi = test_function_from_json(doc);
    if (psi.dimension() != n) throw ConfigurationError("test function dimension does not match --n");
    return psi.with_amplitude(psi.amplitude() * amplitude);
}

Json body_to_json(const Body& body) {
    if (const auto* b = std::get_if<Ball>(&body)) return {{"type", "ball"}, {"radius", b->radius}};
    if (const auto* b = std::get_if<Box>(&body)) return {{"type", "box"}, {"a", b->half_lengths}};
    if (const auto* c = std::get_if<EmbeddedCube>(&body)) {
        std::vector<int> idx;
        for (int i : c->indices) idx.push_back(i + 1);
        return {{"type", "embedded_cube"}, {"n", c->dimension}, {"indices", idx}};
    }
    if (const auto* l = std::get_if<LogPerturbedBall>(&body)) {
        return {{"type", "log_perturbed_ball"}, {"psi", test_function_to_json(l->psi)}, {"s", l->s}};
    }
    const auto& w = std::get<WulffSampled>(body);
    return {{"type", "wulff_sampled"}, {"grid", grid_to_json(*w.grid)}, {"gauge", w.gauge}};
}

Body body_from_json(const Json& j) {
    const auto type = field<std::string>(j, "type");
    try {
        if (type == "ball") return make_ball(j.value("radius", 1.0));
        if (type == "box") return make_box(field<std::vector<double>>(j, "a"));
        if (type == "embedded_cube") return make_embedded_cube(field<int>(j, "n"), field<std::vector<int>>(j, "indices"));
        if (type == "log_perturbed_ball") {
            return make_log_perturbed_ball(test_function_from_json(field<Json>(j, "psi")), field<double>(j, "s"));
        }
        if (type == "wulff_sampled") {
            auto grid = std::make_shared<const SphericalGrid>(grid_from_json(field<Json>(j, "grid")));
            return make_wulff(std::move(grid), field<std::vector<double>>(j, "gauge"));
        }
    } catch (const DomainError& e) {
        throw ConfigurationError(std::string("invalid body: ") + e.what());
    }
    throw ConfigurationError("unknown body type \"" + type + "\"");
}

Json to_json(const IntrinsicVolumeResult& r) {
    return {{"value", r.value},
            {"k", r.k},
            {"method", std::string(to_string(r.method))},
            {"error_estimate", r.error_estimate},
            {"non_positive_nodes", r.non_positive_nodes}};
}

Json to_json(const ConcavityReport& r) {
    Json j = {{"n", r.n},
              {"k", r.k},
              {"s", r.s},
              {"f", r.f},
              {"f_prime", r.f1},
              {"f_second", r.f2},
              {"H", r.h},
              {"f0", r.f0},
              {"tolerance", r.tolerance},
              {"verdict", std::string(to_string(r.verdict))}};
    j["s_star"] = r.s_star ? Json(*r.s_star) : Json(nullptr);
    return j;
}

Json to_json(const Verdict& v) {
    return {{"lhs", v.lhs},
            {"rhs", v.rhs},
            {"margin", v.margin},
            {"tolerance", v.tolerance},
            {"method", v.method},
            {"conclusion", std::string(to_string(v.conclusion))},
            {"vk_lhs", v.vk_lhs},
            {"vk_rhs", v.vk_rhs},
            {"vk_margin", v.vk_margin},
            {"details", details_json(v.details)}};
}

Json to_json(const PoincareResult& r) {
    return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}, {"exact_equality", r.exact_equality}};
}

Json to_json(const IbpResult& r) {
    return {{"residual1", r.residual1}, {"residual2", r.residual2}, {"lhs1", r.lhs1},
            {"rhs1", r.rhs1},           {"lhs2", r.lhs2},           {"rhs2", r.rhs2}};
}

Json to_json(const Threshold& t) { return {{"pbar", t.value}, {"branch", std::string(to_string(t.branch))}}; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    const auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_field(cells[i]);
        }
        out << "\r\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
}

void write_concavity_csv(std::ostream& out, const ConcavityReport& r) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.s.size(); ++i) rows.push_back({format_double(r.s[i]), format_double(r.h[i])});
    write_csv(out, {"s", "H"}, rows);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const SweepRow& r : rows) {
        cells.push_back({std::to_string(r.n), std::to_string(r.k), std::string(to_string(r.pbar.branch)),
                         format_double(r.pbar.value), format_double(r.p), format_double(r.verdict.vk_lhs),
                         format_double(r.verdict.vk_rhs), format_double(r.verdict.vk_margin),
                         std::string(to_string(r.verdict.conclusion))});
    }
    write_csv(out, {"n", "k", "branch", "pbar", "p", "lhs_bound", "rhs", "margin", "conclusion"}, cells);
}

}  // namespace pbm
