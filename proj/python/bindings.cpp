#include "pbmkit/cli.hpp"
#include "pbmkit/counterexamples.hpp"
#include "pbmkit/errors.hpp"
#include "pbmkit/intrinsic.hpp"
#include "pbmkit/serialization.hpp"
#include "pbmkit/variation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace pbm;

namespace {

using GridPtr = std::shared_ptr<SphericalGrid>;

struct PyBody {
    Body body;
};

py::object to_python(const Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Json from_python(const py::object& o) {
    return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

GridPtr share(SphericalGrid g) { return std::make_shared<SphericalGrid>(std::move(g)); }

py::array_t<double> nodes_array(const SphericalGrid& g) {
    py::array_t<double> a({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(g.dimension())});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.dimension(); ++i) m(static_cast<py::ssize_t>(j), i) = g.node(j)[i];
    return a;
}

}  // namespace

PYBIND11_MODULE(_pbmkit, m) {
    m.doc() = "Support functions, intrinsic volumes and p-Brunn-Minkowski experiments";
    m.attr("__version__") = library_version();

    auto& error = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigurationError>(m, "ConfigurationError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
    py::register_exception<UnsupportedError>(m, "UnsupportedError", error.ptr());
    py::register_exception<UnboundedError>(m, "UnboundedError", error.ptr());
    py::register_exception<EvaluationError>(m, "EvaluationError", error.ptr());
    py::register_exception<PathValidityError>(m, "PathValidityError", error.ptr());

    py::class_<SphericalGrid, GridPtr>(m, "SphericalGrid")
        .def_property_readonly("dimension", &SphericalGrid::dimension)
        .def_property_readonly("method", [](const SphericalGrid& g) { return std::string(to_string(g.method())); })
        .def_property_readonly("resolution", &SphericalGrid::resolution)
        .def_property_readonly("seed", &SphericalGrid::seed)
        .def_property_readonly("fingerprint", &SphericalGrid::fingerprint)
        .def_property_readonly("nodes", &nodes_array)
        .def_property_readonly("weights",
                               [](const SphericalGrid& g) {
                                   const auto w = g.weights();
                                   py::array_t<double> a(static_cast<py::ssize_t>(w.size()));
                                   std::copy(w.begin(), w.end(), a.mutable_data());
                                   return a;
                               })
        .def("__len__", &SphericalGrid::size)
        .def("integrate", [](const SphericalGrid& g, const std::function<double(const Vec&)>& f) { return integrate(g, f); })
        .def("to_json", [](const SphericalGrid& g) { return to_python(grid_to_json(g)); })
        .def_static("from_json", [](const py::object& o) { return share(grid_from_json(from_python(o))); })
        .def("__repr__", [](const SphericalGrid& g) {
            std::ostringstream s;
            s << "<SphericalGrid n=" << g.dimension() << " " << to_string(g.method()) << " res=" << g.resolution()
              << " nodes=" << g.size() << ">";
            return s.str();
        });

    m.def(
        "build_grid",
        [](int n, std::optional<int> resolution, const std::string& method, std::uint64_t seed) {
            return share(build_grid(n, resolution.value_or(reference_resolution(n)), grid_method_from_string(method), seed));
        },
        py::arg("n"), py::arg("resolution") = py::none(), py::arg("method") = "product-angular", py::arg("seed") = 0);
    m.def("reference_resolution", &reference_resolution);
    m.def("sphere_area", &sphere_area);
    m.def("kappa", &kappa);

    py::class_<TestFunction>(m, "TestFunction")
        .def_static("constant", &TestFunction::constant)
        .def_static("coordinate_square", &TestFunction::coordinate_square, py::arg("n"), py::arg("i"), py::arg("shift") = 0.0)
        .def_static("quadratic_form", [](const Mat& a) { return TestFunction::quadratic_form(a); })
        .def_static("degree4_harmonic", &TestFunction::degree4_harmonic)
        .def_static("random_even_quadratic",
                    [](int n, std::uint64_t seed) {
                        std::mt19937_64 rng(seed);
                        return TestFunction::random_even_quadratic(n, rng);
                    })
        .def_static("from_name", &test_function_from_name, py::arg("name"), py::arg("n"), py::arg("amplitude") = 1.0)
        .def_static("from_json", [](const py::object& o) { return test_function_from_json(from_python(o)); })
        .def_property_readonly("dimension", &TestFunction::dimension)
        .def_property_readonly("amplitude", &TestFunction::amplitude)
        .def("with_amplitude", &TestFunction::with_amplitude)
        .def("shifted", &TestFunction::shifted)
        .def("is_even", &TestFunction::is_even)
        .def("__call__", &TestFunction::value)
        .def("laplacian", &TestFunction::laplacian)
        .def("to_json", [](const TestFunction& t) { return to_python(test_function_to_json(t)); });

    py::class_<PyBody>(m, "Body")
        .def_property_readonly("kind", [](const PyBody& b) { return std::string(body_kind(b.body)); })
        .def_property_readonly("dimension", [](const PyBody& b) { return body_dimension(b.body); })
        .def("support", [](const PyBody& b, const Vec& u) { return support(b.body, u); })
        .def("scaled", [](const PyBody& b, double t) { return PyBody{scaled(b.body, t)}; })
        .def("to_json", [](const PyBody& b) { return to_python(body_to_json(b.body)); })
        .def_static("from_json", [](const py::object& o) { return PyBody{body_from_json(from_python(o))}; })
        .def("__repr__", [](const PyBody& b) { return "<Body " + body_to_json(b.body).dump() + ">"; });

    m.def("ball", [](double r) { return PyBody{make_ball(r)}; }, py::arg("radius") = 1.0);
    m.def("box", [](std::vector<double> a) { return PyBody{make_box(std::move(a))}; });
    m.def("embedded_cube", [](int n, const std::vector<int>& idx) { return PyBody{make_embedded_cube(n, idx)}; },
          py::arg("n"), py::arg("indices"));
    m.def("log_perturbed_ball", [](const TestFunction& psi, double s) { return PyBody{make_log_perturbed_ball(psi, s)}; });
    m.def("wulff", [](const GridPtr& g, std::vector<double> f) { return PyBody{make_wulff(g, std::move(f))}; });

    m.def("pmean_value", &pmean_value, py::arg("p"), py::arg("t"), py::arg("a"), py::arg("b"));
    m.def(
        "pmean_gauge",
        [](const GridPtr& g, double p, double t, const PyBody& k0, const PyBody& k1) {
            return pmean_gauge(*g, {p, t, k0.body, k1.body});
        },
        py::arg("grid"), py::arg("p"), py::arg("t"), py::arg("k0"), py::arg("k1"));
    m.def("wulff_support_upper",
          [](const GridPtr& g, const std::vector<double>& f, const Vec& u) { return wulff_support_upper(*g, f, u); });
    m.def("wulff_membership",
          [](const GridPtr& g, const std::vector<double>& f, const Vec& x) { return wulff_membership(*g, f, x); });

    m.def("elem_sym", [](int r, const Mat& a) { return elem_sym(r, a); });
    m.def("cofactor", [](int r, const Mat& a) { return Mat(cofactor(r, a)); });

    m.def(
        "vk",
        [](const PyBody& b, int k, const GridPtr& g) {
            if (g) return to_python(to_json(vk(b.body, k, *g)));
            return to_python(to_json(vk(b.body, k, build_grid(2, 1, GridMethod::ProductAngular))));
        },
        py::arg("body"), py::arg("k"), py::arg("grid") = nullptr);
    m.def("vk_ball", [](int n, int k, double r) { return vk_ball(n, k, r).value; }, py::arg("n"), py::arg("k"),
          py::arg("radius") = 1.0);
    m.def("vk_box", [](const std::vector<double>& a, int k) { return vk_box(a, k).value; });

    m.def(
        "derivatives",
        [](const PyBody& base, const TestFunction& psi, int k, const GridPtr& g, double s, int order) {
            const FkDerivatives d = derivatives(VariationPath(base.body, psi, k, g), s, order);
            py::dict out;
            out["s"] = d.s;
            out["f"] = d.f;
            out["d1"] = d.d1;
            out["d2"] = d.d2;
            out["d3"] = d.d3;
            return out;
        },
        py::arg("base"), py::arg("psi"), py::arg("k"), py::arg("grid"), py::arg("s") = 0.0, py::arg("order") = 2);
    m.def(
        "concavity_scan",
        [](const PyBody& base, const TestFunction& psi, int k, const GridPtr& g, std::optional<std::vector<double>> s,
           std::optional<double> tol) {
            const VariationPath path(base.body, psi, k, g);
            return to_python(to_json(concavity_scan(path, s.value_or(linspace(-2, 2, 21)), tol)));
        },
        py::arg("base"), py::arg("psi"), py::arg("k"), py::arg("grid"), py::arg("s") = py::none(),
        py::arg("tol") = py::none());
    m.def("poincare_check", [](const TestFunction& psi, const GridPtr& g) { return to_python(to_json(poincare_check(psi, *g))); });
    m.def("ibp_check", [](const PyBody& h, const TestFunction& phi, const TestFunction& phi_bar, const TestFunction& psi,
                          int k, const GridPtr& g) { return to_python(to_json(ibp_check(h.body, phi, phi_bar, psi, k, *g))); });
    m.def("christoffel_max_residual",
          [](const PyBody& b, double p, int k, const GridPtr& g) { return christoffel_max_residual(b.body, p, k, *g); });

    m.def("threshold_pbar", [](int n, int k) { return to_python(to_json(threshold_pbar(n, k))); });
    m.def("cube_k0", [](int n, int k) { return PyBody{cube_k0(n, k)}; });
    m.def("cube_k1", [](int n, int k) { return PyBody{cube_k1(n, k)}; });
    m.def("enclosing_box", [](int n, int k, double p, double t) { return enclosing_box(n, k, p, t).half_lengths; },
          py::arg("n"), py::arg("k"), py::arg("p"), py::arg("t") = 0.5);
    m.def("verify_counterexample",
          [](int n, int k, double p, double t) { return to_python(to_json(verify_counterexample(n, k, p, t))); },
          py::arg("n"), py::arg("k"), py::arg("p"), py::arg("t") = 0.5);
    m.def(
        "v1_reverse_check",
        [](const PyBody& k0, const PyBody& k1, double p, double t, const GridPtr& g) {
            return to_python(to_json(v1_reverse_check(k0.body, k1.body, p, t, *g)));
        },
        py::arg("k0"), py::arg("k1"), py::arg("p"), py::arg("t"), py::arg("grid"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> all{"pbmkit"};
            all.insert(all.end(), args.begin(), args.end());
            std::vector<const char*> argv;
            for (const auto& a : all) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
