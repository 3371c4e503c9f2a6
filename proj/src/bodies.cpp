#include "pbmkit/bodies.hpp"

#include "pbmkit/errors.hpp"
#include "pbmkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unit(const Vec& u) {
    if (!std::isfinite(u.norm()) || std::abs(u.norm() - 1.0) > 1e-10) {
        throw DomainError("support direction is not a unit vector");
    }
}

void require_dimension(const Body& body, const Vec& u) {
    const auto n = body_dimension(body);
    if (n && *n != u.size()) {
        throw DomainError("direction has dimension " + std::to_string(u.size()) + ", body lives in R^" +
                          std::to_string(*n));
    }
}

}  // namespace

Body make_ball(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be positive");
    return Ball{radius};
}

Body make_box(std::vector<double> half_lengths) {
    if (half_lengths.size() < 2) throw DomainError("box needs at least two half-lengths");
    for (double a : half_lengths) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("box half-lengths must be >= 0");
    }
    return Box{std::move(half_lengths)};
}

Body make_embedded_cube(int n, const std::vector<int>& indices_one_based) {
    if (n < 2) throw DomainError("embedded cube needs n >= 2");
    EmbeddedCube cube{n, {}};
    for (int i : indices_one_based) {
        if (i < 1 || i > n) throw DomainError("embedded cube index out of range 1..n");
        cube.indices.push_back(i - 1);
    }
    std::sort(cube.indices.begin(), cube.indices.end());
    if (std::adjacent_find(cube.indices.begin(), cube.indices.end()) != cube.indices.end()) {
        throw DomainError("embedded cube indices must be distinct");
    }
    return cube;
}

Body make_log_perturbed_ball(TestFunction psi, double s) {
    if (!std::isfinite(s)) throw DomainError("perturbation parameter s must be finite");
    return LogPerturbedBall{std::move(psi), s};
}

Body make_wulff(std::shared_ptr<const SphericalGrid> grid, std::vector<double> gauge) {
    if (!grid) throw DomainError("Wulff body needs a grid");
    if (gauge.size() != grid->size()) throw DomainError("Wulff gauge needs one value per grid node");
    for (double f : gauge) {
        if (!(f >= 0.0) || !std::isfinite(f)) throw DomainError("Wulff gauge values must be >= 0");
    }
    return WulffSampled{std::move(grid), std::move(gauge)};
}

std::optional<int> body_dimension(const Body& body) {
    return std::visit(
        overloaded{
            [](const Ball&) -> std::optional<int> { return std::nullopt; },
            [](const Box& b) -> std::optional<int> { return static_cast<int>(b.half_lengths.size()); },
            [](const EmbeddedCube& c) -> std::optional<int> { return c.dimension; },
            [](const LogPerturbedBall& l) -> std::optional<int> { return l.psi.dimension(); },
            [](const WulffSampled& w) -> std::optional<int> { return w.grid->dimension(); },
        },
        body);
}

bool is_smooth(const Body& body) {
    return std::holds_alternative<Ball>(body) || std::holds_alternative<LogPerturbedBall>(body);
}

std::string_view body_kind(const Body& body) {
    return std::visit(overloaded{
                          [](const Ball&) { return std::string_view("ball"); },
                          [](const Box&) { return std::string_view("box"); },
                          [](const EmbeddedCube&) { return std::string_view("embedded_cube"); },
                          [](const LogPerturbedBall&) { return std::string_view("log_perturbed_ball"); },
                          [](const WulffSampled&) { return std::string_view("wulff_sampled"); },
                      },
                      body);
}

double support(const Body& body, const Vec& u) {
    require_unit(u);
    require_dimension(body, u);
    return std::visit(
        overloaded{
            [](const Ball& b) { return b.radius; },
            [&u](const Box& b) {
                double s = 0.0;
                for (std::size_t i = 0; i < b.half_lengths.size(); ++i) {
                    s += b.half_lengths[i] * std::abs(u[static_cast<Eigen::Index>(i)]);
                }
                return s;
            },
            [&u](const EmbeddedCube& c) {
                double s = 0.0;
                for (int i : c.indices) s += std::abs(u[i]);
                return s;
            },
            [&u](const LogPerturbedBall& l) { return std::exp(l.s * l.psi.value(u)); },
            [&u](const WulffSampled& w) { return wulff_support_upper(*w.grid, w.gauge, u); },
        },
        body);
}

Jet support_jet(const Body& body, const Vec& x) {
    require_dimension(body, x);
    const int n = static_cast<int>(x.size());
    if (const auto* b = std::get_if<Ball>(&body)) return Jet::constant(n, b->radius);
    if (const auto* l = std::get_if<LogPerturbedBall>(&body)) return exp(l->s * l->psi.jet(x));
    throw UnsupportedError(std::string("support function of a ") + std::string(body_kind(body)) +
                           " is not twice differentiable");
}

Body scaled(const Body& body, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale factor must be positive");
    return std::visit(
        overloaded{
            [t](const Ball& b) -> Body { return Ball{b.radius * t}; },
            [t](const Box& b) -> Body {
                Box r = b;
                for (double& a : r.half_lengths) a *= t;
                return r;
            },
            [t](const EmbeddedCube& c) -> Body {
                Box r{std::vector<double>(static_cast<std::size_t>(c.dimension), 0.0)};
                for (int i : c.indices) r.half_lengths[static_cast<std::size_t>(i)] = t;
                return r;
            },
            [](const LogPerturbedBall&) -> Body {
                throw UnsupportedError("scaling a log-perturbed ball is not representable");
            },
            [](const WulffSampled&) -> Body {
                throw UnsupportedError("scaling a sampled Wulff body is not supported");
            },
        },
        body);
}

double minkowski_support(const Body& k, const Body& l, double alpha, double beta, const Vec& u) {
    if (alpha < 0.0 || beta < 0.0) throw DomainError("Minkowski coefficients must be >= 0");
    return alpha * support(k, u) + beta * support(l, u);
}

double pmean_value(double p, double t, double a, double b) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t must lie in [0, 1]");
    if (a < 0.0 || b < 0.0) throw DomainError("p-mean of negative support values");
    if (p == 0.0) {
        if (t == 0.0) return a;
        if (t == 1.0) return b;
        if (a == 0.0 || b == 0.0) return 0.0;
        return std::pow(a, 1.0 - t) * std::pow(b, t);
    }
    if (p == 1.0) return (1.0 - t) * a + t * b;
    return std::pow((1.0 - t) * std::pow(a, p) + t * std::pow(b, p), 1.0 / p);
}

double pmean(const PMeanSpec& spec, const Vec& u) {
    return pmean_value(spec.p, spec.t, support(spec.h0, u), support(spec.h1, u));
}

std::vector<double> sample_gauge(const SphericalGrid& grid, const std::function<double(const Vec&)>& f) {
    std::vector<double> g;
    g.reserve(grid.size());
    for (const Vec& y : grid.nodes()) g.push_back(f(y));
    return g;
}

std::vector<double> pmean_gauge(const SphericalGrid& grid, const PMeanSpec& spec) {
    return sample_gauge(grid, [&spec](const Vec& y) { return pmean(spec, y); });
}

double wulff_support_upper(const SphericalGrid& grid, std::span<const double> gauge, const Vec& u) {
    require_unit(u);
    if (u.size() != grid.dimension()) throw DomainError("direction dimension does not match grid");
    if (gauge.size() != grid.size()) throw DomainError("Wulff gauge needs one value per grid node");
    for (double f : gauge) {
        if (f < 0.0) throw DomainError("Wulff gauge values must be >= 0");
    }
    return maximize_over_halfspaces(grid.nodes(), gauge, u).value;
}

bool wulff_membership(const SphericalGrid& grid, std::span<const double> gauge, const Vec& x) {
    if (x.size() != grid.dimension()) throw DomainError("point dimension does not match grid");
    if (gauge.size() != grid.size()) throw DomainError("Wulff gauge needs one value per grid node");
    const double slack = 1e-12 * (1.0 + x.norm());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (grid.node(j).dot(x) > gauge[j] + slack) return false;
    }
    return true;
}

}  // namespace pbm
