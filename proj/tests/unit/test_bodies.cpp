#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbmkit/bodies.hpp"
#include "pbmkit/counterexamples.hpp"
#include "pbmkit/errors.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>

using namespace pbm;

namespace {

Vec random_unit(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v / v.norm();
}

}  // namespace

TEST_CASE("support function examples") {
    CHECK(support(make_box({1, 1, 1}), Vec::Unit(3, 0)) == 1.0);
    const Body cube = make_embedded_cube(4, {3, 4});
    CHECK(support(cube, Vec::Unit(4, 0)) == 0.0);
    CHECK(support(cube, Vec::Unit(4, 2)) == 1.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) CHECK(support(make_ball(2.0), random_unit(5, rng)) == 2.0);
    CHECK(support(make_box({2, 3}), Vec(Eigen::Vector2d(0.6, -0.8))) == doctest::Approx(1.2 + 2.4));
    const TestFunction psi = TestFunction::coordinate_square(3, 0);
    CHECK(support(make_log_perturbed_ball(psi, 0.5), Vec::Unit(3, 0)) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("support rejects bad directions and bodies") {
    CHECK_THROWS_AS(support(make_ball(1.0), Vec::Constant(3, 1.0)), DomainError);
    CHECK_THROWS_AS(support(make_box({1, 1, 1}), Vec::Unit(4, 0)), DomainError);
    CHECK_THROWS_AS(make_ball(0.0), DomainError);
    CHECK_THROWS_AS(make_box({1, -1}), DomainError);
    CHECK_THROWS_AS(make_embedded_cube(3, {0}), DomainError);
    CHECK_THROWS_AS(make_embedded_cube(3, {2, 2}), DomainError);
}

TEST_CASE("minkowski combination of support functions") {
    std::mt19937_64 rng(2);
    CHECK(minkowski_support(make_ball(1), make_ball(1), 0.5, 0.5, random_unit(3, rng)) == doctest::Approx(1.0));
    CHECK(minkowski_support(make_box({1, 1}), make_ball(1), 1, 1, Vec::Unit(2, 0)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(minkowski_support(make_ball(1), make_ball(1), -0.1, 1, Vec::Unit(2, 0)), DomainError);
    const Body k = make_box({1, 2, 0.5});
    const Body l = make_ball(0.7);
    for (int i = 0; i < 50; ++i) {
        const Vec u = random_unit(3, rng);
        const double a = std::uniform_real_distribution<double>(0, 3)(rng);
        const double b = std::uniform_real_distribution<double>(0, 3)(rng);
        CHECK(minkowski_support(k, l, a + b, 1, u) ==
              doctest::Approx(minkowski_support(k, l, a, 1, u) + b * support(k, u)).epsilon(1e-14));
    }
}

TEST_CASE("p-mean examples and ordering") {
    CHECK(pmean_value(1.0, 0.5, 0.0, 1.0) == 0.5);
    CHECK(pmean_value(0.0, 0.5, 0.0, 1.0) == 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double c = 0.1 + 3 * u01(rng);
        const double p = u01(rng);
        const double t = u01(rng);
        CHECK(pmean_value(p, t, c, c) == doctest::Approx(c).epsilon(1e-13));
        CHECK(pmean_value(0.0, t, c, c) == doctest::Approx(c).epsilon(1e-13));
    }
    const Body b0 = make_box({1.0, 0.2, 2.0});
    const Body b1 = make_ball(0.8);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = random_unit(3, rng);
        const double t = u01(rng);
        const double p = u01(rng);
        const double geo = pmean({0.0, t, b0, b1}, x);
        const double mid = pmean({p, t, b0, b1}, x);
        const double ari = pmean({1.0, t, b0, b1}, x);
        CHECK(geo <= mid * (1 + 1e-14));
        CHECK(mid <= ari * (1 + 1e-14));
    }
    CHECK_THROWS_AS(pmean_value(1.5, 0.5, 1, 1), DomainError);
    CHECK_THROWS_AS(pmean_value(-0.5, 0.5, 1, 1), DomainError);
}

TEST_CASE("homogeneity and evenness of support functions") {
    std::mt19937_64 rng(8);
    const auto g = build_grid(3, 8, GridMethod::ProductAngular);
    for (const Body& body : {make_ball(1.3), make_box({0.5, 1.0, 2.0}), make_embedded_cube(3, {1, 3})}) {
        for (double t : {0.25, 0.5, 2.0, 7.0}) {
            const Vec u = random_unit(3, rng);
            CHECK(support(scaled(body, t), u) == doctest::Approx(t * support(body, u)).epsilon(1e-14));
        }
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(support(body, g.node(j)) == support(body, g.node(g.antipode(j))));
        }
    }
    CHECK(std::holds_alternative<Box>(scaled(make_embedded_cube(3, {2}), 2.0)));
    CHECK_THROWS_AS(scaled(make_ball(1.0), 0.0), DomainError);
}

TEST_CASE("scaling identity of the geometric-mean combination") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Body k0 = make_box({1.0, 0.5, 2.0, 0.3});
    const Body k1 = make_ball(1.7);
    for (int i = 0; i < 200; ++i) {
        const double alpha = 0.1 + 3 * u01(rng);
        const double beta = 0.1 + 3 * u01(rng);
        const double t = u01(rng);
        const Vec u = random_unit(4, rng);
        const double lhs = pmean({0.0, t, scaled(k0, alpha), scaled(k1, beta)}, u);
        const double rhs = std::pow(alpha, 1 - t) * std::pow(beta, t) * pmean({0.0, t, k0, k1}, u);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("Wulff outer approximation") {
    SUBCASE("constant gauge gives the ball") {
        const auto g = build_grid(3, 12, GridMethod::ProductAngular);
        const std::vector<double> f(g.size(), 2.0);
        std::mt19937_64 rng(1);
        for (std::size_t j = 0; j < g.size(); j += 7) {
            CHECK(std::abs(wulff_support_upper(g, f, g.node(j)) - 2.0) <= 1e-8);
        }
        // Off-grid directions sit above R but approach it with refinement.
        const Vec u = random_unit(3, rng);
        const double coarse = wulff_support_upper(g, f, u);
        const auto fine_grid = build_grid(3, 40, GridMethod::ProductAngular);
        const double fine = wulff_support_upper(fine_grid, std::vector<double>(fine_grid.size(), 2.0), u);
        CHECK(coarse >= 2.0 - 1e-9);
        CHECK(fine >= 2.0 - 1e-9);
        CHECK(fine - 2.0 < 0.01);
        // Lattice grids are nested, so refinement can only lower the bound.
        double last = std::numeric_limits<double>::infinity();
        for (int r : {1, 2, 4}) {
            const auto lg = build_grid(3, r, GridMethod::Lattice);
            const double v = wulff_support_upper(lg, std::vector<double>(lg.size(), 2.0), u);
            CHECK(v >= 2.0 - 1e-9);
            CHECK(v <= last + 1e-9);
            last = v;
        }
    }
    SUBCASE("gauge of a support function recovers the body") {
        const auto g = build_grid(3, 2, GridMethod::Lattice);
        const Body box = make_box({1, 1, 1});
        const auto f = sample_gauge(g, [&](const Vec& y) { return support(box, y); });
        CHECK(std::abs(wulff_support_upper(g, f, Vec::Unit(3, 0)) - 1.0) <= 1e-8);
        const Vec diag = Vec::Constant(3, 1.0 / std::sqrt(3.0));
        CHECK(std::abs(wulff_support_upper(g, f, diag) - std::sqrt(3.0)) <= 1e-8);
        const Body w = make_wulff(std::make_shared<const SphericalGrid>(g), f);
        CHECK(std::abs(support(w, Vec::Unit(3, 1)) - 1.0) <= 1e-8);
    }
    SUBCASE("p-mean of the cube pair obeys the coordinate bound") {
        const auto g = build_grid(4, 2, GridMethod::Lattice);
        const PMeanSpec spec{0.5, 0.5, cube_k0(4, 2), cube_k1(4, 2)};
        const auto f = pmean_gauge(g, spec);
        CHECK(wulff_support_upper(g, f, Vec::Unit(4, 0)) <= 0.25 + 1e-8);
    }
    SUBCASE("nested approximations for p = 0, 1/2, 1") {
        const auto g = build_grid(3, 10, GridMethod::ProductAngular);
        const Body k0 = make_box({1.0, 0.4, 0.7});
        const Body k1 = make_ball(0.9);
        const auto f0 = pmean_gauge(g, {0.0, 0.5, k0, k1});
        const auto fh = pmean_gauge(g, {0.5, 0.5, k0, k1});
        const auto f1 = pmean_gauge(g, {1.0, 0.5, k0, k1});
        for (std::size_t j = 0; j < g.size(); j += 5) {
            const Vec& u = g.node(j);
            const double a = wulff_support_upper(g, f0, u);
            const double b = wulff_support_upper(g, fh, u);
            const double c = wulff_support_upper(g, f1, u);
            CHECK(a <= b + 1e-9);
            CHECK(b <= c + 1e-9);
        }
    }
    SUBCASE("too coarse a grid is reported as unbounded") {
        const SphericalGrid g(2, GridMethod::MonteCarlo, 1, 0, {Vec::Unit(2, 0), -Vec::Unit(2, 0)}, {std::numbers::pi, std::numbers::pi});
        CHECK_THROWS_AS(wulff_support_upper(g, std::vector<double>{1.0, 1.0}, Vec::Unit(2, 1)), UnboundedError);
    }
}

TEST_CASE("Wulff membership") {
    const auto g = build_grid(2, 8, GridMethod::ProductAngular);
    REQUIRE(g.find_node(Vec::Unit(2, 0), 1e-12) != SphericalGrid::npos);
    const std::vector<double> ones(g.size(), 1.0);
    CHECK(wulff_membership(g, ones, Vec::Zero(2)));
    CHECK_FALSE(wulff_membership(g, ones, 1.01 * Vec::Unit(2, 0)));
    const Body box = make_box({1, 1});
    const auto f = sample_gauge(g, [&](const Vec& y) { return support(box, y); });
    CHECK(wulff_membership(g, f, Vec(Eigen::Vector2d(1.0, 1.0))));
    CHECK_FALSE(wulff_membership(g, f, Vec(Eigen::Vector2d(1.0, 1.001))));
}

TEST_CASE("smooth jets only for smooth bodies") {
    CHECK(is_smooth(make_ball(1)));
    CHECK_FALSE(is_smooth(make_box({1, 1})));
    CHECK_THROWS_AS(support_jet(make_box({1, 1}), Vec::Unit(2, 0)), UnsupportedError);
    const Jet j = support_jet(make_ball(3.0), Vec::Unit(3, 2));
    CHECK(j.value == 3.0);
    CHECK(j.grad.isZero());
}
