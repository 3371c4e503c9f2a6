#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbmkit/errors.hpp"
#include "pbmkit/variation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

using namespace pbm;

namespace {

std::shared_ptr<const SphericalGrid> grid_ptr(int n, int res) {
    return std::make_shared<const SphericalGrid>(build_grid(n, res, GridMethod::ProductAngular));
}

TestFunction centered_square(int n, double eps) {
    return TestFunction::coordinate_square(n, 0, 1.0 / n).with_amplitude(eps);
}

// Richardson-extrapolated central difference with steps h and h/2.
template <class F>
double richardson(F&& f, double s, double h) {
    const double d1 = (f(s + h) - f(s - h)) / (2 * h);
    const double d2 = (f(s + h / 2) - f(s - h / 2)) / h;
    return (4 * d2 - d1) / 3;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("f_k at the unit ball") {
    for (int n = 3; n <= 5; ++n) {
        const auto g = grid_ptr(n, reference_resolution(n));
        for (int k = 1; k <= n; ++k) {
            const VariationPath path(make_ball(1), centered_square(n, 0.1), k, g);
            CHECK(rel(f_k(path, 0.0), ball_f0(n, k)) <= 1e-9);
            CHECK(ball_f0(n, k) == doctest::Approx(sphere_area(n) / k * binomial(n - 1, n - k)).epsilon(1e-14));
        }
    }
}

TEST_CASE("constant psi is log-linear") {
    const auto g = grid_ptr(4, 8);
    const TestFunction c = TestFunction::constant(4, 0.3);
    for (int k = 1; k <= 4; ++k) {
        const VariationPath path(make_ball(1), c, k, g);
        const double f0 = f_k(path, 0.0);
        for (double s : linspace(-2, 2, 9)) {
            CHECK(rel(f_k(path, s), f0 * std::exp(k * 0.3 * s)) <= 1e-12);
            CHECK(std::abs(std::log(f_k(path, s)) - std::log(f0) - k * 0.3 * s) <= 1e-8);
        }
        const ConcavityReport r = concavity_scan(path, linspace(-2, 2, 21));
        CHECK(r.verdict == ConcavityVerdict::Concave);
        for (double h : r.h) CHECK(std::abs(h) <= r.tolerance);
    }
}

TEST_CASE("f_k converges under refinement") {
    const TestFunction psi = centered_square(3, 0.1);
    const VariationPath coarse(make_ball(1), psi, 2, grid_ptr(3, 32));
    const VariationPath fine(make_ball(1), psi, 2, grid_ptr(3, 64));
    CHECK(std::abs(f_k(coarse, 1.0) - f_k(fine, 1.0)) <= 1e-6);
}

TEST_CASE("closed forms at the ball") {
    std::mt19937_64 rng(11);
    for (int n : {3, 4}) {
        const auto g = grid_ptr(n, reference_resolution(n));
        for (int trial = 0; trial < 5; ++trial) {
            const TestFunction psi = TestFunction::random_even_quadratic(n, rng).with_amplitude(0.05);
            for (int k = 2; k <= n; ++k) {
                const VariationPath path(make_ball(1), psi, k, g);
                const FkDerivatives d = derivatives(path, 0.0, 2);
                CHECK(std::abs(d.d1 - ball_f1(psi, k, *g)) <= 1e-6 * std::max(1.0, std::abs(d.d1)));
                CHECK(std::abs(d.d2 - ball_f2(psi, k, *g)) <= 1e-6 * std::max(1.0, std::abs(d.d2)));
            }
        }
    }
    const auto g = grid_ptr(3, 8);
    CHECK_THROWS_AS(ball_f2(centered_square(3, 0.1), 1, *g), DomainError);
}

TEST_CASE("derivatives agree with finite differences") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> us(-1.5, 1.5);
    for (int n : {3, 4}) {
        const auto g = grid_ptr(n, reference_resolution(n));
        const TestFunction psi = TestFunction::random_even_quadratic(n, rng).with_amplitude(0.05);
        const Body base = make_log_perturbed_ball(TestFunction::degree4_harmonic(n), 0.02);
        for (int k = 1; k <= n; ++k) {
            const VariationPath path(base, psi, k, g);
            for (int trial = 0; trial < 5; ++trial) {
                const double s = us(rng);
                const FkDerivatives d = derivatives(path, s, 3);
                CHECK(d.f == doctest::Approx(f_k(path, s)).epsilon(1e-14));
                const double fd1 = richardson([&](double x) { return f_k(path, x); }, s, 1e-3);
                const double fd2 = richardson([&](double x) { return f_k_prime(path, x); }, s, 1e-3);
                const double fd3 = richardson([&](double x) { return f_k_second(path, x); }, s, 1e-3);
                const double scale1 = std::max(std::abs(d.d1), 1e-3 * d.f);
                const double scale2 = std::max(std::abs(d.d2), 1e-3 * d.f);
                const double scale3 = std::max(std::abs(d.d3), 1e-3 * d.f);
                CHECK(std::abs(d.d1 - fd1) <= 1e-4 * scale1);
                CHECK(std::abs(d.d2 - fd2) <= 1e-4 * scale2);
                CHECK(std::abs(d.d3 - fd3) <= 1e-3 * scale3);
            }
        }
    }
}

TEST_CASE("third derivative has a dimension limit") {
    const auto g = grid_ptr(6, 3);
    const VariationPath path(make_ball(1), centered_square(6, 0.1), 3, g);
    CHECK_NOTHROW(f_k_second(path, 0.0));
    CHECK_THROWS_AS(f_k_third(path, 0.0), UnsupportedError);
}

TEST_CASE("argument checks") {
    const auto g = grid_ptr(3, 8);
    const VariationPath path(make_ball(1), centered_square(3, 0.1), 2, g);
    CHECK_THROWS_AS(f_k(path, 2.5), DomainError);
    CHECK_THROWS_AS(derivatives(path, 0.0, 4), DomainError);
    CHECK_THROWS_AS(VariationPath(make_ball(1), centered_square(3, 0.1), 0, g), DomainError);
    CHECK_THROWS_AS(VariationPath(make_ball(1), centered_square(3, 0.1), 4, g), DomainError);
    CHECK_THROWS_AS(VariationPath(make_box({1, 1, 1}), centered_square(3, 0.1), 2, g), UnsupportedError);
}

TEST_CASE("large perturbations are rejected") {
    const auto g = grid_ptr(3, 16);
    try {
        VariationPath(make_ball(1), TestFunction::coordinate_square(3, 0).with_amplitude(3.0), 2, g);
        FAIL("expected a path validity error");
    } catch (const PathValidityError& e) {
        CHECK(std::abs(e.s()) >= 1.0);
        CHECK(e.node() < g->size());
    }
}

TEST_CASE("concavity scans") {
    for (int n = 3; n <= 5; ++n) {
        const auto g = grid_ptr(n, reference_resolution(n));
        for (int k = 2; k <= n; ++k) {
            const VariationPath path(make_ball(1), centered_square(n, 0.01), k, g);
            const ConcavityReport r = concavity_scan(path, linspace(-2, 2, 21));
            CHECK(r.verdict == ConcavityVerdict::StrictlyConcave);
            CHECK(r.tolerance == doctest::Approx(1e-8 * r.f0 * r.f0));
            REQUIRE(r.h.size() == 21);
            for (double h : r.h) CHECK(h < -r.tolerance);
            CHECK_FALSE(r.s_star.has_value());
        }
    }
    SUBCASE("a violated scan reports the worst s") {
        const auto g = grid_ptr(3, 16);
        // Log-convex direction: psi = x1^2 with k = 1 is linear in h_s, so
        // f_1 is a positive combination of exponentials.
        const VariationPath path(make_ball(1), TestFunction::coordinate_square(3, 0).with_amplitude(0.2), 1, g);
        const ConcavityReport r = concavity_scan(path, linspace(-2, 2, 11));
        CHECK(r.verdict == ConcavityVerdict::Violated);
        REQUIRE(r.s_star.has_value());
        const auto it = std::max_element(r.h.begin(), r.h.end());
        CHECK(*r.s_star == r.s[static_cast<std::size_t>(it - r.h.begin())]);
    }
}

TEST_CASE("second variation is negative at the ball") {
    for (int n = 3; n <= 5; ++n) {
        const auto g = grid_ptr(n, reference_resolution(n));
        const TestFunction psi = TestFunction::quadratic_form([&] {
                Mat a = Mat::Zero(n, n);
                a(0, 1) = a(1, 0) = 1.0;
                return a;
            }()).with_amplitude(0.02);
        for (int k = 2; k <= n; ++k) {
            const VariationPath path(make_ball(1), psi, k, g);
            const FkDerivatives d = derivatives(path, 0.0, 2);
            CHECK(d.f * d.d2 - d.d1 * d.d1 < 0.0);
        }
    }
}

TEST_CASE("estimate scaling in the amplitude") {
    const int n = 3;
    const auto g = grid_ptr(n, 24);
    std::mt19937_64 rng(13);
    const TestFunction psi0 = TestFunction::random_even_quadratic(n, rng);
    for (int k : {2, 3}) {
        std::vector<double> le, l1, l2;
        for (double eps : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
            const VariationPath path(make_ball(1), psi0.with_amplitude(eps), k, g);
            const FkDerivatives d = derivatives(path, 0.5, 2);
            le.push_back(std::log(eps));
            l1.push_back(std::log(std::abs(d.d1)));
            l2.push_back(std::log(std::abs(d.d2)));
        }
        auto slope = [&](const std::vector<double>& y) {
            const double n_pts = static_cast<double>(le.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < le.size(); ++i) {
                sx += le[i];
                sy += y[i];
                sxx += le[i] * le[i];
                sxy += le[i] * y[i];
            }
            return (n_pts * sxy - sx * sy) / (n_pts * sxx - sx * sx);
        };
        CHECK(std::abs(slope(l1) - 1.0) <= 0.1);
        CHECK(std::abs(slope(l2) - 2.0) <= 0.1);
    }
}

TEST_CASE("Poincare inequality") {
    for (int n = 3; n <= 5; ++n) {
        const auto g = build_grid(n, reference_resolution(n), GridMethod::ProductAngular);
        const PoincareResult r = poincare_check(centered_square(n, 1.0), g);
        CHECK(std::abs(r.ratio - 1.0) <= 1e-4);
        CHECK(r.lhs == doctest::Approx(r.rhs * r.ratio));
        const PoincareResult h4 = poincare_check(TestFunction::degree4_harmonic(n), g);
        CHECK(h4.ratio < 1.0);
        CHECK(h4.ratio == doctest::Approx(2.0 * n / (4.0 * (n + 2))).epsilon(1e-6));
        const PoincareResult z = poincare_check(TestFunction::constant(n, 0.0), g);
        CHECK(z.exact_equality);
        CHECK(z.lhs == 0.0);
        CHECK(z.rhs == 0.0);
        CHECK(z.ratio == 1.0);
    }
    const auto g = build_grid(3, 16, GridMethod::ProductAngular);
    CHECK_THROWS_AS(poincare_check(TestFunction::coordinate_square(3, 0), g), PreconditionError);
}

TEST_CASE("integration by parts identities") {
    std::mt19937_64 rng(14);
    for (int n : {3, 4}) {
        const auto g = build_grid(n, reference_resolution(n), GridMethod::ProductAngular);
        for (int trial = 0; trial < 3; ++trial) {
            const TestFunction phi = TestFunction::random_even_quadratic(n, rng);
            const TestFunction phib = TestFunction::random_even_quadratic(n, rng);
            const TestFunction psi = TestFunction::random_even_quadratic(n, rng);
            const Body h = trial == 0 ? make_ball(1)
                                      : make_log_perturbed_ball(TestFunction::random_even_quadratic(n, rng), 0.1);
            for (int k = 1; k < n; ++k) {
                const IbpResult r = ibp_check(h, phi, phib, psi, k, g);
                CHECK(r.residual1 <= 1e-5);
                CHECK(r.residual2 <= 1e-5);
                const IbpResult same = ibp_check(h, phi, phi, psi, k, g);
                CHECK(same.residual1 == 0.0);
            }
        }
        const IbpResult lin = ibp_check(make_ball(1), TestFunction::random_even_quadratic(n, rng),
                                        TestFunction::random_even_quadratic(n, rng), TestFunction::constant(n, 1.0), 1, g);
        CHECK(lin.residual2 <= 1e-10);
        CHECK_THROWS_AS(ibp_check(make_ball(1), centered_square(n, 1), centered_square(n, 1), centered_square(n, 1), n, g),
                        DomainError);
    }
}

TEST_CASE("Christoffel-Minkowski residual") {
    const auto g = build_grid(4, 8, GridMethod::ProductAngular);
    for (int k = 1; k <= 4; ++k) {
        for (double p : {0.0, 0.3, 0.9}) {
            CHECK(christoffel_max_residual(make_ball(1), p, k, g) <= 1e-8);
            const double r = 1.1;
            const double expect = (std::pow(r, k - p) - 1) * binomial(3, k - 1);
            CHECK(christoffel_residual(make_ball(r), p, k, g.node(5), g.frame(5)) ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
    const Body lp = make_log_perturbed_ball(centered_square(4, 1.0), 0.01);
    CHECK(christoffel_max_residual(lp, 0.5, 2, g) > 1e-4);
    CHECK_THROWS_AS(christoffel_max_residual(make_ball(1), 1.0, 2, g), DomainError);
}

TEST_CASE("centering") {
    const auto g3 = std::make_shared<const SphericalGrid>(build_grid(3, 32, GridMethod::ProductAngular));
    const CenteredFunction c = center_test_function(TestFunction::constant(3, 2.5), *g3);
    CHECK(c.mean == doctest::Approx(2.5).epsilon(1e-13));
    for (std::size_t j = 0; j < g3->size(); j += 7) CHECK(std::abs(c.centered.value(g3->node(j))) <= 1e-12);
    const CenteredFunction sq = center_test_function(TestFunction::coordinate_square(3, 0), *g3);
    CHECK(sq.mean == doctest::Approx(1.0 / 3).epsilon(1e-12));
    for (std::size_t j = 0; j < g3->size(); j += 7) {
        const Vec& x = g3->node(j);
        CHECK(std::abs(sq.centered.value(x) - (x[0] * x[0] - 1.0 / 3)) <= 1e-12);
    }
    std::mt19937_64 rng(15);
    for (int n : {3, 4}) {
        const auto g = grid_ptr(n, reference_resolution(n));
        const TestFunction psi = TestFunction::random_even_quadratic(n, rng).with_amplitude(0.1).shifted(0.1);
        for (int k = 1; k <= n; ++k) {
            const CenteringCheck r = centering_identity_check(make_ball(1), psi, k, g, 1.0);
            CHECK(r.relative_residual <= 1e-12);
            CHECK(r.mean != 0.0);
        }
    }
}
