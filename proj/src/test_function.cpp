#include "pbmkit/test_function.hpp"

#include "pbmkit/errors.hpp"

#include <cmath>

namespace pbm {

namespace {

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

Monomial make_monomial(int n, double coef, std::initializer_list<std::pair<int, int>> powers) {
    Monomial m{coef, std::vector<int>(static_cast<std::size_t>(n), 0)};
    for (auto [i, e] : powers) m.exponents[static_cast<std::size_t>(i)] += e;
    return m;
}

}  // namespace

int Monomial::degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

TestFunction::TestFunction(int dimension, std::vector<Monomial> terms, double amplitude,
                           double offset)
    : dimension_(dimension), terms_(std::move(terms)), amplitude_(amplitude), offset_(offset) {
    if (dimension_ < 2) throw DomainError("test function dimension must be at least 2");
    for (const auto& t : terms_) {
        if (static_cast<int>(t.exponents.size()) != dimension_) {
            throw ConfigurationError("monomial exponent vector has wrong length");
        }
        for (int e : t.exponents) {
            if (e < 0) throw ConfigurationError("negative monomial exponent");
        }
    }
    if (!std::isfinite(amplitude_) || !std::isfinite(offset_)) {
        throw ConfigurationError("test function amplitude and offset must be finite");
    }
}

TestFunction TestFunction::constant(int n, double c) {
    return TestFunction(n, {}, 1.0, c);
}

TestFunction TestFunction::coordinate_square(int n, int i, double shift) {
    if (i < 0 || i >= n) throw DomainError("coordinate index out of range");
    return TestFunction(n, {make_monomial(n, 1.0, {{i, 2}})}, 1.0, -shift);
}

TestFunction TestFunction::quadratic_form(const Mat& m) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != m.rows()) throw DomainError("quadratic form must be square");
    std::vector<Monomial> terms;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double c = (i == j) ? m(i, i) : m(i, j) + m(j, i);
            if (c != 0.0) terms.push_back(make_monomial(n, c, {{i, 1}, {j, 1}}));
        }
    }
    return TestFunction(n, std::move(terms));
}

TestFunction TestFunction::degree4_harmonic(int n) {
    if (n < 2) throw DomainError("degree-4 harmonic needs n >= 2");
    return TestFunction(n, {make_monomial(n, 1.0, {{0, 4}}), make_monomial(n, -6.0, {{0, 2}, {1, 2}}),
                            make_monomial(n, 1.0, {{1, 4}})});
}

TestFunction TestFunction::random_even_quadratic(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = unif(rng);
    }
    const double c = unif(rng);
    return quadratic_form(m).shifted(c);
}

TestFunction TestFunction::with_amplitude(double a) const {
    TestFunction t = *this;
    t.amplitude_ = a;
    return t;
}

TestFunction TestFunction::shifted(double c) const {
    std::vector<Monomial> terms = terms_;
    for (auto& t : terms) t.coef *= amplitude_;
    return TestFunction(dimension_, std::move(terms), 1.0, amplitude_ * offset_ + c);
}

bool TestFunction::is_even() const {
    for (const auto& t : terms_) {
        if (t.degree() % 2 != 0 && t.coef != 0.0) return false;
    }
    return true;
}

double TestFunction::odd_part_sup(const SphericalGrid& grid) const {
    double sup = 0.0;
    for (const Vec& x : grid.nodes()) sup = std::max(sup, std::abs(value(x) - value(-x)));
    return sup;
}

double TestFunction::value(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (int i = 0; i < dimension_; ++i) v *= ipow(x[i], t.exponents[static_cast<std::size_t>(i)]);
        s += v;
    }
    return amplitude_ * (s + offset_);
}

Vec TestFunction::gradient(const Vec& x) const {
    return jet(x).grad;
}

Jet TestFunction::jet(const Vec& x) const {
    const int n = dimension_;
    Jet j = Jet::constant(n, 0.0);
    std::vector<double> p(static_cast<std::size_t>(n)), d1(static_cast<std::size_t>(n)),
        d2(static_cast<std::size_t>(n));
    for (const auto& t : terms_) {
        for (int i = 0; i < n; ++i) {
            const int e = t.exponents[static_cast<std::size_t>(i)];
            const auto u = static_cast<std::size_t>(i);
            p[u] = ipow(x[i], e);
            d1[u] = e >= 1 ? e * ipow(x[i], e - 1) : 0.0;
            d2[u] = e >= 2 ? e * (e - 1) * ipow(x[i], e - 2) : 0.0;
        }
        // Products of the per-coordinate factors with one or two of them
        // replaced by derivatives.
        double full = t.coef;
        for (int i = 0; i < n; ++i) full *= p[static_cast<std::size_t>(i)];
        j.value += full;
        for (int a = 0; a < n; ++a) {
            double ga = t.coef;
            for (int i = 0; i < n; ++i) ga *= (i == a) ? d1[static_cast<std::size_t>(i)] : p[static_cast<std::size_t>(i)];
            j.grad[a] += ga;
            for (int b = a; b < n; ++b) {
                double hab = t.coef;
                for (int i = 0; i < n; ++i) {
                    const auto u = static_cast<std::size_t>(i);
                    if (a == b && i == a) hab *= d2[u];
                    else if (i == a || i == b) hab *= d1[u];
                    else hab *= p[u];
                }
                j.hess(a, b) += hab;
                if (a != b) j.hess(b, a) += hab;
            }
        }
    }
    j.value += offset_;
    return amplitude_ * j;
}

Vec TestFunction::spherical_gradient(const Vec& x) const {
    const Vec g = gradient(x);
    return g - g.dot(x) * x;
}

double TestFunction::laplacian(const Vec& x) const {
    const Jet j = jet(x);
    const double n = dimension_;
    return j.hess.trace() - x.dot(j.hess * x) - (n - 1.0) * x.dot(j.grad);
}

}  // namespace pbm
