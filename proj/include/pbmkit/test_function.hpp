#pragma once

#include "pbmkit/jet.hpp"
#include "pbmkit/sphere.hpp"

#include <random>
#include <vector>

namespace pbm {

struct Monomial {
    double coef = 0.0;
    std::vector<int> exponents;  // one per coordinate

    int degree() const;
};

/// Polynomial restricted to S^{n-1}, used as a perturbation psi in
/// h_s = h e^{s psi}: value(x) = amplitude * (sum(terms) + offset).
/// Derivatives are those of the ambient polynomial; only their tangential
/// parts are meaningful on the sphere.
class TestFunction {
public:
    TestFunction(int dimension, std::vector<Monomial> terms, double amplitude = 1.0,
                 double offset = 0.0);

    /// psi == c
    static TestFunction constant(int n, double c);
    /// psi(x) = x_i^2 - shift  (i is 0-based)
    static TestFunction coordinate_square(int n, int i, double shift = 0.0);
    /// psi(x) = x^T M x
    static TestFunction quadratic_form(const Mat& m);
    /// Degree-4 even harmonic Re (x_1 + i x_2)^4 = x1^4 - 6 x1^2 x2^2 + x2^4.
    static TestFunction degree4_harmonic(int n);
    /// x^T M x + c with M symmetric, entries and c uniform in [-1, 1].
    static TestFunction random_even_quadratic(int n, std::mt19937_64& rng);

    int dimension() const noexcept { return dimension_; }
    double amplitude() const noexcept { return amplitude_; }
    double offset() const noexcept { return offset_; }
    const std::vector<Monomial>& terms() const noexcept { return terms_; }

    TestFunction with_amplitude(double a) const;
    /// psi + c, with the amplitude folded into the coefficients.
    TestFunction shifted(double c) const;

    /// Every monomial has even total degree (structural evenness).
    bool is_even() const;
    /// Evenness by sampling: max |psi(x) - psi(-x)| over the grid nodes.
    double odd_part_sup(const SphericalGrid& grid) const;

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Jet jet(const Vec& x) const;
    /// Tangential projection of the ambient gradient at a unit x.
    Vec spherical_gradient(const Vec& x) const;
    /// Laplace-Beltrami operator at a unit x.
    double laplacian(const Vec& x) const;

private:
    int dimension_;
    std::vector<Monomial> terms_;
    double amplitude_;
    double offset_;
};

}  // namespace pbm
