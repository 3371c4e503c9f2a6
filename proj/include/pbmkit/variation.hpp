#pragma once

#include "pbmkit/bodies.hpp"
#include "pbmkit/intrinsic.hpp"
#include "pbmkit/sphere.hpp"
#include "pbmkit/test_function.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace pbm {

/// The family h_s = h e^{s psi} together with the order k and the grid used
/// for every integral. Construction checks that Q[h_s] is positive definite
/// at every node for s in {-2, -1, 0, 1, 2} (PathValidityError otherwise).
class VariationPath {
public:
    VariationPath(Body base, TestFunction psi, int k, std::shared_ptr<const SphericalGrid> grid,
                  bool validate = true);

    const Body& base() const noexcept { return base_; }
    const TestFunction& psi() const noexcept { return psi_; }
    int k() const noexcept { return k_; }
    int dimension() const noexcept { return grid_->dimension(); }
    const SphericalGrid& grid() const noexcept { return *grid_; }
    std::shared_ptr<const SphericalGrid> grid_ptr() const noexcept { return grid_; }

    /// Jet of h_s at node j.
    Jet h_s_jet(std::size_t j, double s) const;
    const Jet& psi_jet(std::size_t j) const { return psi_jets_[j]; }

private:
    Body base_;
    TestFunction psi_;
    int k_;
    std::shared_ptr<const SphericalGrid> grid_;
    std::vector<Jet> base_jets_;
    std::vector<Jet> psi_jets_;
};

/// f_k(s) and its derivatives up to the requested order; unrequested entries
/// are NaN.
struct FkDerivatives {
    double s = 0.0;
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

/// order in 0..3. s must lie in [-2, 2]; order 3 requires n <= 5.
FkDerivatives derivatives(const VariationPath& path, double s, int order);

double f_k(const VariationPath& path, double s);
double f_k_prime(const VariationPath& path, double s);
double f_k_second(const VariationPath& path, double s);
double f_k_third(const VariationPath& path, double s);

/// Closed forms at the unit ball (h == 1, s = 0).
double ball_f0(int n, int k);
double ball_f1(const TestFunction& psi, int k, const SphericalGrid& grid);
/// Requires k >= 2.
double ball_f2(const TestFunction& psi, int k, const SphericalGrid& grid);

enum class ConcavityVerdict { StrictlyConcave, Concave, Violated };
std::string_view to_string(ConcavityVerdict v);

struct ConcavityReport {
    int n = 0;
    int k = 0;
    std::vector<double> s;
    std::vector<double> f;
    std::vector<double> f1;
    std::vector<double> f2;
    std::vector<double> h;  // f f'' - f'^2
    double f0 = 0.0;
    double tolerance = 0.0;
    ConcavityVerdict verdict = ConcavityVerdict::Concave;
    std::optional<double> s_star;  // argmax H when violated
};

/// `count` equally spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int count);

/// H(s) on the s-grid. Default tolerance 1e-8 f_k(0)^2.
ConcavityReport concavity_scan(const VariationPath& path, const std::vector<double>& s_values,
                               std::optional<double> tolerance = std::nullopt);

struct PoincareResult {
    double lhs = 0.0;    // integral of psi^2
    double rhs = 0.0;    // (1/2n) integral of |grad psi|^2
    double ratio = 0.0;  // lhs / rhs
    bool exact_equality = false;
};

/// Requires psi even and with zero mean on the grid (within 1e-8).
PoincareResult poincare_check(const TestFunction& psi, const SphericalGrid& grid);

struct IbpResult {
    double residual1 = 0.0;
    double residual2 = 0.0;
    double lhs1 = 0.0;
    double rhs1 = 0.0;
    double lhs2 = 0.0;
    double rhs2 = 0.0;
};

/// Symmetry residuals of the two integration-by-parts identities for the
/// cofactor S_k^{ij}(Q[h]) and second cofactor S_k^{ij,rs}(Q[h]),
/// 1 <= k <= n-1.
IbpResult ibp_check(const Body& h, const TestFunction& phi, const TestFunction& phi_bar,
                    const TestFunction& psi, int k, const SphericalGrid& grid);

/// h(x)^{1-p} S_{k-1}(Q[h](x)) - binom(n-1, k-1).
double christoffel_residual(const Body& body, double p, int k, const Vec& x, const TangentFrame& frame);

/// max over grid nodes of |christoffel_residual|.
double christoffel_max_residual(const Body& body, double p, int k, const SphericalGrid& grid);

struct CenteredFunction {
    TestFunction centered;
    double mean = 0.0;
};

/// m = (integral of psi) / (sum of weights), psi_bar = psi - m.
CenteredFunction center_test_function(const TestFunction& psi, const SphericalGrid& grid);

struct CenteringCheck {
    double s = 0.0;
    double mean = 0.0;
    double f = 0.0;          // f_k(s) along psi
    double f_centered = 0.0; // f_k(s) along psi_bar
    double relative_residual = 0.0;
};

/// Compares f_k(s) along psi_bar with e^{-k s m} f_k(s) along psi.
CenteringCheck centering_identity_check(const Body& base, const TestFunction& psi, int k,
                                        std::shared_ptr<const SphericalGrid> grid, double s);

}  // namespace pbm
