#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pbm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class GridMethod { ProductAngular, MonteCarlo, IcosphereN3, Lattice };

std::string_view to_string(GridMethod m);
GridMethod grid_method_from_string(std::string_view s);

/// Orthonormal basis e_1..e_{n-1} of the tangent space at a point of S^{n-1}.
/// `basis` stores the tangent vectors as columns (n x (n-1)).
struct TangentFrame {
    Vec base;
    Mat basis;
};

/// Frame at x built by Gram-Schmidt on the coordinate axes, skipping the axis
/// most aligned with x. Throws DomainError when |x| is not 1 within 1e-10.
TangentFrame tangent_frame(const Vec& x);

/// Surface area |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Quadrature nodes and positive weights on S^{n-1}, with a cached tangent
/// frame per node. Node sets are closed under x -> -x. Immutable.
class SphericalGrid {
public:
    SphericalGrid(int dimension, GridMethod method, int resolution, std::uint64_t seed,
                  std::vector<Vec> nodes, std::vector<double> weights);

    int dimension() const noexcept { return dimension_; }
    GridMethod method() const noexcept { return method_; }
    int resolution() const noexcept { return resolution_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    const Vec& node(std::size_t j) const { return nodes_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }
    const TangentFrame& frame(std::size_t j) const { return frames_[j]; }
    const std::vector<Vec>& nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Index of the node -x, or npos when the grid is not symmetric at j.
    std::size_t antipode(std::size_t j) const { return antipodes_[j]; }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Index of the node within `tol` of x, or npos.
    std::size_t find_node(const Vec& x, double tol = 1e-12) const;

    /// FNV-1a hash of the node and weight bytes, as 16 hex digits.
    std::string fingerprint() const;

    /// Tolerance on |sum of weights - |S^{n-1}|| promised by the method.
    double weight_sum_tolerance() const;

private:
    int dimension_;
    GridMethod method_;
    int resolution_;
    std::uint64_t seed_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
    std::vector<TangentFrame> frames_;
    std::vector<std::size_t> antipodes_;
};

/// Build a grid. Resolution semantics per method:
///  - ProductAngular: 2*ceil(r/2) azimuthal points and ceil(r/2) Gauss-Gegenbauer
///    points per polar angle (n <= 6);
///  - MonteCarlo: r antipodal pairs drawn from `seed`;
///  - IcosphereN3: face centroids of an icosahedron subdivided r-1 times (n = 3);
///  - Lattice: primitive integer directions in [-r, r]^n, uniform weights.
SphericalGrid build_grid(int n, int resolution, GridMethod method, std::uint64_t seed = 0);

/// Product-angular for n <= 6, Monte Carlo above.
SphericalGrid default_grid(int n, int resolution, std::uint64_t seed = 0);

/// Resolution used by the acceptance checks for dimension n.
int reference_resolution(int n);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> values);

/// sum_j w_j f(node_j). Throws EvaluationError on a non-finite value.
double integrate(const SphericalGrid& grid, const std::function<double(const Vec&)>& f);

/// Same as integrate, but f receives the node index (to reach the frame).
double integrate_indexed(const SphericalGrid& grid,
                         const std::function<double(std::size_t)>& f);

}  // namespace pbm
