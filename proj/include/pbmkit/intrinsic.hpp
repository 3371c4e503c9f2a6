#pragma once

#include "pbmkit/bodies.hpp"
#include "pbmkit/jet.hpp"
#include "pbmkit/sphere.hpp"
#include "pbmkit/symmetric.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace pbm {

/// Volume of the unit ball in R^j (tabulated for j <= 16).
double kappa(int j);

struct QMatrix {
    SymMatrix values;  // (n-1) x (n-1), in the frame's basis
    bool positive_definite = false;
};

/// Q[g] = E^T (Hess g) E + (g - x . grad g) I for the jet of any ambient
/// extension g of a function on the sphere, with E the frame basis.
SymMatrix q_matrix_of_jet(const Jet& jet, const Vec& x, const TangentFrame& frame);

/// Q[h](x) of a smooth body (Ball, LogPerturbedBall). Throws
/// UnsupportedError for the other variants.
QMatrix q_matrix(const Body& body, const Vec& x, const TangentFrame& frame);

/// Q[h](x) = E^T Hess H(x) E by central differences of the 1-homogeneous
/// extension H(y) = |y| h(y/|y|), Richardson-extrapolated over the steps
/// 2e-3 and 1e-3. Works for any callable h on the sphere.
SymMatrix q_matrix_fd(const std::function<double(const Vec&)>& h, const Vec& x,
                      const TangentFrame& frame);

bool is_positive_definite(const SymMatrix& a);

enum class VkMethod { Quadrature, BoxFormula, BallClosedForm };
std::string_view to_string(VkMethod m);

struct IntrinsicVolumeResult {
    double value = 0.0;
    int k = 0;
    VkMethod method = VkMethod::Quadrature;
    double error_estimate = 0.0;
    /// Grid nodes where Q[h] was not positive definite (quadrature only).
    std::size_t non_positive_nodes = 0;
};

/// (1 / (k kappa_{n-k})) sum_j w_j h S_{k-1}(Q[h]) over the grid. The error
/// estimate is the difference to the same rule at half the resolution.
IntrinsicVolumeResult vk_quadrature(const Body& body, int k, const SphericalGrid& grid);

/// 2^k e_k(a_1..a_n).
IntrinsicVolumeResult vk_box(const std::vector<double>& half_lengths, int k);

/// binom(n,k) kappa_n R^k / kappa_{n-k}.
IntrinsicVolumeResult vk_ball(int n, int k, double radius = 1.0);

/// Box and EmbeddedCube through the box formula, smooth bodies through
/// quadrature on `grid`.
IntrinsicVolumeResult vk(const Body& body, int k, const SphericalGrid& grid);

/// S_{k-1}(Q[h](x)), 1 <= k <= n.
double area_measure_density(const Body& body, int k, const Vec& x, const TangentFrame& frame);

/// A functional F(K) = (1/deg) integral of h times a density of Q[h], of
/// degree deg in K.
class SupportFunctional {
public:
    virtual ~SupportFunctional() = default;
    virtual int degree() const = 0;
    virtual double density(const Body& body, const Vec& x, const TangentFrame& frame) const = 0;
    virtual double evaluate(const Body& body, const SphericalGrid& grid) const;
};

/// V_k(K) = F_k(K) / kappa_{n-k}, density S_{k-1}(Q[h]).
class IntrinsicVolumeFunctional final : public SupportFunctional {
public:
    explicit IntrinsicVolumeFunctional(int k);
    int degree() const override { return k_; }
    double density(const Body& body, const Vec& x, const TangentFrame& frame) const override;
    double evaluate(const Body& body, const SphericalGrid& grid) const override;

private:
    int k_;
};

}  // namespace pbm
