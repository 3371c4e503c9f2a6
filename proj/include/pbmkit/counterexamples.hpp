#pragma once

#include "pbmkit/bodies.hpp"
#include "pbmkit/sphere.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbm {

enum class ThresholdBranch { Low, Middle, High };
std::string_view to_string(ThresholdBranch b);

/// Low: 2k <= n. Middle: n < 2k and 3k <= 2n. High: 3k > 2n.
ThresholdBranch threshold_branch(int n, int k);

struct Threshold {
    double value = 0.0;
    ThresholdBranch branch = ThresholdBranch::Low;
};

/// p-bar_k for n >= 3, 2 <= k <= n-1.
Threshold threshold_pbar(int n, int k);

/// K_1 = cube on coordinates 1..k, K_0 = cube on coordinates n-k+1..n.
Body cube_k0(int n, int k);
Body cube_k1(int n, int k);

/// Box containing (1-t) K_0 +_p t K_1: half-length 1 on coordinates shared
/// by both cubes, t^{1/p} on those of K_1 only, (1-t)^{1/p} on those of K_0
/// only, 0 elsewhere. For t = 1/2 all non-unit sides are 2^{-1/p}.
Box enclosing_box(int n, int k, double p, double t = 0.5);

struct VkBound {
    double box_value = 0.0;                 // V_k of the enclosing box
    std::optional<double> displayed_bound;  // closed-form bound (t = 1/2 only)
    ThresholdBranch branch = ThresholdBranch::Low;
};

VkBound upper_bound_vk_kp(int n, int k, double p, double t = 0.5);

enum class Conclusion { InequalityFails, Inconclusive, Holds };
std::string_view to_string(Conclusion c);

struct Verdict {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    std::string method;
    Conclusion conclusion = Conclusion::Inconclusive;
    /// Same comparison on the V_k scale: upper bound on V_k(K_p) against
    /// the p-mean of V_k(K_0), V_k(K_1).
    double vk_lhs = 0.0;
    double vk_rhs = 0.0;
    double vk_margin = 0.0;
    /// Informational quantities.
    std::vector<std::pair<std::string, double>> details;
};

/// Failure certificate for the cube pair: inequality-fails iff the box
/// bound on V_k(K_p) is below 2^k by more than the 1e-12 guard band.
Verdict verify_counterexample(int n, int k, double p, double t = 0.5);

/// One sweep row per (n, k), 3 <= n <= n_max, at p = p-bar_k * factor.
struct SweepRow {
    int n = 0;
    int k = 0;
    Threshold pbar;
    double p = 0.0;
    Verdict verdict;
};
std::vector<SweepRow> counterexample_sweep(int n_min, int n_max, double factor);

/// V_1((1-t) K_0 +_p t K_1)^p <= (1-t) V_1(K_0)^p + t V_1(K_1)^p. The left
/// side is bounded by the gauge integral (1/kappa_{n-1}) int f_p >= V_1(K_p)
/// and all three integrals use the same grid, so the comparison is exact on
/// the grid. For p = 0 both sides are compared on the V_1 scale.
Verdict v1_reverse_check(const Body& k0, const Body& k1, double p, double t, const SphericalGrid& grid,
                         bool wulff_estimate = false);

}  // namespace pbm
