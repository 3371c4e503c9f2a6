#include "pbmkit/counterexamples.hpp"

#include "pbmkit/errors.hpp"
#include "pbmkit/intrinsic.hpp"
#include "pbmkit/symmetric.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pbm {

namespace {

constexpr double kGuard = 1e-12;

void require_nk(int n, int k) {
    if (n < 3) throw DomainError("counterexample construction needs n >= 3");
    if (k < 2 || k > n - 1) {
        throw DomainError("counterexample construction needs 2 <= k <= n-1, got k=" + std::to_string(k));
    }
}

void require_p_open(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
}

void require_t(double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0, 1)");
}

double v1_exact(const Body& body, int n) {
    if (const auto* b = std::get_if<Ball>(&body)) return vk_ball(n, 1, b->radius).value;
    if (const auto* b = std::get_if<Box>(&body)) return vk_box(b->half_lengths, 1).value;
    if (const auto* c = std::get_if<EmbeddedCube>(&body)) return 2.0 * static_cast<double>(c->indices.size());
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string_view to_string(ThresholdBranch b) {
    switch (b) {
        case ThresholdBranch::Low: return "low";
        case ThresholdBranch::Middle: return "middle";
        case ThresholdBranch::High: return "high";
    }
    return "unknown";
}

std::string_view to_string(Conclusion c) {
    switch (c) {
        case Conclusion::InequalityFails: return "inequality-fails";
        case Conclusion::Inconclusive: return "inconclusive";
        case Conclusion::Holds: return "holds";
    }
    return "unknown";
}

ThresholdBranch threshold_branch(int n, int k) {
    require_nk(n, k);
    if (2 * k <= n) return ThresholdBranch::Low;
    if (3 * k <= 2 * n) return ThresholdBranch::Middle;
    return ThresholdBranch::High;
}

Threshold threshold_pbar(int n, int k) {
    Threshold t;
    t.branch = threshold_branch(n, k);
    switch (t.branch) {
        case ThresholdBranch::Low:
            t.value = k / std::log2(binomial(2 * k, k));
            break;
        case ThresholdBranch::Middle: {
            double c = 0.0;
            for (int i = 1; i <= k; ++i) c += binomial(2 * (n - k), i);
            t.value = 1.0 / std::log2(c);
            break;
        }
        case ThresholdBranch::High:
            t.value = 1.0 / std::log2(std::ldexp(1.0, 2 * (n - k)) - 1.0);
            break;
    }
    return t;
}

Body cube_k0(int n, int k) {
    require_nk(n, k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), n - k + 1);
    return make_embedded_cube(n, idx);
}

Body cube_k1(int n, int k) {
    require_nk(n, k);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 1);
    return make_embedded_cube(n, idx);
}

Box enclosing_box(int n, int k, double p, double t) {
    require_nk(n, k);
    require_p_open(p);
    require_t(t);
    Box box{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    const double only_k1 = std::pow(t, 1.0 / p);
    const double only_k0 = std::pow(1.0 - t, 1.0 / p);
    for (int i = 1; i <= n; ++i) {
        const bool in_k1 = i <= k;
        const bool in_k0 = i >= n - k + 1;
        double a = 0.0;
        if (in_k0 && in_k1) {
            a = 1.0;
        } else if (in_k1) {
            a = only_k1;
        } else if (in_k0) {
            a = only_k0;
        }
        box.half_lengths[static_cast<std::size_t>(i - 1)] = a;
    }
    return box;
}

VkBound upper_bound_vk_kp(int n, int k, double p, double t) {
    const Box box = enclosing_box(n, k, p, t);
    VkBound b;
    b.branch = threshold_branch(n, k);
    b.box_value = vk_box(box.half_lengths, k).value;
    if (t == 0.5) {
        switch (b.branch) {
            case ThresholdBranch::Low:
                b.displayed_bound = binomial(2 * k, k) * std::exp2(k - k / p);
                break;
            case ThresholdBranch::Middle: {
                double c = 0.0;
                for (int i = 1; i <= k; ++i) c += binomial(2 * (n - k), i);
                b.displayed_bound = c * std::exp2(k - 1.0 / p);
                break;
            }
            case ThresholdBranch::High:
                b.displayed_bound = std::exp2(k - 1.0 / p) * (std::ldexp(1.0, 2 * n - 2 * k) - 1.0);
                break;
        }
    }
    return b;
}

Verdict verify_counterexample(int n, int k, double p, double t) {
    const VkBound bound = upper_bound_vk_kp(n, k, p, t);
    const Threshold pbar = threshold_pbar(n, k);
    const double vk_cube = std::ldexp(1.0, k);

    Verdict v;
    v.method = "analytic-bound";
    v.tolerance = kGuard;
    v.vk_lhs = bound.box_value;
    v.vk_rhs = vk_cube;
    v.vk_margin = vk_cube - bound.box_value;
    v.lhs = std::pow(bound.box_value, p / k);
    v.rhs = (1.0 - t) * std::pow(vk_cube, p / k) + t * std::pow(vk_cube, p / k);
    v.margin = v.rhs - v.lhs;
    v.conclusion = bound.box_value < vk_cube * (1.0 - kGuard) ? Conclusion::InequalityFails
                                                               : Conclusion::Inconclusive;
    v.details.emplace_back("pbar", pbar.value);
    v.details.emplace_back("box_bound", bound.box_value);
    if (bound.displayed_bound) v.details.emplace_back("displayed_bound", *bound.displayed_bound);
    v.details.emplace_back("below_threshold", p < pbar.value ? 1.0 : 0.0);
    return v;
}

std::vector<SweepRow> counterexample_sweep(int n_min, int n_max, double factor) {
    if (n_min < 3 || n_max < n_min) throw DomainError("sweep needs 3 <= n_min <= n_max");
    if (!(factor > 0.0)) throw DomainError("sweep factor must be positive");
    std::vector<SweepRow> rows;
    for (int n = n_min; n <= n_max; ++n) {
        for (int k = 2; k <= n - 1; ++k) {
            SweepRow row;
            row.n = n;
            row.k = k;
            row.pbar = threshold_pbar(n, k);
            row.p = row.pbar.value * factor;
            if (!(row.p < 1.0)) throw DomainError("sweep factor pushes p outside (0, 1)");
            row.verdict = verify_counterexample(n, k, row.p);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

Verdict v1_reverse_check(const Body& k0, const Body& k1, double p, double t, const SphericalGrid& grid,
                         bool wulff_estimate) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("reverse V_1 check needs p in [0, 1)");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t must lie in [0, 1]");
    const int n = grid.dimension();
    for (const Body* b : {&k0, &k1}) {
        if (const auto bn = body_dimension(*b); bn && *bn != n) {
            throw DomainError("body dimension does not match the grid");
        }
    }
    const double kap = kappa(n - 1);
    const PMeanSpec spec{p, t, k0, k1};
    const std::vector<double> gauge = pmean_gauge(grid, spec);
    std::vector<double> w0(grid.size()), w1(grid.size()), wp(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        w0[j] = grid.weight(j) * support(k0, grid.node(j));
        w1[j] = grid.weight(j) * support(k1, grid.node(j));
        wp[j] = grid.weight(j) * gauge[j];
    }
    const double v0 = pairwise_sum(w0) / kap;
    const double v1 = pairwise_sum(w1) / kap;
    const double vp = pairwise_sum(wp) / kap;

    Verdict v;
    v.method = "gauge-integral";
    v.tolerance = 1e-9 * std::max(1.0, std::max(v0, v1));
    v.vk_lhs = vp;
    v.vk_rhs = pmean_value(p, t, v0, v1);
    v.vk_margin = v.vk_rhs - v.vk_lhs;
    if (p == 0.0) {
        v.lhs = v.vk_lhs;
        v.rhs = v.vk_rhs;
    } else {
        v.lhs = std::pow(vp, p);
        v.rhs = (1.0 - t) * std::pow(v0, p) + t * std::pow(v1, p);
    }
    v.margin = v.rhs - v.lhs;
    v.conclusion = v.margin >= -v.tolerance ? Conclusion::Holds : Conclusion::Inconclusive;

    v.details.emplace_back("v1_k0", v0);
    v.details.emplace_back("v1_k1", v1);
    v.details.emplace_back("v1_k0_exact", v1_exact(k0, n));
    v.details.emplace_back("v1_k1_exact", v1_exact(k1, n));
    v.details.emplace_back("arithmetic_bound", (1.0 - t) * v0 + t * v1);
    if (wulff_estimate) {
        std::vector<double> wu(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            wu[j] = grid.weight(j) * wulff_support_upper(grid, gauge, grid.node(j));
        }
        v.details.emplace_back("wulff_outer_v1", pairwise_sum(wu) / kap);
    }
    return v;
}

}  // namespace pbm
