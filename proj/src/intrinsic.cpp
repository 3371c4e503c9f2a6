#include "pbmkit/intrinsic.hpp"

#include "pbmkit/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace pbm {

namespace {

constexpr int kKappaTable = 16;

const std::array<double, kKappaTable + 1>& kappa_table() {
    static const std::array<double, kKappaTable + 1> table = [] {
        std::array<double, kKappaTable + 1> t{};
        t[0] = 1.0;
        t[1] = 2.0;
        for (int j = 2; j <= kKappaTable; ++j) t[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(j - 2)] * 2.0 * std::numbers::pi / j;
        return t;
    }();
    return table;
}

void require_order_k(int k, int n) {
    if (k < 1 || k > n) {
        throw DomainError("intrinsic volume order k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
}

int grid_dimension_for(const Body& body, const SphericalGrid& grid) {
    const auto n = body_dimension(body);
    if (n && *n != grid.dimension()) {
        throw DomainError("body dimension " + std::to_string(*n) + " does not match grid dimension " +
                          std::to_string(grid.dimension()));
    }
    return grid.dimension();
}

struct QuadratureSum {
    double integral = 0.0;
    std::size_t non_positive = 0;
};

QuadratureSum vk_integral(const Body& body, int k, const SphericalGrid& grid) {
    std::vector<double> terms(grid.size());
    QuadratureSum out;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Vec& x = grid.node(j);
        const Jet jet = support_jet(body, x);
        const QMatrix q{q_matrix_of_jet(jet, x, grid.frame(j)), false};
        if (!is_positive_definite(q.values)) ++out.non_positive;
        const double v = grid.weight(j) * jet.value * elem_sym(k - 1, q.values);
        if (!std::isfinite(v)) throw EvaluationError("non-finite V_k integrand", j);
        terms[j] = v;
    }
    out.integral = pairwise_sum(terms);
    return out;
}

}  // namespace

double kappa(int j) {
    if (j < 0) throw DomainError("kappa: negative dimension");
    if (j <= kKappaTable) return kappa_table()[static_cast<std::size_t>(j)];
    return std::pow(std::numbers::pi, j / 2.0) / std::tgamma(j / 2.0 + 1.0);
}

bool is_positive_definite(const SymMatrix& a) {
    if (a.rows() == 0) return true;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    return llt.info() == Eigen::Success;
}

SymMatrix q_matrix_of_jet(const Jet& jet, const Vec& x, const TangentFrame& frame) {
    const Mat& e = frame.basis;
    SymMatrix q = e.transpose() * jet.hess * e;
    q.diagonal().array() += jet.value - x.dot(jet.grad);
    return 0.5 * (q + q.transpose());
}

QMatrix q_matrix(const Body& body, const Vec& x, const TangentFrame& frame) {
    if (!is_smooth(body)) {
        throw UnsupportedError("Q[h] needs a twice differentiable support function; " +
                               std::string(body_kind(body)) + " is not");
    }
    QMatrix q;
    q.values = q_matrix_of_jet(support_jet(body, x), x, frame);
    q.positive_definite = is_positive_definite(q.values);
    return q;
}

SymMatrix q_matrix_fd(const std::function<double(const Vec&)>& h, const Vec& x,
                      const TangentFrame& frame) {
    const auto big_h = [&h](const Vec& y) {
        const double r = y.norm();
        return r * h(y / r);
    };
    const Mat& e = frame.basis;
    const Eigen::Index m = e.cols();
    const auto second = [&](double a) {
        SymMatrix d(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i; j < m; ++j) {
                const Vec ei = a * e.col(i);
                const Vec ej = a * e.col(j);
                const double v = (big_h(x + ei + ej) - big_h(x + ei - ej) - big_h(x - ei + ej) +
                                  big_h(x - ei - ej)) /
                                 (4.0 * a * a);
                d(i, j) = v;
                d(j, i) = v;
            }
        }
        return d;
    };
    const SymMatrix coarse = second(2e-3);
    const SymMatrix fine = second(1e-3);
    return (4.0 * fine - coarse) / 3.0;
}

std::string_view to_string(VkMethod m) {
    switch (m) {
        case VkMethod::Quadrature: return "quadrature";
        case VkMethod::BoxFormula: return "box-formula";
        case VkMethod::BallClosedForm: return "ball-closed-form";
    }
    return "unknown";
}

IntrinsicVolumeResult vk_quadrature(const Body& body, int k, const SphericalGrid& grid) {
    const int n = grid_dimension_for(body, grid);
    require_order_k(k, n);
    if (!is_smooth(body)) {
        throw UnsupportedError("quadrature of V_k needs a smooth body; use the box formula for " +
                               std::string(body_kind(body)));
    }
    const double scale = 1.0 / (k * kappa(n - k));
    const QuadratureSum fine = vk_integral(body, k, grid);

    IntrinsicVolumeResult r;
    r.k = k;
    r.method = VkMethod::Quadrature;
    r.value = scale * fine.integral;
    r.non_positive_nodes = fine.non_positive;

    const int coarse_res = (grid.resolution() + 1) / 2;
    if (coarse_res >= 1 && coarse_res < grid.resolution()) {
        const SphericalGrid coarse = build_grid(n, coarse_res, grid.method(), grid.seed());
        r.error_estimate = std::abs(r.value - scale * vk_integral(body, k, coarse).integral);
    } else {
        r.error_estimate = std::abs(r.value);
    }
    return r;
}

IntrinsicVolumeResult vk_box(const std::vector<double>& half_lengths, int k) {
    const int n = static_cast<int>(half_lengths.size());
    require_order_k(k, n);
    // e_0..e_k of the half-lengths.
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (double a : half_lengths) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("box half-lengths must be >= 0");
        for (int r = k; r >= 1; --r) e[static_cast<std::size_t>(r)] += a * e[static_cast<std::size_t>(r - 1)];
    }
    IntrinsicVolumeResult res;
    res.k = k;
    res.method = VkMethod::BoxFormula;
    res.value = std::ldexp(e[static_cast<std::size_t>(k)], k);
    return res;
}

IntrinsicVolumeResult vk_ball(int n, int k, double radius) {
    if (n < 1) throw DomainError("vk_ball: n must be >= 1");
    require_order_k(k, n);
    if (!(radius > 0.0)) throw DomainError("vk_ball: radius must be positive");
    IntrinsicVolumeResult r;
    r.k = k;
    r.method = VkMethod::BallClosedForm;
    r.value = binomial(n, k) * kappa(n) * std::pow(radius, k) / kappa(n - k);
    return r;
}

IntrinsicVolumeResult vk(const Body& body, int k, const SphericalGrid& grid) {
    if (const auto* b = std::get_if<Box>(&body)) return vk_box(b->half_lengths, k);
    if (const auto* c = std::get_if<EmbeddedCube>(&body)) {
        std::vector<double> a(static_cast<std::size_t>(c->dimension), 0.0);
        for (int i : c->indices) a[static_cast<std::size_t>(i)] = 1.0;
        return vk_box(a, k);
    }
    return vk_quadrature(body, k, grid);
}

double area_measure_density(const Body& body, int k, const Vec& x, const TangentFrame& frame) {
    require_order_k(k, static_cast<int>(x.size()));
    return elem_sym(k - 1, q_matrix(body, x, frame).values);
}

double SupportFunctional::evaluate(const Body& body, const SphericalGrid& grid) const {
    grid_dimension_for(body, grid);
    const double integral = integrate_indexed(grid, [&](std::size_t j) {
        return support(body, grid.node(j)) * density(body, grid.node(j), grid.frame(j));
    });
    return integral / degree();
}

IntrinsicVolumeFunctional::IntrinsicVolumeFunctional(int k) : k_(k) {
    if (k < 1) throw DomainError("intrinsic volume order must be >= 1");
}

double IntrinsicVolumeFunctional::density(const Body& body, const Vec& x, const TangentFrame& frame) const {
    return area_measure_density(body, k_, x, frame);
}

double IntrinsicVolumeFunctional::evaluate(const Body& body, const SphericalGrid& grid) const {
    require_order_k(k_, grid.dimension());
    return SupportFunctional::evaluate(body, grid) / kappa(grid.dimension() - k_);
}

}  // namespace pbm
