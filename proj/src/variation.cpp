#include "pbmkit/variation.hpp"

#include "pbmkit/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double frobenius(const SymMatrix& a, const SymMatrix& b) { return (a.array() * b.array()).sum(); }

void require_s(double s) {
    if (!(s >= -2.0 && s <= 2.0)) {
        throw DomainError("variation parameter s=" + std::to_string(s) + " outside [-2, 2]");
    }
}

void require_even(const TestFunction& psi, const SphericalGrid& grid) {
    if (!psi.is_even() && psi.odd_part_sup(grid) > 1e-10) {
        throw PreconditionError("test function is not even");
    }
}

}  // namespace

VariationPath::VariationPath(Body base, TestFunction psi, int k, std::shared_ptr<const SphericalGrid> grid,
                             bool validate)
    : base_(std::move(base)), psi_(std::move(psi)), k_(k), grid_(std::move(grid)) {
    if (!grid_) throw DomainError("variation path needs a grid");
    const int n = grid_->dimension();
    if (!is_smooth(base_)) {
        throw UnsupportedError("variation path needs a smooth base body, got " + std::string(body_kind(base_)));
    }
    if (const auto bn = body_dimension(base_); bn && *bn != n) {
        throw DomainError("base body dimension does not match the grid");
    }
    if (psi_.dimension() != n) throw DomainError("test function dimension does not match the grid");
    if (k_ < 1 || k_ > n) throw DomainError("order k=" + std::to_string(k_) + " outside [1, n]");

    base_jets_.reserve(grid_->size());
    psi_jets_.reserve(grid_->size());
    for (const Vec& x : grid_->nodes()) {
        base_jets_.push_back(support_jet(base_, x));
        psi_jets_.push_back(psi_.jet(x));
    }
    if (!validate) return;
    for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        for (std::size_t j = 0; j < grid_->size(); ++j) {
            const SymMatrix q = q_matrix_of_jet(h_s_jet(j, s), grid_->node(j), grid_->frame(j));
            if (!is_positive_definite(q)) {
                throw PathValidityError("Q[h_s] is not positive definite at s=" + std::to_string(s) +
                                            ", node " + std::to_string(j) + "; reduce the amplitude",
                                        s, j);
            }
        }
    }
}

Jet VariationPath::h_s_jet(std::size_t j, double s) const {
    if (s == 0.0) return base_jets_[j];
    return base_jets_[j] * exp(s * psi_jets_[j]);
}

FkDerivatives derivatives(const VariationPath& path, double s, int order) {
    require_s(s);
    if (order < 0 || order > 3) throw DomainError("derivative order must lie in 0..3");
    const int n = path.dimension();
    const int k = path.k();
    if (order == 3 && n > 5) {
        throw UnsupportedError("third derivative of f_k is limited to n <= 5");
    }
    const SphericalGrid& grid = path.grid();
    const std::size_t m = grid.size();
    std::vector<double> t0(m), t1(m), t2(m), t3(m);

    for (std::size_t j = 0; j < m; ++j) {
        const Vec& x = grid.node(j);
        const TangentFrame& frame = grid.frame(j);
        const Jet hs = path.h_s_jet(j, s);
        const SymMatrix q0 = q_matrix_of_jet(hs, x, frame);
        if (!is_positive_definite(q0)) {
            throw PathValidityError("Q[h_s] is not positive definite at s=" + std::to_string(s) + ", node " +
                                        std::to_string(j),
                                    s, j);
        }
        const double w = grid.weight(j);
        const double psi = path.psi_jet(j).value;
        const double h = hs.value;
        const double sk = elem_sym_all(q0)[static_cast<std::size_t>(k - 1)];
        t0[j] = w * h * sk;
        if (order >= 1) t1[j] = w * psi * h * sk;
        if (order >= 2) {
            const Jet g1 = path.psi_jet(j) * hs;
            const SymMatrix q1 = q_matrix_of_jet(g1, x, frame);
            const SymMatrix cof = k >= 2 ? cofactor(k - 1, q0) : SymMatrix::Zero(n - 1, n - 1);
            const double tq1 = frobenius(cof, q1);
            t2[j] = w * (psi * psi * h * sk + psi * h * tq1);
            if (order >= 3) {
                const Jet g2 = path.psi_jet(j) * g1;
                const SymMatrix q2 = q_matrix_of_jet(g2, x, frame);
                const double uqq = k >= 3 ? second_cofactor(k - 1, q0).contract(q1, q1) : 0.0;
                t3[j] = w * (psi * psi * psi * h * sk + 2.0 * psi * psi * h * tq1 + psi * h * uqq +
                             psi * h * frobenius(cof, q2));
            }
        }
    }
    FkDerivatives d;
    d.s = s;
    d.f = pairwise_sum(t0) / k;
    d.d1 = order >= 1 ? pairwise_sum(t1) : kNaN;
    d.d2 = order >= 2 ? pairwise_sum(t2) : kNaN;
    d.d3 = order >= 3 ? pairwise_sum(t3) : kNaN;
    for (double v : {d.f, d.d1, d.d2, d.d3}) {
        if (std::isinf(v)) throw EvaluationError("non-finite f_k derivative", 0);
    }
    return d;
}

double f_k(const VariationPath& path, double s) { return derivatives(path, s, 0).f; }
double f_k_prime(const VariationPath& path, double s) { return derivatives(path, s, 1).d1; }
double f_k_second(const VariationPath& path, double s) { return derivatives(path, s, 2).d2; }
double f_k_third(const VariationPath& path, double s) { return derivatives(path, s, 3).d3; }

double ball_f0(int n, int k) {
    if (k < 1 || k > n) throw DomainError("order k outside [1, n]");
    return sphere_area(n) / k * binomial(n - 1, k - 1);
}

double ball_f1(const TestFunction& psi, int k, const SphericalGrid& grid) {
    const int n = grid.dimension();
    if (k < 1 || k > n) throw DomainError("order k outside [1, n]");
    return binomial(n - 1, k - 1) * integrate(grid, [&psi](const Vec& x) { return psi.value(x); });
}

double ball_f2(const TestFunction& psi, int k, const SphericalGrid& grid) {
    const int n = grid.dimension();
    if (k < 2 || k > n) {
        throw DomainError("closed-form f_k'' at the ball needs 2 <= k <= n (k = 1 is linear)");
    }
    const double psi2 = integrate(grid, [&psi](const Vec& x) {
        const double v = psi.value(x);
        return v * v;
    });
    const double psi_lap = integrate(grid, [&psi](const Vec& x) { return psi.value(x) * psi.laplacian(x); });
    return binomial(n - 2, n - k) * (static_cast<double>(n - 1) * k / (k - 1) * psi2 + psi_lap);
}

std::string_view to_string(ConcavityVerdict v) {
    switch (v) {
        case ConcavityVerdict::StrictlyConcave: return "strictly-concave";
        case ConcavityVerdict::Concave: return "concave";
        case ConcavityVerdict::Violated: return "violated";
    }
    return "unknown";
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw DomainError("linspace needs at least one point");
    if (count == 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    v.back() = hi;
    return v;
}

ConcavityReport concavity_scan(const VariationPath& path, const std::vector<double>& s_values,
                               std::optional<double> tolerance) {
    if (s_values.empty()) throw DomainError("concavity scan needs at least one s value");
    ConcavityReport r;
    r.n = path.dimension();
    r.k = path.k();
    r.f0 = f_k(path, 0.0);
    r.tolerance = tolerance.value_or(1e-8 * r.f0 * r.f0);
    for (double s : s_values) {
        const FkDerivatives d = derivatives(path, s, 2);
        r.s.push_back(s);
        r.f.push_back(d.f);
        r.f1.push_back(d.d1);
        r.f2.push_back(d.d2);
        r.h.push_back(d.f * d.d2 - d.d1 * d.d1);
    }
    bool strict = true;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < r.h.size(); ++i) {
        if (!(r.h[i] < -r.tolerance)) strict = false;
        if (r.h[i] > r.h[worst]) worst = i;
    }
    if (strict) {
        r.verdict = ConcavityVerdict::StrictlyConcave;
    } else if (r.h[worst] <= r.tolerance) {
        r.verdict = ConcavityVerdict::Concave;
    } else {
        r.verdict = ConcavityVerdict::Violated;
        r.s_star = r.s[worst];
    }
    return r;
}

PoincareResult poincare_check(const TestFunction& psi, const SphericalGrid& grid) {
    if (psi.dimension() != grid.dimension()) throw DomainError("test function dimension does not match the grid");
    require_even(psi, grid);
    const double mean = integrate(grid, [&psi](const Vec& x) { return psi.value(x); });
    if (std::abs(mean) > 1e-8) {
        throw PreconditionError("test function has integral " + std::to_string(mean) +
                                "; center it before the Poincare check");
    }
    const int n = grid.dimension();
    PoincareResult r;
    r.lhs = integrate(grid, [&psi](const Vec& x) {
        const double v = psi.value(x);
        return v * v;
    });
    r.rhs = integrate(grid, [&psi](const Vec& x) { return psi.spherical_gradient(x).squaredNorm(); }) / (2.0 * n);
    if (r.lhs == 0.0 && r.rhs == 0.0) {
        r.ratio = 1.0;
        r.exact_equality = true;
    } else {
        r.ratio = r.lhs / r.rhs;
    }
    return r;
}

IbpResult ibp_check(const Body& h, const TestFunction& phi, const TestFunction& phi_bar,
                    const TestFunction& psi, int k, const SphericalGrid& grid) {
    const int n = grid.dimension();
    if (k < 1 || k > n - 1) throw DomainError("integration-by-parts check needs 1 <= k <= n-1");
    for (const TestFunction* f : {&phi, &phi_bar, &psi}) {
        if (f->dimension() != n) throw DomainError("test function dimension does not match the grid");
    }
    const std::size_t m = grid.size();
    std::vector<double> l1(m), r1(m), l2(m), r2(m);
    for (std::size_t j = 0; j < m; ++j) {
        const Vec& x = grid.node(j);
        const TangentFrame& frame = grid.frame(j);
        const SymMatrix qh = q_matrix(h, x, frame).values;
        const Jet jp = phi.jet(x);
        const Jet jb = phi_bar.jet(x);
        const Jet js = psi.jet(x);
        const SymMatrix qp = q_matrix_of_jet(jp, x, frame);
        const SymMatrix qb = q_matrix_of_jet(jb, x, frame);
        const SymMatrix qs = q_matrix_of_jet(js, x, frame);
        const SymMatrix cof = cofactor(k, qh);
        const Tensor4 second = second_cofactor(k, qh);
        const double w = grid.weight(j);
        l1[j] = w * jb.value * frobenius(cof, qp);
        r1[j] = w * jp.value * frobenius(cof, qb);
        l2[j] = w * js.value * second.contract(qp, qb);
        r2[j] = w * jb.value * second.contract(qp, qs);
    }
    IbpResult r;
    r.lhs1 = pairwise_sum(l1);
    r.rhs1 = pairwise_sum(r1);
    r.lhs2 = pairwise_sum(l2);
    r.rhs2 = pairwise_sum(r2);
    r.residual1 = std::abs(r.lhs1 - r.rhs1);
    r.residual2 = std::abs(r.lhs2 - r.rhs2);
    return r;
}

double christoffel_residual(const Body& body, double p, int k, const Vec& x, const TangentFrame& frame) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("Christoffel residual needs p in [0, 1)");
    const int n = static_cast<int>(x.size());
    if (k < 1 || k > n) throw DomainError("order k outside [1, n]");
    const double h = support(body, x);
    if (!(h > 0.0)) throw DomainError("support function must be positive for the Christoffel residual");
    return std::pow(h, 1.0 - p) * area_measure_density(body, k, x, frame) - binomial(n - 1, k - 1);
}

double christoffel_max_residual(const Body& body, double p, int k, const SphericalGrid& grid) {
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double r = christoffel_residual(body, p, k, grid.node(j), grid.frame(j));
        if (!std::isfinite(r)) throw EvaluationError("non-finite Christoffel residual", j);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

CenteredFunction center_test_function(const TestFunction& psi, const SphericalGrid& grid) {
    if (psi.dimension() != grid.dimension()) throw DomainError("test function dimension does not match the grid");
    const double total = pairwise_sum(grid.weights());
    const double mean = integrate(grid, [&psi](const Vec& x) { return psi.value(x); }) / total;
    return {psi.shifted(-mean), mean};
}

CenteringCheck centering_identity_check(const Body& base, const TestFunction& psi, int k,
                                        std::shared_ptr<const SphericalGrid> grid, double s) {
    const CenteredFunction c = center_test_function(psi, *grid);
    const VariationPath raw(base, psi, k, grid, false);
    const VariationPath centered(base, c.centered, k, grid, false);
    CenteringCheck out;
    out.s = s;
    out.mean = c.mean;
    out.f = f_k(raw, s);
    out.f_centered = f_k(centered, s);
    const double expected = std::exp(-k * s * c.mean) * out.f;
    out.relative_residual = std::abs(out.f_centered - expected) / std::abs(expected);
    return out;
}

}  // namespace pbm
