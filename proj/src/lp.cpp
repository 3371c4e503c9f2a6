#include "pbmkit/lp.hpp"

#include "pbmkit/errors.hpp"

#include <cmath>
#include <limits>

namespace pbm {

namespace {

class DualSimplex {
public:
    DualSimplex(const std::vector<Eigen::VectorXd>& normals, std::span<const double> offsets,
                const Eigen::VectorXd& u, double tol)
        : normals_(normals), offsets_(offsets), tol_(tol), n_(u.size()), sign_(u.size()), b_(u.size()) {
        for (Eigen::Index i = 0; i < n_; ++i) {
            sign_[i] = u[i] < 0.0 ? -1.0 : 1.0;
            b_[i] = std::abs(u[i]);
        }
        cols_.resize(n_, static_cast<Eigen::Index>(normals.size()));
        for (std::size_t j = 0; j < normals.size(); ++j) {
            cols_.col(static_cast<Eigen::Index>(j)) = sign_.cwiseProduct(normals[j]);
        }
        costs_.resize(static_cast<Eigen::Index>(offsets.size()));
        for (std::size_t j = 0; j < offsets.size(); ++j) costs_[static_cast<Eigen::Index>(j)] = offsets[j];
        basis_.resize(static_cast<std::size_t>(n_));
        for (Eigen::Index i = 0; i < n_; ++i) basis_[static_cast<std::size_t>(i)] = artificial(i);
    }

    LpSolution solve() {
        run(/*phase_one=*/true);
        const double infeasibility = phase_one_objective();
        if (infeasibility > 1e-8 * (1.0 + b_.cwiseAbs().maxCoeff())) {
            throw UnboundedError(
                "Wulff linear program is unbounded: the constraint directions do not bound the "
                "polyhedron; refine the grid");
        }
        drive_out_artificials();
        run(/*phase_one=*/false);

        LpSolution sol;
        factor();
        const Eigen::VectorXd xb = lu_.solve(b_);
        const Eigen::VectorXd cb = basic_costs(false);
        sol.value = cb.dot(xb);
        const Eigen::VectorXd pi = lu_.transpose().solve(cb);
        sol.point = sign_.cwiseProduct(pi);
        sol.iterations = iterations_;
        return sol;
    }

private:
    static constexpr int kBlandAfter = 50;

    static int artificial(Eigen::Index i) { return -1 - static_cast<int>(i); }
    static bool is_artificial(int j) { return j < 0; }

    Eigen::VectorXd column(int j) const {
        if (is_artificial(j)) return Eigen::VectorXd::Unit(n_, -1 - j);
        return cols_.col(j);
    }

    double cost(int j, bool phase_one) const {
        if (phase_one) return is_artificial(j) ? 1.0 : 0.0;
        return is_artificial(j) ? 0.0 : offsets_[static_cast<std::size_t>(j)];
    }

    Eigen::VectorXd basic_costs(bool phase_one) const {
        Eigen::VectorXd c(n_);
        for (Eigen::Index i = 0; i < n_; ++i) c[i] = cost(basis_[static_cast<std::size_t>(i)], phase_one);
        return c;
    }

    void factor() {
        Eigen::MatrixXd b(n_, n_);
        for (Eigen::Index i = 0; i < n_; ++i) b.col(i) = column(basis_[static_cast<std::size_t>(i)]);
        lu_.compute(b);
    }

    double phase_one_objective() {
        factor();
        const Eigen::VectorXd xb = lu_.solve(b_);
        double s = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (is_artificial(basis_[static_cast<std::size_t>(i)])) s += std::max(0.0, xb[i]);
        }
        return s;
    }

    void drive_out_artificials() {
        for (Eigen::Index r = 0; r < n_; ++r) {
            if (!is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
            factor();
            int best = -1;
            double best_mag = 1e-9;
            // Row r of B^{-1} A.
            const Eigen::VectorXd row = lu_.transpose().solve(Eigen::VectorXd::Unit(n_, r));
            const Eigen::VectorXd entries = cols_.transpose() * row;
            for (std::size_t j = 0; j < normals_.size(); ++j) {
                const double mag = std::abs(entries[static_cast<Eigen::Index>(j)]);
                if (mag > best_mag) {
                    best_mag = mag;
                    best = static_cast<int>(j);
                }
            }
            // No candidate: the row is redundant and the artificial stays at zero.
            if (best >= 0) basis_[static_cast<std::size_t>(r)] = best;
        }
    }

    void run(bool phase_one) {
        const std::size_t m = normals_.size();
        const int max_iterations = 50 * static_cast<int>(m + static_cast<std::size_t>(n_)) + 1000;
        int degenerate_run = 0;
        while (true) {
            if (++iterations_ > max_iterations) {
                throw Error("Wulff linear program did not converge");
            }
            factor();
            const Eigen::VectorXd xb = lu_.solve(b_);
            const Eigen::VectorXd pi = lu_.transpose().solve(basic_costs(phase_one));
            const double scale = 1.0 + pi.cwiseAbs().maxCoeff();

            // Pricing over the real columns; artificials never re-enter.
            const bool bland = degenerate_run > kBlandAfter;
            const Eigen::VectorXd reduced =
                phase_one ? Eigen::VectorXd(-(cols_.transpose() * pi)) : Eigen::VectorXd(costs_ - cols_.transpose() * pi);
            int entering = -1;
            double best = -tol_ * scale;
            for (std::size_t j = 0; j < m; ++j) {
                const int col = static_cast<int>(j);
                const double d = reduced[static_cast<Eigen::Index>(j)];
                if (d < best) {
                    entering = col;
                    if (bland) break;
                    best = d;
                }
            }
            if (entering < 0) return;

            const Eigen::VectorXd w = lu_.solve(column(entering));
            int leaving = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n_; ++i) {
                if (w[i] <= tol_) continue;
                const double r = std::max(0.0, xb[i]) / w[i];
                const bool better = r < ratio - 1e-14 ||
                                    (r <= ratio + 1e-14 && leaving >= 0 &&
                                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)]);
                if (leaving < 0 || better) {
                    ratio = r;
                    leaving = static_cast<int>(i);
                }
            }
            if (leaving < 0) {
                throw DomainError("Wulff constraint set is infeasible (negative gauge values?)");
            }
            degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
            basis_[static_cast<std::size_t>(leaving)] = entering;
        }
    }

    const std::vector<Eigen::VectorXd>& normals_;
    std::span<const double> offsets_;
    double tol_;
    Eigen::Index n_;
    Eigen::VectorXd sign_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd cols_;
    Eigen::VectorXd costs_;
    std::vector<int> basis_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    int iterations_ = 0;
};

}  // namespace

LpSolution maximize_over_halfspaces(const std::vector<Eigen::VectorXd>& normals,
                                    std::span<const double> offsets, const Eigen::VectorXd& u,
                                    double tol) {
    if (normals.size() != offsets.size()) {
        throw DomainError("maximize_over_halfspaces: one offset per normal required");
    }
    for (const auto& y : normals) {
        if (y.size() != u.size()) throw DomainError("maximize_over_halfspaces: dimension mismatch");
    }
    for (double f : offsets) {
        if (!std::isfinite(f)) throw DomainError("maximize_over_halfspaces: non-finite offset");
    }
    if (u.isZero(0.0)) {
        LpSolution trivial;
        trivial.point = Eigen::VectorXd::Zero(u.size());
        return trivial;
    }
    return DualSimplex(normals, offsets, u, tol).solve();
}

}  // namespace pbm
