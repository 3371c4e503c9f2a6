#pragma once

#include <Eigen/Dense>

#include <vector>

namespace pbm {

using SymMatrix = Eigen::MatrixXd;

/// Dense rank-4 array indexed (i, j, k, l), each in [0, order).
class Tensor4 {
public:
    explicit Tensor4(int order) : order_(order), data_(static_cast<std::size_t>(order) * order * order * order, 0.0) {}

    int order() const noexcept { return order_; }
    double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }

    /// sum_{ijkl} T(i,j,k,l) B(i,j) C(k,l)
    double contract(const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) const;

private:
    std::size_t index(int i, int j, int k, int l) const {
        return ((static_cast<std::size_t>(i) * order_ + j) * order_ + k) * order_ + l;
    }
    int order_;
    std::vector<double> data_;
};

/// S_0..S_N of a symmetric matrix, from the Faddeev-LeVerrier recursion on the
/// characteristic polynomial.
std::vector<double> elem_sym_all(const SymMatrix& a);

/// r-th elementary symmetric function of the eigenvalues of a (0 <= r <= N).
double elem_sym(int r, const SymMatrix& a);

/// r-cofactor matrix S_r^{ij}(a) = dS_r/da_ij, 1 <= r <= N. Computed as the
/// Newton tensor T_{r-1}(a) = sum_m (-1)^m S_{r-1-m} a^m.
SymMatrix cofactor(int r, const SymMatrix& a);

/// S_r^{ij,kl}(a) = d^2 S_r / da_ij da_kl, 1 <= r <= N, entries treated as
/// independent variables.
Tensor4 second_cofactor(int r, const SymMatrix& a);

/// Throws DomainError unless a is square and symmetric within 1e-10 (relative
/// to max(1, max|a_ij|)).
void require_symmetric(const SymMatrix& a);

double binomial(int n, int k);

}  // namespace pbm
