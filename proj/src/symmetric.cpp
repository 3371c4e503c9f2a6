#include "pbmkit/symmetric.hpp"

#include "pbmkit/errors.hpp"

#include <cmath>
#include <string>

namespace pbm {

namespace {

// Powers a^0 .. a^{count-1}.
std::vector<Eigen::MatrixXd> matrix_powers(const SymMatrix& a, int count) {
    std::vector<Eigen::MatrixXd> pw;
    pw.reserve(static_cast<std::size_t>(std::max(count, 1)));
    pw.push_back(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    for (int m = 1; m < count; ++m) pw.push_back(pw.back() * a);
    return pw;
}

// Newton tensors T_0 .. T_{count-1}: T_0 = I, T_m = S_m I - a T_{m-1}.
std::vector<Eigen::MatrixXd> newton_tensors(const SymMatrix& a, const std::vector<double>& s,
                                            int count) {
    const Eigen::Index n = a.rows();
    std::vector<Eigen::MatrixXd> t;
    t.reserve(static_cast<std::size_t>(std::max(count, 1)));
    t.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int m = 1; m < count; ++m) {
        t.push_back(s[static_cast<std::size_t>(m)] * Eigen::MatrixXd::Identity(n, n) - a * t.back());
    }
    return t;
}

void require_order(int r, int lo, const SymMatrix& a, const char* what) {
    if (r < lo || r > a.rows()) {
        throw DomainError(std::string(what) + ": order r=" + std::to_string(r) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(a.rows()) + "]");
    }
}

}  // namespace

double Tensor4::contract(const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) const {
    double s = 0.0;
    for (int i = 0; i < order_; ++i)
        for (int j = 0; j < order_; ++j) {
            const double bij = b(i, j);
            if (bij == 0.0) continue;
            for (int k = 0; k < order_; ++k)
                for (int l = 0; l < order_; ++l) s += (*this)(i, j, k, l) * bij * c(k, l);
        }
    return s;
}

void require_symmetric(const SymMatrix& a) {
    if (a.rows() != a.cols()) throw DomainError("matrix is not square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw DomainError("matrix is not symmetric");
    }
}

double binomial(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

std::vector<double> elem_sym_all(const SymMatrix& a) {
    require_symmetric(a);
    const Eigen::Index n = a.rows();
    // Characteristic polynomial det(x I - a) = sum_k c[k] x^k, c[n] = 1.
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(n - k + 1)] * id;
        c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
    }
    std::vector<double> s(static_cast<std::size_t>(n) + 1);
    for (Eigen::Index r = 0; r <= n; ++r) {
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        s[static_cast<std::size_t>(r)] = sign * c[static_cast<std::size_t>(n - r)];
    }
    return s;
}

double elem_sym(int r, const SymMatrix& a) {
    require_symmetric(a);
    require_order(r, 0, a, "elem_sym");
    return elem_sym_all(a)[static_cast<std::size_t>(r)];
}

SymMatrix cofactor(int r, const SymMatrix& a) {
    require_symmetric(a);
    require_order(r, 1, a, "cofactor");
    const auto s = elem_sym_all(a);
    return newton_tensors(a, s, r).back();
}

Tensor4 second_cofactor(int r, const SymMatrix& a) {
    require_symmetric(a);
    require_order(r, 1, a, "second_cofactor");
    const int n = static_cast<int>(a.rows());
    const auto s = elem_sym_all(a);
    const auto pw = matrix_powers(a, r);
    const auto t = newton_tensors(a, s, std::max(r - 1, 1));

    // d(T_{r-1})_{ji} / da_kl with T_{r-1} = sum_m (-1)^m S_{r-1-m} a^m and
    // dS_q/da_kl = (T_{q-1})_{lk}.
    Tensor4 out(n);
    for (int m = 0; m <= r - 1; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const int q = r - 1 - m;
        const double sq = s[static_cast<std::size_t>(q)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double v = 0.0;
                        if (q >= 1) v += t[static_cast<std::size_t>(q - 1)](l, k) * pw[static_cast<std::size_t>(m)](j, i);
                        for (int p = 0; p < m; ++p) {
                            v += sq * pw[static_cast<std::size_t>(p)](j, k) *
                                 pw[static_cast<std::size_t>(m - 1 - p)](l, i);
                        }
                        out(i, j, k, l) += sign * v;
                    }
    }
    return out;
}

}  // namespace pbm
