#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace pbm {

/// Second-order jet (value, gradient, Hessian) of a smooth function on R^n,
/// evaluated at one point. Used to build Q[g] without finite differences.
struct Jet {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;

    static Jet constant(int n, double c) {
        return {c, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
    }
};

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value * b.value;
    r.grad = a.grad * b.value + b.grad * a.value;
    r.hess = a.hess * b.value + b.hess * a.value + a.grad * b.grad.transpose() +
             b.grad * a.grad.transpose();
    return r;
}

inline Jet operator*(double c, Jet a) {
    a.value *= c;
    a.grad *= c;
    a.hess *= c;
    return a;
}

inline Jet operator+(Jet a, const Jet& b) {
    a.value += b.value;
    a.grad += b.grad;
    a.hess += b.hess;
    return a;
}

inline Jet exp(const Jet& a) {
    const double e = std::exp(a.value);
    return {e, e * a.grad, e * (a.hess + a.grad * a.grad.transpose())};
}

}  // namespace pbm
