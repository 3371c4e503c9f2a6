#pragma once

#include <stdexcept>
#include <string>

namespace pbm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid/method pairing, malformed config or body document.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A precondition on a function argument (evenness, zero mean, ...) failed.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The body variant does not support the requested operation.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A scalar field produced a non-finite value at some quadrature node.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, std::size_t node)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// Q[h_s] lost positive definiteness along a variation path.
class PathValidityError : public Error {
public:
    PathValidityError(const std::string& what, double s, std::size_t node)
        : Error(what), s_(s), node_(node) {}
    double s() const noexcept { return s_; }
    std::size_t node() const noexcept { return node_; }

private:
    double s_;
    std::size_t node_;
};

/// The Wulff linear program is unbounded: the constraint grid is too coarse.
class UnboundedError : public Error {
public:
    using Error::Error;
};

}  // namespace pbm
