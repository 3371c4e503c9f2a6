#pragma once

#include "pbmkit/jet.hpp"
#include "pbmkit/sphere.hpp"
#include "pbmkit/test_function.hpp"

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace pbm {

/// Centered ball of radius R > 0.
struct Ball {
    double radius = 1.0;
};

/// Origin-symmetric axis-aligned box prod [-a_i, a_i]; a_i = 0 allowed.
struct Box {
    std::vector<double> half_lengths;
};

/// {|x_i| <= 1 for i in I, x_j = 0 otherwise}; indices are 0-based here and
/// 1-based in JSON documents.
struct EmbeddedCube {
    int dimension = 0;
    std::vector<int> indices;
};

/// Support function e^{s psi}.
struct LogPerturbedBall {
    TestFunction psi;
    double s = 0.0;
};

/// Wulff shape K[f] of gauge values sampled at the nodes of a grid. Known
/// only through its outer polyhedral approximation.
struct WulffSampled {
    std::shared_ptr<const SphericalGrid> grid;
    std::vector<double> gauge;
};

using Body = std::variant<Ball, Box, EmbeddedCube, LogPerturbedBall, WulffSampled>;

Body make_ball(double radius);
Body make_box(std::vector<double> half_lengths);
/// `indices_one_based` name coordinates in {1..n}.
Body make_embedded_cube(int n, const std::vector<int>& indices_one_based);
Body make_log_perturbed_ball(TestFunction psi, double s);
Body make_wulff(std::shared_ptr<const SphericalGrid> grid, std::vector<double> gauge);

/// Ambient dimension when the variant fixes one (a Ball does not).
std::optional<int> body_dimension(const Body& body);
/// Ball and LogPerturbedBall: support functions with a usable C^2 jet.
bool is_smooth(const Body& body);
std::string_view body_kind(const Body& body);

/// h_K(u) for a unit vector u. Throws DomainError when |u| != 1.
double support(const Body& body, const Vec& u);

/// Jet of an ambient extension of h at a unit x (smooth variants only).
Jet support_jet(const Body& body, const Vec& x);

/// t K for t > 0. EmbeddedCube scales to a Box; perturbed and Wulff bodies
/// are not closed under this representation.
Body scaled(const Body& body, double t);

/// alpha h_K(u) + beta h_L(u), alpha, beta >= 0.
double minkowski_support(const Body& k, const Body& l, double alpha, double beta, const Vec& u);

/// p-mean of two non-negative support values: ((1-t) a^p + t b^p)^{1/p} for
/// p in (0, 1], a^{1-t} b^t for p = 0 (0 when either value is 0).
double pmean_value(double p, double t, double a, double b);

struct PMeanSpec {
    double p = 1.0;
    double t = 0.5;
    Body h0;
    Body h1;
};

/// Gauge of (1-t) K_0 +_p t K_1 at u.
double pmean(const PMeanSpec& spec, const Vec& u);

/// Gauge values sampled at every grid node.
std::vector<double> sample_gauge(const SphericalGrid& grid, const std::function<double(const Vec&)>& f);
std::vector<double> pmean_gauge(const SphericalGrid& grid, const PMeanSpec& spec);

/// max (x, u) s.t. (x, y_j) <= f_j over the grid nodes: support function of
/// the outer polyhedral approximation of K[f]. Requires f_j >= 0. Throws
/// UnboundedError when the grid does not bound the polyhedron.
double wulff_support_upper(const SphericalGrid& grid, std::span<const double> gauge, const Vec& u);

/// (x, y_j) <= f_j for every node, with a 1e-12 relative slack.
bool wulff_membership(const SphericalGrid& grid, std::span<const double> gauge, const Vec& x);

}  // namespace pbm
