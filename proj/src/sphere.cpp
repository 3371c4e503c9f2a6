#include "pbmkit/sphere.hpp"

#include "pbmkit/errors.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace pbm {

namespace {

constexpr double kPi = std::numbers::pi;

struct PolarRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

std::vector<std::size_t> compute_antipodes(const std::vector<Vec>& nodes) {
    const std::size_t count = nodes.size();
    std::vector<std::size_t> antipodes(count, SphericalGrid::npos);
    std::map<std::vector<long long>, std::size_t> index;
    auto key = [](const Vec& x) {
        std::vector<long long> k(static_cast<std::size_t>(x.size()));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            k[static_cast<std::size_t>(i)] = std::llround(x[i] * 1e9);
        }
        return k;
    };
    for (std::size_t j = 0; j < count; ++j) index.emplace(key(nodes[j]), j);
    for (std::size_t j = 0; j < count; ++j) {
        const Vec neg = -nodes[j];
        auto it = index.find(key(neg));
        if (it != index.end() && (nodes[it->second] - neg).norm() < 1e-10) {
            antipodes[j] = it->second;
            continue;
        }
        for (std::size_t i = 0; i < count; ++i) {
            if ((nodes[i] - neg).norm() < 1e-10) {
                antipodes[j] = i;
                break;
            }
        }
    }
    return antipodes;
}

// The rule is symmetric up to rounding; make antipodal pairs exact.
std::vector<std::pair<Vec, double>> make_antipodal(std::vector<std::pair<Vec, double>> points) {
    std::vector<Vec> nodes;
    nodes.reserve(points.size());
    for (const auto& p : points) nodes.push_back(p.first);
    const auto antipodes = compute_antipodes(nodes);
    for (std::size_t j = 0; j < points.size(); ++j) {
        const std::size_t a = antipodes[j];
        if (a == SphericalGrid::npos || a <= j) continue;
        points[a].first = -points[j].first;
        const double w = 0.5 * (points[j].second + points[a].second);
        points[j].second = w;
        points[a].second = w;
    }
    return points;
}

std::vector<std::pair<Vec, double>> product_angular(int n, int resolution) {
    const int azimuthal = 2 * ((resolution + 1) / 2);
    const int polar = (resolution + 1) / 2;

    // Polar rules in t = cos(theta_j): Gauss-Gegenbauer for the weight
    // (1 - t^2)^{(p-1)/2}, p = n-1-j, so polynomial integrands are exact.
    std::vector<PolarRule> rules;
    for (int j = 1; j <= n - 2; ++j) {
        const int power = n - 1 - j;
        gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(
            gsl_integration_fixed_gegenbauer, static_cast<std::size_t>(polar), -1.0, 1.0, 0.5 * (power - 1), 0.0);
        if (ws == nullptr) throw ConfigurationError("cannot build the polar quadrature rule");
        const double* t = gsl_integration_fixed_nodes(ws);
        const double* w = gsl_integration_fixed_weights(ws);
        PolarRule rule;
        for (int i = polar - 1; i >= 0; --i) {
            rule.nodes.push_back(std::acos(std::clamp(t[i], -1.0, 1.0)));
            rule.weights.push_back(w[i]);
        }
        gsl_integration_fixed_free(ws);
        rules.push_back(std::move(rule));
    }

    std::vector<std::pair<Vec, double>> out;
    std::vector<int> idx(rules.size(), 0);
    const double dphi = 2.0 * kPi / azimuthal;
    while (true) {
        // Prefix of the point from the polar angles.
        Vec prefix(n);
        double radius = 1.0;
        double weight = 1.0;
        for (std::size_t j = 0; j < rules.size(); ++j) {
            const double theta = rules[j].nodes[static_cast<std::size_t>(idx[j])];
            prefix[static_cast<Eigen::Index>(j)] = radius * std::cos(theta);
            radius *= std::sin(theta);
            weight *= rules[j].weights[static_cast<std::size_t>(idx[j])];
        }
        for (int a = 0; a < azimuthal; ++a) {
            const double phi = dphi * a;
            Vec x = prefix;
            x[n - 2] = radius * std::cos(phi);
            x[n - 1] = radius * std::sin(phi);
            x /= x.norm();
            out.emplace_back(std::move(x), weight * dphi);
        }
        // Odometer increment over the polar indices.
        std::size_t j = rules.size();
        while (j > 0) {
            --j;
            if (++idx[j] < polar) break;
            idx[j] = 0;
            if (j == 0) return make_antipodal(std::move(out));
        }
        if (rules.empty()) return make_antipodal(std::move(out));
    }
}

std::vector<std::pair<Vec, double>> monte_carlo(int n, int resolution, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double w = sphere_area(n) / (2.0 * resolution);
    std::vector<std::pair<Vec, double>> out;
    out.reserve(2 * static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        Vec x(n);
        do {
            for (int c = 0; c < n; ++c) x[c] = normal(rng);
        } while (x.norm() < 1e-8);
        x /= x.norm();
        out.emplace_back(x, w);
        out.emplace_back(-x, w);
    }
    return out;
}

double spherical_triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c) {
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

std::vector<std::pair<Vec, double>> icosphere(int resolution) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> v = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int level = 1; level < resolution; ++level) {
        std::map<std::pair<int, int>, int> midpoints;
        auto midpoint = [&](int i, int j) {
            auto key = std::minmax(i, j);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            v.push_back((v[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(j)]).normalized());
            const int id = static_cast<int>(v.size()) - 1;
            midpoints.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int a = midpoint(f[0], f[1]);
            const int b = midpoint(f[1], f[2]);
            const int c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    std::vector<std::pair<Vec, double>> out;
    out.reserve(faces.size());
    for (const auto& f : faces) {
        const auto& a = v[static_cast<std::size_t>(f[0])];
        const auto& b = v[static_cast<std::size_t>(f[1])];
        const auto& c = v[static_cast<std::size_t>(f[2])];
        Vec x = (a + b + c).normalized();
        out.emplace_back(std::move(x), spherical_triangle_area(a, b, c));
    }
    return out;
}

std::vector<std::pair<Vec, double>> lattice(int n, int resolution) {
    const double total = std::pow(2.0 * resolution + 1.0, n);
    if (total > 5e6) {
        throw ConfigurationError("lattice grid with n=" + std::to_string(n) + ", resolution=" +
                                 std::to_string(resolution) + " is too large");
    }
    std::vector<Vec> dirs;
    std::vector<int> v(static_cast<std::size_t>(n), -resolution);
    while (true) {
        int g = 0;
        for (int c : v) g = std::gcd(g, std::abs(c));
        if (g == 1) {
            Vec x(n);
            for (int c = 0; c < n; ++c) x[c] = v[static_cast<std::size_t>(c)];
            dirs.push_back(x.normalized());
        }
        int c = n - 1;
        while (c >= 0 && v[static_cast<std::size_t>(c)] == resolution) {
            v[static_cast<std::size_t>(c)] = -resolution;
            --c;
        }
        if (c < 0) break;
        ++v[static_cast<std::size_t>(c)];
    }
    const double w = sphere_area(n) / static_cast<double>(dirs.size());
    std::vector<std::pair<Vec, double>> out;
    out.reserve(dirs.size());
    for (auto& d : dirs) out.emplace_back(std::move(d), w);
    return out;
}

}  // namespace

std::string_view to_string(GridMethod m) {
    switch (m) {
        case GridMethod::ProductAngular: return "product-angular";
        case GridMethod::MonteCarlo: return "monte-carlo";
        case GridMethod::IcosphereN3: return "icosphere-n3";
        case GridMethod::Lattice: return "lattice";
    }
    return "unknown";
}

GridMethod grid_method_from_string(std::string_view s) {
    if (s == "product-angular") return GridMethod::ProductAngular;
    if (s == "monte-carlo") return GridMethod::MonteCarlo;
    if (s == "icosphere-n3") return GridMethod::IcosphereN3;
    if (s == "lattice") return GridMethod::Lattice;
    throw ConfigurationError("unknown grid method '" + std::string(s) + "'");
}

double sphere_area(int n) {
    return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

TangentFrame tangent_frame(const Vec& x) {
    const Eigen::Index n = x.size();
    if (n < 2) throw DomainError("tangent_frame: dimension must be at least 2");
    if (!std::isfinite(x.norm()) || std::abs(x.norm() - 1.0) > 1e-10) {
        throw DomainError("tangent_frame: base point is not a unit vector");
    }
    Eigen::Index skip = 0;
    x.cwiseAbs().maxCoeff(&skip);

    TangentFrame frame{x, Mat(n, n - 1)};
    Eigen::Index col = 0;
    for (Eigen::Index axis = 0; axis < n; ++axis) {
        if (axis == skip) continue;
        Vec e = Vec::Unit(n, axis);
        // Two Gram-Schmidt passes.
        for (int pass = 0; pass < 2; ++pass) {
            e -= e.dot(x) * x;
            for (Eigen::Index c = 0; c < col; ++c) e -= e.dot(frame.basis.col(c)) * frame.basis.col(c);
        }
        frame.basis.col(col++) = e.normalized();
    }
    return frame;
}

SphericalGrid::SphericalGrid(int dimension, GridMethod method, int resolution, std::uint64_t seed,
                             std::vector<Vec> nodes, std::vector<double> weights)
    : dimension_(dimension),
      method_(method),
      resolution_(resolution),
      seed_(seed),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
    if (dimension_ < 2) throw DomainError("grid dimension must be at least 2");
    if (nodes_.size() != weights_.size() || nodes_.empty()) {
        throw ConfigurationError("grid must have one positive weight per node");
    }
    frames_.reserve(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if (nodes_[j].size() != dimension_) throw ConfigurationError("grid node has wrong dimension");
        if (std::abs(nodes_[j].norm() - 1.0) > 1e-12) {
            throw ConfigurationError("grid node " + std::to_string(j) + " is not a unit vector");
        }
        if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
            throw ConfigurationError("grid weight " + std::to_string(j) + " is not positive");
        }
        frames_.push_back(tangent_frame(nodes_[j]));
    }
    antipodes_ = compute_antipodes(nodes_);
}

std::size_t SphericalGrid::find_node(const Vec& x, double tol) const {
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        if ((nodes_[j] - x).norm() <= tol) return j;
    }
    return npos;
}

std::string SphericalGrid::fingerprint() const {
    std::uint64_t hash = 1469598103934665603ULL;
    auto mix = [&hash](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            hash ^= p[i];
            hash *= 1099511628211ULL;
        }
    };
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        mix(nodes_[j].data(), sizeof(double) * static_cast<std::size_t>(nodes_[j].size()));
        mix(&weights_[j], sizeof(double));
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << hash;
    return os.str();
}

double SphericalGrid::weight_sum_tolerance() const {
    const double area = sphere_area(dimension_);
    switch (method_) {
        case GridMethod::MonteCarlo:
            return 3.0 / std::sqrt(static_cast<double>(nodes_.size())) * area;
        case GridMethod::ProductAngular:
        case GridMethod::IcosphereN3:
        case GridMethod::Lattice:
            return 1e-10;
    }
    return 1e-10;
}

SphericalGrid build_grid(int n, int resolution, GridMethod method, std::uint64_t seed) {
    if (n < 2) throw DomainError("build_grid: n must be at least 2");
    if (resolution < 1) throw DomainError("build_grid: resolution must be at least 1");

    std::vector<std::pair<Vec, double>> points;
    switch (method) {
        case GridMethod::ProductAngular:
            if (n > 6) {
                throw ConfigurationError("product-angular grids are limited to n <= 6; use monte-carlo");
            }
            points = product_angular(n, resolution);
            break;
        case GridMethod::MonteCarlo:
            points = monte_carlo(n, resolution, seed);
            break;
        case GridMethod::IcosphereN3:
            if (n != 3) throw ConfigurationError("icosphere-n3 grids require n = 3");
            if (resolution > 8) throw ConfigurationError("icosphere-n3 resolution is limited to 8");
            points = icosphere(resolution);
            break;
        case GridMethod::Lattice:
            points = lattice(n, resolution);
            break;
    }
    std::vector<Vec> nodes;
    std::vector<double> weights;
    nodes.reserve(points.size());
    weights.reserve(points.size());
    for (auto& [x, w] : points) {
        nodes.push_back(std::move(x));
        weights.push_back(w);
    }
    return SphericalGrid(n, method, resolution, method == GridMethod::MonteCarlo ? seed : 0,
                         std::move(nodes), std::move(weights));
}

SphericalGrid default_grid(int n, int resolution, std::uint64_t seed) {
    return build_grid(n, resolution, n <= 6 ? GridMethod::ProductAngular : GridMethod::MonteCarlo,
                      seed);
}

int reference_resolution(int n) {
    switch (n) {
        case 2: return 64;
        case 3: return 32;
        case 4: return 20;
        case 5: return 14;
        case 6: return 10;
        default: return 20000;  // Monte Carlo pairs
    }
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate_indexed(const SphericalGrid& grid, const std::function<double(std::size_t)>& f) {
    std::vector<double> terms(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double v = f(j);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "integrand is not finite at node " << j << " (" << grid.node(j).transpose() << ")";
            throw EvaluationError(os.str(), j);
        }
        terms[j] = grid.weight(j) * v;
    }
    return pairwise_sum(terms);
}

double integrate(const SphericalGrid& grid, const std::function<double(const Vec&)>& f) {
    return integrate_indexed(grid, [&](std::size_t j) { return f(grid.node(j)); });
}

}  // namespace pbm
