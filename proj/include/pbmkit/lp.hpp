#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace pbm {

struct LpSolution {
    double value = 0.0;
    Eigen::VectorXd point;  // a maximizer x
    int iterations = 0;
};

/// max (u, x) subject to (normals[j], x) <= offsets[j] for all j, x free.
///
/// Solved through its dual, min offsets . lambda subject to
/// sum_j lambda_j normals[j] = u, lambda >= 0, by a dense two-phase revised
/// simplex with an n x n basis (Dantzig pricing, Bland's rule after a run of
/// degenerate pivots). Throws UnboundedError when the dual is infeasible and
/// DomainError when the halfspaces have an empty intersection.
LpSolution maximize_over_halfspaces(const std::vector<Eigen::VectorXd>& normals,
                                    std::span<const double> offsets, const Eigen::VectorXd& u,
                                    double tol = 1e-9);

}  // namespace pbm
