#pragma once

// Small dense solvers shared by the convex-geometry routines.

#include <optional>

#include "sphertess/sphere_core.hpp"

namespace sphertess {

struct NnlsResult {
  Vec x;                 // nonnegative minimizer of ||A x - b||
  double residual_norm;  // ||A x - b||
  bool converged;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
NnlsResult nnls(const Mat& A, const Vec& b, int max_iterations = 0);

/// Least-distance program: the minimum-norm x with G x >= h (rows of G are
/// constraints). Returns nullopt when the system is infeasible.
std::optional<Vec> least_distance(const Mat& G, const Vec& h);

/// Euclidean projection of y onto the cone generated by the columns of
/// `generators`.
Vec project_onto_cone(const Mat& generators, const Vec& y);

}  // namespace sphertess
