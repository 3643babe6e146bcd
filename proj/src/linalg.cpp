#include "sphertess/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sphertess {

namespace {

// Unconstrained least squares restricted to the passive columns.
Vec solve_passive(const Mat& A, const Vec& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    if (passive[j]) cols.push_back(j);
  Vec z = Vec::Zero(A.cols());
  if (cols.empty()) return z;
  Mat sub(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
  const Vec zs = sub.colPivHouseholderQr().solve(b);
  for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zs[static_cast<Eigen::Index>(k)];
  return z;
}

}  // namespace

NnlsResult nnls(const Mat& A, const Vec& b, int max_iterations) {
  const Eigen::Index n = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(30 * (n + 1));
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().maxCoeff() *
                     static_cast<double>(std::max(A.rows(), n));

  Vec x = Vec::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vec w = A.transpose() * (b - A * x);
  bool converged = false;

  for (int outer = 0; outer < max_iterations; ++outer) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) {
      converged = true;
      break;
    }
    passive[best] = true;

    for (int inner = 0; inner <= n; ++inner) {
      Vec z = solve_passive(A, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) {
          const double denom = x[j] - z[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    w = A.transpose() * (b - A * x);
  }
  return {x, (A * x - b).norm(), converged};
}

std::optional<Vec> least_distance(const Mat& G, const Vec& h) {
  // Lawson & Hanson, LDP via NNLS on E = [G h]^T, f = (0, ..., 0, 1).
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  Mat E(n + 1, m);
  E.topRows(n) = G.transpose();
  E.row(n) = h.transpose();
  Vec f = Vec::Zero(n + 1);
  f[n] = 1.0;
  const NnlsResult sol = nnls(E, f);
  Vec r = E * sol.x - f;
  if (sol.residual_norm < 1e-12 || std::abs(r[n]) < 1e-14) return std::nullopt;
  Vec x = -r.head(n) / r[n];
  return x;
}

Vec project_onto_cone(const Mat& generators, const Vec& y) {
  const NnlsResult sol = nnls(generators, y);
  return generators * sol.x;
}

}  // namespace sphertess
