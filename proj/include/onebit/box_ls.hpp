#pragma once

#include "onebit/real_expansion.hpp"
#include "onebit/solver_audit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace onebit {

struct BoxLsResult {
  RealVector x;
  double objective = 0.0;       // ||b - A x||^2
  std::vector<double> trace;    // objective after each outer iteration
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
};

/// Optimality residual of x for min ||b - Ax||^2, |x_i| <= box. With g the
/// gradient 2 A^T (Ax - b): |g_i| for interior entries, the inward-pointing
/// part of g_i for entries on a bound, plus any box violation.
inline double box_ls_kkt(const RealMatrix& A, const RealVector& b, double box, const RealVector& x,
                         double bound_tol = 1e-12) {
  if (x.size() == 0) return 0.0;
  const RealVector g = 2.0 * (A.transpose() * (A * x - b));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(x[i]) - box);
    if (x[i] >= box - bound_tol) worst = std::max(worst, g[i]);
    else if (x[i] <= -box + bound_tol) worst = std::max(worst, -g[i]);
    else worst = std::max(worst, std::abs(g[i]));
  }
  return worst;
}

/// Active-set solver for min ||b - A x||^2 s.t. |x_i| <= box (bounded-variable
/// least squares). Each face is minimized with a minimum-norm step, so columns
/// may outnumber rows.
inline BoxLsResult solve_box_ls(const RealMatrix& A, const RealVector& b, double box, int max_iterations = 500) {
  const Eigen::Index n = A.cols();
  BoxLsResult res;
  res.x = RealVector::Zero(n);
  if (n == 0) {
    res.objective = b.squaredNorm();
    res.converged = true;
    res.trace.push_back(res.objective);
    return res;
  }
  constexpr double kFreeTol = 1e-11;
  // bound[i]: 0 free, +1 at +box, -1 at -box
  std::vector<int> bound(static_cast<std::size_t>(n), 0);
  RealVector& x = res.x;
  std::vector<Eigen::Index> free_idx;

  auto minimize_face = [&] {
    for (int guard = 0; guard <= n; ++guard) {
      free_idx.clear();
      for (Eigen::Index i = 0; i < n; ++i) if (bound[i] == 0) free_idx.push_back(i);
      if (free_idx.empty()) return;
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      RealMatrix af(A.rows(), nf);
      for (Eigen::Index j = 0; j < nf; ++j) af.col(j) = A.col(free_idx[j]);
      const RealVector r = b - A * x;
      const RealVector step = af.completeOrthogonalDecomposition().solve(r);
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < nf; ++j) {
        const double xi = x[free_idx[j]];
        const double target = xi + step[j];
        if (target > box) alpha = std::min(alpha, (box - xi) / step[j]);
        else if (target < -box) alpha = std::min(alpha, (-box - xi) / step[j]);
      }
      alpha = std::max(alpha, 0.0);
      for (Eigen::Index j = 0; j < nf; ++j) x[free_idx[j]] += alpha * step[j];
      if (alpha >= 1.0) return;
      // Bind every free entry that reached its bound.
      for (Eigen::Index j = 0; j < nf; ++j) {
        const Eigen::Index i = free_idx[j];
        if (x[i] >= box * (1.0 - 1e-14)) {
          x[i] = box;
          bound[i] = 1;
        } else if (x[i] <= -box * (1.0 - 1e-14)) {
          x[i] = -box;
          bound[i] = -1;
        }
      }
    }
  };

  // An entry released and immediately re-bound without progress (rounding in
  // the face step) is skipped until the objective decreases again.
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  Eigen::Index released = -1;
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    minimize_face();
    const double obj = (b - A * x).squaredNorm();
    if (released >= 0 && bound[released] != 0 && !res.trace.empty() && obj >= res.trace.back()) {
      blocked[released] = true;
    } else if (!res.trace.empty() && obj < res.trace.back()) {
      std::fill(blocked.begin(), blocked.end(), false);
    }
    res.trace.push_back(obj);
    const RealVector g = A.transpose() * (A * x - b);
    Eigen::Index release = -1;
    double worst = kFreeTol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (blocked[i]) continue;
      const double v = bound[i] > 0 ? g[i] : bound[i] < 0 ? -g[i] : 0.0;
      if (v > worst) {
        worst = v;
        release = i;
      }
    }
    if (release < 0) {
      res.converged = true;
      break;
    }
    bound[release] = 0;
    released = release;
  }
  res.objective = (b - A * x).squaredNorm();
  res.kkt_residual = box_ls_kkt(A, b, box, x);
  if (solver_audit().enabled) solver_audit().record_ls(res.kkt_residual);
  return res;
}

}  // namespace onebit
