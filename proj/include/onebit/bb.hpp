#pragma once

#include "onebit/box_ls.hpp"
#include "onebit/ci_geometry.hpp"
#include "onebit/maxmin_lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace onebit {

/// Partition of the 2Nt real entries into fixed (already 1-bit) and residual
/// (relaxed, to be searched) index sets.
struct SplitState {
  std::vector<int> fixed_idx;
  std::vector<int> residual_idx;
  RealVector x_fixed;  // values on fixed_idx, each +-scale

  int dims() const { return static_cast<int>(fixed_idx.size() + residual_idx.size()); }
  int residual_count() const { return static_cast<int>(residual_idx.size()); }
};

/// Fixed entries are the boundary entries of x_relaxed, snapped to their sign.
inline SplitState make_split(const RealVector& x_relaxed, const DacAlphabet& dac, double eps) {
  const BoundaryAudit audit = audit_boundary(x_relaxed, dac, eps);
  SplitState s;
  s.residual_idx = audit.interior;
  std::vector<bool> residual(static_cast<std::size_t>(x_relaxed.size()), false);
  for (int i : audit.interior) residual[static_cast<std::size_t>(i)] = true;
  for (Eigen::Index i = 0; i < x_relaxed.size(); ++i) {
    if (!residual[static_cast<std::size_t>(i)]) s.fixed_idx.push_back(static_cast<int>(i));
  }
  s.x_fixed.resize(static_cast<Eigen::Index>(s.fixed_idx.size()));
  for (std::size_t j = 0; j < s.fixed_idx.size(); ++j) {
    s.x_fixed[static_cast<Eigen::Index>(j)] = dac.quantize(x_relaxed[s.fixed_idx[j]]);
  }
  return s;
}

/// Residual set = everything (F-BB).
inline SplitState full_split(int dims) {
  SplitState s;
  for (int i = 0; i < dims; ++i) s.residual_idx.push_back(i);
  return s;
}

inline RealMatrix select_columns(const RealMatrix& A, std::span<const int> idx) {
  RealMatrix out(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = A.col(idx[j]);
  return out;
}

/// Full x_E from a split and values on the residual entries.
inline RealVector assemble(const SplitState& s, const RealVector& x_residual) {
  RealVector x(s.dims());
  for (std::size_t j = 0; j < s.fixed_idx.size(); ++j) x[s.fixed_idx[j]] = s.x_fixed[static_cast<Eigen::Index>(j)];
  for (std::size_t j = 0; j < s.residual_idx.size(); ++j) {
    x[s.residual_idx[j]] = x_residual[static_cast<Eigen::Index>(j)];
  }
  return x;
}

inline RealVector residual_part(const SplitState& s, const RealVector& x_e) {
  RealVector r(s.residual_count());
  for (std::size_t j = 0; j < s.residual_idx.size(); ++j) r[static_cast<Eigen::Index>(j)] = x_e[s.residual_idx[j]];
  return r;
}

struct BBDiagnostics {
  long nodes_visited = 0;     // children whose relaxation was solved
  int depth_iterations = 0;   // P-BB: levels processed; F-BB: deepest level reached
  long expansions = 0;        // nodes branched on
  std::vector<double> ub_trace;
};

/// Assignment over residual entries: 0 unassigned, -1 at -scale, +1 at +scale.
using Assignment = std::vector<std::int8_t>;

struct BBNode {
  Assignment assign;
  double lb = 0.0;
  RealVector x_relaxed;  // residual entries; assigned ones hold their pinned value
  int depth = 0;
};

/// Adaptive subdivision: unassigned entry farthest from its 1-bit value, lowest index on ties.
inline int select_branch_index(const RealVector& x_r, const DacAlphabet& dac, std::span<const std::int8_t> assign = {}) {
  int best = -1;
  double best_dist = -1.0;
  for (Eigen::Index i = 0; i < x_r.size(); ++i) {
    if (!assign.empty() && assign[static_cast<std::size_t>(i)] != 0) continue;
    const double d = std::abs(x_r[i] - dac.quantize(x_r[i]));
    if (d > best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw std::invalid_argument("select_branch_index: no unassigned entry");
  return best;
}

/// Relaxation at a node plus the quantized completion used as its upper bound.
struct NodeBound {
  bool feasible = true;
  double lb = 0.0;
  RealVector x_relaxed;
  double ub = 0.0;
  RealVector x_quantized;
};

namespace detail {

inline RealVector pinned_values(const Assignment& a, double b) {
  RealVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i] * b;
  return v;
}

}  // namespace detail

/// Bounds for the max-min objective (PSK, minimization sense: -min_l Lambda_l)
/// over the residual entries. Each node solves the LP with the unassigned
/// entries boxed and the rest folded into the row offsets.
class MaxMinBounder {
 public:
  MaxMinBounder(const CIProblem& p, const SplitState& split, bool with_eq_rows = false)
      : dac_(p.dac) {
    M_r_ = select_columns(p.M, split.residual_idx);
    base_ = RealVector::Zero(p.M.rows());
    if (!split.fixed_idx.empty()) base_ = select_columns(p.M, split.fixed_idx) * split.x_fixed;
    if (with_eq_rows && p.partition) {
      eq_rows_.assign(static_cast<std::size_t>(p.M.rows()), false);
      for (int l : p.partition->inner) eq_rows_[static_cast<std::size_t>(l)] = true;
    }
  }

  int dims() const { return static_cast<int>(M_r_.cols()); }
  const DacAlphabet& dac() const { return dac_; }

  double objective(const RealVector& x_r) const {
    const RealVector lam = M_r_ * x_r + base_;
    const double t = lam.minCoeff();
    for (std::size_t l = 0; l < eq_rows_.size(); ++l) {
      if (eq_rows_[l] && std::abs(lam[static_cast<Eigen::Index>(l)] - t) > 1e-9) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return -t;
  }

  NodeBound evaluate(const Assignment& a) {
    NodeBound nb;
    const double b = dac_.scale();
    std::vector<int> free_cols;
    RealVector offsets = base_;
    for (int i = 0; i < dims(); ++i) {
      if (a[static_cast<std::size_t>(i)] == 0) free_cols.push_back(i);
      else offsets += M_r_.col(i) * (a[static_cast<std::size_t>(i)] * b);
    }
    nb.x_relaxed = detail::pinned_values(a, b);
    if (free_cols.empty()) {
      nb.lb = nb.ub = objective(nb.x_relaxed);
      nb.feasible = std::isfinite(nb.lb);
      nb.x_quantized = nb.x_relaxed;
      return nb;
    }
    MaxMinLP lp;
    lp.A = select_columns(M_r_, free_cols);
    lp.offsets = std::move(offsets);
    lp.eq_rows = eq_rows_;
    lp.box = b;
    const LPSolution sol = solver_.solve(lp);
    if (sol.status != LpStatus::Optimal) {
      nb.feasible = false;
      nb.lb = nb.ub = std::numeric_limits<double>::infinity();
      return nb;
    }
    for (std::size_t j = 0; j < free_cols.size(); ++j) nb.x_relaxed[free_cols[j]] = sol.x[static_cast<Eigen::Index>(j)];
    nb.lb = -sol.t;
    nb.x_quantized = quantize_1bit(nb.x_relaxed, dac_);
    nb.ub = objective(nb.x_quantized);
    return nb;
  }

 private:
  DacAlphabet dac_;
  RealMatrix M_r_;
  RealVector base_;
  std::vector<bool> eq_rows_;
  MaxMinBoxSolver solver_;
};

/// Bounds for ||s_E - beta H_E x_E||^2 + beta^2 K sigma^2 at fixed beta over the
/// residual entries; relaxations are box least-squares problems.
class MseBounder {
 public:
  MseBounder(const CIProblem& p, const SplitState& split, double beta, double sigma2) : dac_(p.dac) {
    A_r_ = beta * select_columns(p.H_E, split.residual_idx);
    target_ = p.s_E;
    if (!split.fixed_idx.empty()) target_ -= beta * (select_columns(p.H_E, split.fixed_idx) * split.x_fixed);
    noise_term_ = beta * beta * p.users() * sigma2;
  }

  int dims() const { return static_cast<int>(A_r_.cols()); }
  const DacAlphabet& dac() const { return dac_; }

  double objective(const RealVector& x_r) const { return (target_ - A_r_ * x_r).squaredNorm() + noise_term_; }

  NodeBound evaluate(const Assignment& a) {
    NodeBound nb;
    const double b = dac_.scale();
    std::vector<int> free_cols;
    RealVector rhs = target_;
    for (int i = 0; i < dims(); ++i) {
      if (a[static_cast<std::size_t>(i)] == 0) free_cols.push_back(i);
      else rhs -= A_r_.col(i) * (a[static_cast<std::size_t>(i)] * b);
    }
    nb.x_relaxed = detail::pinned_values(a, b);
    if (free_cols.empty()) {
      nb.lb = nb.ub = objective(nb.x_relaxed);
      nb.x_quantized = nb.x_relaxed;
      return nb;
    }
    const BoxLsResult ls = solve_box_ls(select_columns(A_r_, free_cols), rhs, b);
    for (std::size_t j = 0; j < free_cols.size(); ++j) nb.x_relaxed[free_cols[j]] = ls.x[static_cast<Eigen::Index>(j)];
    nb.lb = ls.objective + noise_term_;
    nb.x_quantized = quantize_1bit(nb.x_relaxed, dac_);
    nb.ub = objective(nb.x_quantized);
    return nb;
  }

 private:
  DacAlphabet dac_;
  RealMatrix A_r_;
  RealVector target_;
  double noise_term_ = 0.0;
};

struct BBOptions {
  bool prune = true;
};

struct BBResult {
  RealVector x_residual;  // best 1-bit residual values
  double objective = 0.0;
  BBDiagnostics diag;
};

namespace detail {

inline bool has_unassigned(const Assignment& a) {
  return std::any_of(a.begin(), a.end(), [](std::int8_t v) { return v == 0; });
}

}  // namespace detail

/// Breadth-first partial branch-and-bound. Every surviving node of a level is
/// expanded before the next level starts; UB0 starts at the incumbent.
template <class Bounder>
BBResult run_level_bb(Bounder& bounder, const RealVector& incumbent, const BBOptions& opt = {}) {
  const int n = bounder.dims();
  BBResult res;
  res.x_residual = incumbent;
  res.objective = bounder.objective(incumbent);
  if (n == 0) return res;

  double& ub0 = res.objective;
  BBNode root;
  root.assign.assign(static_cast<std::size_t>(n), 0);
  const NodeBound rb = bounder.evaluate(root.assign);
  if (!rb.feasible) return res;
  if (rb.ub < ub0) {
    ub0 = rb.ub;
    res.x_residual = rb.x_quantized;
  }
  root.lb = rb.lb;
  root.x_relaxed = rb.x_relaxed;

  std::vector<BBNode> level;
  if (!opt.prune || root.lb < ub0) level.push_back(std::move(root));
  while (!level.empty()) {
    std::vector<BBNode> next;
    for (BBNode& node : level) {
      if (opt.prune && node.lb >= ub0) continue;
      const int idx = select_branch_index(node.x_relaxed, bounder.dac(), node.assign);
      ++res.diag.expansions;
      for (std::int8_t sign : {std::int8_t{-1}, std::int8_t{1}}) {
        BBNode child;
        child.assign = node.assign;
        child.assign[static_cast<std::size_t>(idx)] = sign;
        child.depth = node.depth + 1;
        const NodeBound cb = bounder.evaluate(child.assign);
        ++res.diag.nodes_visited;
        if (!cb.feasible) continue;
        if (cb.ub < ub0) {
          ub0 = cb.ub;
          res.x_residual = cb.x_quantized;
        }
        child.lb = cb.lb;
        child.x_relaxed = cb.x_relaxed;
        if (detail::has_unassigned(child.assign) && (!opt.prune || child.lb < ub0)) next.push_back(std::move(child));
      }
    }
    ++res.diag.depth_iterations;
    res.diag.ub_trace.push_back(ub0);
    level = std::move(next);
  }
  return res;
}

/// Depth-first branch-and-bound, better-bound child explored first.
template <class Bounder>
BBResult run_depth_first_bb(Bounder& bounder, const RealVector& incumbent, const BBOptions& opt = {}) {
  const int n = bounder.dims();
  BBResult res;
  res.x_residual = incumbent;
  res.objective = bounder.objective(incumbent);
  if (n == 0) return res;

  double& ub0 = res.objective;
  BBNode root;
  root.assign.assign(static_cast<std::size_t>(n), 0);
  const NodeBound rb = bounder.evaluate(root.assign);
  if (!rb.feasible) return res;
  if (rb.ub < ub0) {
    ub0 = rb.ub;
    res.x_residual = rb.x_quantized;
  }
  root.lb = rb.lb;
  root.x_relaxed = rb.x_relaxed;

  std::vector<BBNode> stack;
  if (!opt.prune || root.lb < ub0) stack.push_back(std::move(root));
  while (!stack.empty()) {
    BBNode node = std::move(stack.back());
    stack.pop_back();
    if (opt.prune && node.lb >= ub0) continue;
    const int idx = select_branch_index(node.x_relaxed, bounder.dac(), node.assign);
    ++res.diag.expansions;
    BBNode kids[2];
    bool keep[2] = {false, false};
    for (int c = 0; c < 2; ++c) {
      BBNode& child = kids[c];
      child.assign = node.assign;
      child.assign[static_cast<std::size_t>(idx)] = static_cast<std::int8_t>(c == 0 ? -1 : 1);
      child.depth = node.depth + 1;
      const NodeBound cb = bounder.evaluate(child.assign);
      ++res.diag.nodes_visited;
      res.diag.depth_iterations = std::max(res.diag.depth_iterations, child.depth);
      if (!cb.feasible) continue;
      if (cb.ub < ub0) {
        ub0 = cb.ub;
        res.x_residual = cb.x_quantized;
      }
      child.lb = cb.lb;
      child.x_relaxed = cb.x_relaxed;
      keep[c] = detail::has_unassigned(child.assign) && (!opt.prune || child.lb < ub0);
    }
    res.diag.ub_trace.push_back(ub0);
    // Push the worse child first so the better one is popped next.
    const int first = kids[1].lb < kids[0].lb ? 0 : 1;
    for (int c : {first, 1 - first}) {
      if (keep[c]) stack.push_back(std::move(kids[c]));
    }
  }
  return res;
}

/// Exhaustive argmin over all sign patterns of n entries. Patterns are visited
/// in lexicographic order with -scale before +scale; the first minimum wins.
template <class Objective>
RealVector exhaustive_search(int n, double scale, Objective&& f, double* best_value = nullptr) {
  if (n < 0 || n > 20) throw std::invalid_argument("exhaustive_search: at most 20 entries");
  RealVector x(n), best(n);
  double best_f = std::numeric_limits<double>::infinity();
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < n; ++i) x[i] = ((mask >> (n - 1 - i)) & 1u) ? scale : -scale;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best = x;
    }
  }
  if (best_value) *best_value = best_f;
  return best;
}

enum class BBObjective { MaxMin, Mse };

/// Exhaustive reference over the residual entries of a split; fixed entries
/// keep their values. Returns the full x_E.
inline RealVector exhaustive_oracle(const CIProblem& p, BBObjective objective, const SplitState& split,
                                    double beta = 1.0, double sigma2 = 0.0, double* best_value = nullptr) {
  if (split.residual_count() > 20) throw std::invalid_argument("exhaustive_oracle: at most 20 residual entries");
  // Scored on the assembled full vector, independently of the bounders' split sums.
  auto full = [&](const RealVector& xr) {
    const RealVector x = assemble(split, xr);
    return objective == BBObjective::MaxMin ? -psk_objective(p.M * x) : mse_objective(x, beta, p, sigma2);
  };
  const RealVector xr = exhaustive_search(split.residual_count(), p.dac.scale(), full, best_value);
  return assemble(split, xr);
}

struct BBOutput {
  RealVector x_e;
  double objective = 0.0;  // minimization sense
  BBDiagnostics diag;
};

namespace detail {

// The search compares candidates through split sums; the reported objective is
// re-evaluated on the full vector, and the incumbent is kept unless strictly beaten.
template <class Full>
BBOutput finish(RealVector found, const RealVector& warm, BBDiagnostics diag, Full&& full) {
  const double f_found = full(found);
  const double f_warm = full(warm);
  if (f_warm <= f_found) return {warm, f_warm, std::move(diag)};
  return {std::move(found), f_found, std::move(diag)};
}

}  // namespace detail

/// P-BB for PSK. split comes from the P3 solution; warm is Q(x~_E).
inline BBOutput pbb_psk(const CIProblem& p, const SplitState& split, const RealVector& warm, const BBOptions& opt = {}) {
  MaxMinBounder bd(p, split);
  BBResult r = run_level_bb(bd, residual_part(split, warm), opt);
  return detail::finish(assemble(split, r.x_residual), warm, std::move(r.diag),
                        [&](const RealVector& x) { return -psk_objective(p.M * x); });
}

/// P-BB for QAM at fixed beta over the residual entries of split.
inline BBOutput pbb_qam_inner(const CIProblem& p, double beta, double sigma2, const SplitState& split,
                              const RealVector& warm, const BBOptions& opt = {}) {
  MseBounder bd(p, split, beta, sigma2);
  BBResult r = run_level_bb(bd, residual_part(split, warm), opt);
  return detail::finish(assemble(split, r.x_residual), warm, std::move(r.diag),
                        [&](const RealVector& x) { return mse_objective(x, beta, p, sigma2); });
}

inline constexpr int kFbbMaxDims = 24;

/// F-BB: the same bounding over all 2Nt entries, depth-first. With no incumbent
/// the root relaxation's quantization seeds UB0.
inline BBOutput fbb(const CIProblem& p, BBObjective objective, double beta = 1.0, double sigma2 = 0.0,
                    const RealVector* warm = nullptr) {
  if (p.dims() > kFbbMaxDims) throw std::invalid_argument("fbb: 2Nt exceeds the size guard");
  const SplitState split = full_split(p.dims());
  auto run = [&](auto& bd) {
    RealVector start;
    if (warm) {
      start = *warm;
    } else {
      const Assignment none(static_cast<std::size_t>(p.dims()), 0);
      start = bd.evaluate(none).x_quantized;
      if (start.size() == 0) start = RealVector::Constant(p.dims(), p.dac.scale());
    }
    BBResult r = run_depth_first_bb(bd, start);
    return detail::finish(r.x_residual, start, std::move(r.diag), [&](const RealVector& x) {
      return objective == BBObjective::MaxMin ? -psk_objective(p.M * x) : mse_objective(x, beta, p, sigma2);
    });
  };
  if (objective == BBObjective::MaxMin) {
    MaxMinBounder bd(p, split);
    return run(bd);
  }
  MseBounder bd(p, split, beta, sigma2);
  return run(bd);
}

}  // namespace onebit
