#pragma once

#include "onebit/real_expansion.hpp"
#include "onebit/solver_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace onebit {

/// maximize t  s.t.  t <= A_l x + offset_l   (inequality rows)
///                   t == A_l x + offset_l   (rows flagged in eq_rows)
///                   |x_i| <= box
struct MaxMinLP {
  RealMatrix A;
  RealVector offsets;
  std::vector<bool> eq_rows;  // empty means no equality rows
  double box = 1.0;

  Eigen::Index rows() const { return A.rows(); }
  Eigen::Index cols() const { return A.cols(); }
  bool is_eq(Eigen::Index l) const { return !eq_rows.empty() && eq_rows[static_cast<std::size_t>(l)]; }
};

enum class LpStatus { Optimal, Infeasible };

/// Primal point plus the multipliers of
///   L = -t + sum beta_l (t - A_l x - off_l) + sum mu_m (x_m - b) - sum nu_m (x_m + b).
struct LPSolution {
  LpStatus status = LpStatus::Infeasible;
  RealVector x;
  double t = 0.0;
  RealVector beta;
  RealVector mu;
  RealVector nu;
  int iterations = 0;
};

struct KktReport {
  double dual_sum = 0.0;              // |1^T beta - 1|
  double stationarity = 0.0;          // ||-A^T beta + mu - nu||_inf
  double complementarity = 0.0;       // max |beta_l (t - A_l x - off_l)|, |mu (x - b)|, |nu (x + b)|
  double primal_infeasibility = 0.0;  // row and box violations
  double dual_sign = 0.0;             // negative parts of beta (inequality rows), mu, nu

  double max() const { return std::max({dual_sum, stationarity, complementarity, primal_infeasibility, dual_sign}); }
};

inline KktReport kkt_residuals(const MaxMinLP& p, const RealVector& x, double t, const RealVector& beta,
                               const RealVector& mu, const RealVector& nu) {
  KktReport r;
  r.dual_sum = std::abs(beta.sum() - 1.0);
  r.stationarity = (-(p.A.transpose() * beta) + mu - nu).cwiseAbs().maxCoeff();
  const RealVector rows = p.A * x + p.offsets;
  for (Eigen::Index l = 0; l < p.rows(); ++l) {
    const double gap = t - rows[l];
    if (p.is_eq(l)) {
      r.primal_infeasibility = std::max(r.primal_infeasibility, std::abs(gap));
    } else {
      r.primal_infeasibility = std::max(r.primal_infeasibility, gap);
      r.complementarity = std::max(r.complementarity, std::abs(beta[l] * gap));
      r.dual_sign = std::max(r.dual_sign, -beta[l]);
    }
  }
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    r.primal_infeasibility = std::max(r.primal_infeasibility, std::abs(x[m]) - p.box);
    r.complementarity = std::max({r.complementarity, std::abs(mu[m] * (x[m] - p.box)), std::abs(nu[m] * (x[m] + p.box))});
    r.dual_sign = std::max({r.dual_sign, -mu[m], -nu[m]});
  }
  return r;
}

/// Same report with the box multipliers re-derived from x: an entry carries
/// mu (nu) only if it sits within active_tol of +box (-box).
inline KktReport kkt_residuals(const MaxMinLP& p, const RealVector& x, double t, const RealVector& beta,
                               double active_tol) {
  const RealVector g = p.A.transpose() * beta;
  RealVector mu = RealVector::Zero(x.size());
  RealVector nu = RealVector::Zero(x.size());
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    if (x[m] >= p.box - active_tol) mu[m] = std::max(g[m], 0.0);
    if (x[m] <= -p.box + active_tol) nu[m] = std::max(-g[m], 0.0);
  }
  return kkt_residuals(p, x, t, beta, mu, nu);
}

/// Bounded-variable primal simplex for MaxMinLP with Bland's rule.
///
/// Columns, in Bland order: t, x_1..x_n, one slack per inequality row, then
/// artificials for equality rows. The crash basis puts t in the tightest
/// inequality row, so phase 1 only runs when equality rows are present.
/// The returned point is a basic solution: nonbasic x sit exactly on +-box.
class MaxMinBoxSolver {
 public:
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;

  LPSolution solve(const MaxMinLP& p) {
    setup(p);
    LPSolution sol;
    if (num_art_ > 0) {
      cost_.assign(num_vars_, 0.0);
      for (int j = art_begin_; j < num_vars_; ++j) cost_[j] = -1.0;
      iterate();
      double infeas = 0.0;
      for (int j = art_begin_; j < num_vars_; ++j) infeas += value_of(j);
      const double scale = 1.0 + (p.offsets.size() ? p.offsets.cwiseAbs().maxCoeff() : 0.0);
      if (infeas > kFeasTol * scale * m_) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations_;
        return sol;
      }
      for (int j = art_begin_; j < num_vars_; ++j) {
        up_[j] = 0.0;
        if (pos_[j] < 0) status_[j] = Status::AtLower;
      }
    }
    cost_.assign(num_vars_, 0.0);
    cost_[0] = 1.0;
    iterate();

    sol.status = LpStatus::Optimal;
    sol.iterations = iterations_;
    sol.x.resize(n_);
    for (int i = 0; i < n_; ++i) sol.x[i] = value_of(1 + i);
    sol.t = value_of(0);
    sol.beta.resize(m_);
    for (int l = 0; l < m_; ++l) sol.beta[l] = y_[l];
    sol.mu.resize(n_);
    sol.nu.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const double d = reduced_cost(1 + i);
      sol.mu[i] = std::max(d, 0.0);
      sol.nu[i] = std::max(-d, 0.0);
    }
    if (solver_audit().enabled) {
      solver_audit().record_lp(kkt_residuals(p, sol.x, sol.t, sol.beta, sol.mu, sol.nu).max());
    }
    return sol;
  }

 private:
  enum class Status { Basic, AtLower, AtUpper, FreeZero };

  void setup(const MaxMinLP& p) {
    if (p.rows() < 1) throw std::invalid_argument("MaxMinLP: need at least one row");
    if (!(p.box > 0.0)) throw std::invalid_argument("MaxMinLP: box must be positive");
    if (p.offsets.size() != p.rows()) throw std::invalid_argument("MaxMinLP: offsets size mismatch");
    if (!p.eq_rows.empty() && static_cast<Eigen::Index>(p.eq_rows.size()) != p.rows()) {
      throw std::invalid_argument("MaxMinLP: eq_rows size mismatch");
    }
    m_ = static_cast<int>(p.rows());
    n_ = static_cast<int>(p.cols());
    iterations_ = 0;
    const double inf = std::numeric_limits<double>::infinity();

    int num_ineq = 0;
    for (int l = 0; l < m_; ++l) num_ineq += p.is_eq(l) ? 0 : 1;

    // Start every x on the bound favoured by its column sum.
    std::vector<double> x0(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x0[i] = p.A.col(i).sum() >= 0.0 ? p.box : -p.box;
    std::vector<double> row_val(static_cast<std::size_t>(m_));
    for (int l = 0; l < m_; ++l) {
      double v = p.offsets[l];
      for (int i = 0; i < n_; ++i) v += p.A(l, i) * x0[i];
      row_val[l] = v;
    }
    int t_row = -1;
    for (int l = 0; l < m_; ++l) {
      if (p.is_eq(l)) continue;
      if (t_row < 0 || row_val[l] < row_val[t_row]) t_row = l;
    }
    if (t_row < 0) t_row = 0;
    const double t0 = row_val[t_row];

    slack_begin_ = 1 + n_;
    art_begin_ = slack_begin_ + num_ineq;
    num_art_ = 0;
    for (int l = 0; l < m_; ++l) num_art_ += (p.is_eq(l) && l != t_row) ? 1 : 0;
    num_vars_ = art_begin_ + num_art_;

    cols_.assign(static_cast<std::size_t>(m_) * num_vars_, 0.0);
    lo_.assign(num_vars_, 0.0);
    up_.assign(num_vars_, inf);
    status_.assign(num_vars_, Status::AtLower);
    pos_.assign(num_vars_, -1);
    basis_.assign(m_, -1);
    rhs_.assign(m_, 0.0);
    for (int l = 0; l < m_; ++l) rhs_[l] = p.offsets[l];

    // t
    for (int l = 0; l < m_; ++l) col(0)[l] = 1.0;
    lo_[0] = -inf;
    // x
    for (int i = 0; i < n_; ++i) {
      double* c = col(1 + i);
      for (int l = 0; l < m_; ++l) c[l] = -p.A(l, i);
      lo_[1 + i] = -p.box;
      up_[1 + i] = p.box;
      status_[1 + i] = x0[i] > 0.0 ? Status::AtUpper : Status::AtLower;
    }
    int slack = slack_begin_;
    int art = art_begin_;
    for (int l = 0; l < m_; ++l) {
      if (!p.is_eq(l)) {
        col(slack)[l] = 1.0;
        if (l != t_row) set_basic(slack, l);
        ++slack;
      } else if (l != t_row) {
        col(art)[l] = row_val[l] - t0 >= 0.0 ? 1.0 : -1.0;
        set_basic(art, l);
        ++art;
      }
    }
    set_basic(0, t_row);
    refactor();
  }

  double* col(int j) { return cols_.data() + static_cast<std::size_t>(j) * m_; }
  const double* col(int j) const { return cols_.data() + static_cast<std::size_t>(j) * m_; }

  void set_basic(int j, int row) {
    basis_[row] = j;
    pos_[j] = row;
    status_[j] = Status::Basic;
  }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case Status::AtLower: return lo_[j];
      case Status::AtUpper: return up_[j];
      default: return 0.0;
    }
  }

  double value_of(int j) const { return pos_[j] >= 0 ? xb_[pos_[j]] : nonbasic_value(j); }

  double reduced_cost(int j) const {
    const double* c = col(j);
    double d = cost_[j];
    for (int l = 0; l < m_; ++l) d -= y_[l] * c[l];
    return d;
  }

  void refactor() {
    RealMatrix B(m_, m_);
    for (int r = 0; r < m_; ++r) {
      const double* c = col(basis_[r]);
      for (int l = 0; l < m_; ++l) B(l, r) = c[l];
    }
    Eigen::PartialPivLU<RealMatrix> lu(B);
    binv_ = lu.inverse();
    since_refactor_ = 0;
  }

  // x_B = B^{-1} (rhs - sum_N col_j x_j);  y = B^{-T} c_B
  void compute_primal_dual() {
    work_ = rhs_;
    for (int j = 0; j < num_vars_; ++j) {
      if (pos_[j] >= 0) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      const double* c = col(j);
      for (int l = 0; l < m_; ++l) work_[l] -= c[l] * v;
    }
    xb_.assign(m_, 0.0);
    y_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      double acc = 0.0;
      for (int l = 0; l < m_; ++l) acc += binv_(r, l) * work_[l];
      xb_[r] = acc;
    }
    for (int l = 0; l < m_; ++l) {
      double acc = 0.0;
      for (int r = 0; r < m_; ++r) acc += cost_[basis_[r]] * binv_(r, l);
      y_[l] = acc;
    }
  }

  void iterate() {
    const int cap = 20000 + 200 * (m_ + num_vars_);
    for (;;) {
      if (iterations_ > cap) throw std::runtime_error("MaxMinBoxSolver: iteration cap exceeded");
      compute_primal_dual();

      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < num_vars_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
        const double d = reduced_cost(j);
        if (status_[j] == Status::AtLower && d > kCostTol) dir = 1.0;
        else if (status_[j] == Status::AtUpper && d < -kCostTol) dir = -1.0;
        else if (status_[j] == Status::FreeZero && std::abs(d) > kCostTol) dir = d > 0.0 ? 1.0 : -1.0;
        else continue;
        enter = j;
        break;
      }
      if (enter < 0) {
        if (since_refactor_ == 0) return;
        refactor();
        continue;
      }

      const double* a = col(enter);
      w_.assign(m_, 0.0);
      for (int r = 0; r < m_; ++r) {
        double acc = 0.0;
        for (int l = 0; l < m_; ++l) acc += binv_(r, l) * a[l];
        w_[r] = acc;
      }

      const double inf = std::numeric_limits<double>::infinity();
      double theta = inf;
      int leave_row = -1;
      bool leave_to_upper = false;
      for (int r = 0; r < m_; ++r) {
        const double rate = -dir * w_[r];
        const int jb = basis_[r];
        double limit = inf;
        bool to_upper = false;
        if (rate > kPivotTol && up_[jb] < inf) {
          limit = std::max(0.0, (up_[jb] - xb_[r]) / rate);
          to_upper = true;
        } else if (rate < -kPivotTol && lo_[jb] > -inf) {
          limit = std::max(0.0, (xb_[r] - lo_[jb]) / -rate);
        } else {
          continue;
        }
        const bool better = limit < theta - 1e-12;
        const bool tie = !better && limit <= theta + 1e-12 && leave_row >= 0 && jb < basis_[leave_row];
        if (better || tie) {
          theta = std::min(theta, limit);
          leave_row = r;
          leave_to_upper = to_upper;
        }
      }
      const double flip = up_[enter] - lo_[enter];
      ++iterations_;
      if (flip <= theta) {
        if (!(flip < inf)) throw std::runtime_error("MaxMinBoxSolver: unbounded direction");
        status_[enter] = dir > 0.0 ? Status::AtUpper : Status::AtLower;
        continue;
      }
      if (leave_row < 0) throw std::runtime_error("MaxMinBoxSolver: unbounded direction");

      const int leaving = basis_[leave_row];
      pos_[leaving] = -1;
      status_[leaving] = leave_to_upper ? Status::AtUpper : Status::AtLower;
      set_basic(enter, leave_row);
      pivot_inverse(leave_row);
      if (++since_refactor_ >= 40) refactor();
    }
  }

  void pivot_inverse(int r) {
    const double piv = w_[r];
    for (int l = 0; l < m_; ++l) binv_(r, l) /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || w_[i] == 0.0) continue;
      const double f = w_[i];
      for (int l = 0; l < m_; ++l) binv_(i, l) -= f * binv_(r, l);
    }
  }

  int m_ = 0, n_ = 0, num_vars_ = 0, slack_begin_ = 0, art_begin_ = 0, num_art_ = 0;
  int iterations_ = 0, since_refactor_ = 0;
  std::vector<double> cols_, lo_, up_, cost_, rhs_, work_, xb_, y_, w_;
  std::vector<Status> status_;
  std::vector<int> pos_, basis_;
  RealMatrix binv_;
};

inline LPSolution solve_maxmin_box(const MaxMinLP& p) {
  MaxMinBoxSolver solver;
  return solver.solve(p);
}

}  // namespace onebit
