#pragma once

#include "onebit/bb.hpp"
#include "onebit/ci_geometry.hpp"
#include "onebit/constellation.hpp"
#include "onebit/maxmin_lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace onebit {

struct PrecodeResult {
  ComplexVector x;
  RealVector x_e;
  double beta = 1.0;
  double objective = 0.0;  // PSK: min_l Lambda_l (larger is better); QAM: MSE
  BBDiagnostics bb;
  int rounds = 0;            // alternating-optimization rounds (QAM)
  int total_iterations = 0;  // rounds plus P-BB levels over all rounds (QAM)
  std::vector<double> mse_trace;
  bool cap_reached = false;
};

/// beta = Re(x^H H^H s) / (||Hx||^2 + K sigma^2); 0 when the denominator vanishes.
inline double compute_beta(const ComplexVector& x, const ComplexMatrix& H, const ComplexVector& s, double sigma2) {
  const ComplexVector hx = H * x;
  const double den = hx.squaredNorm() + static_cast<double>(H.rows()) * sigma2;
  if (den <= 0.0) return 0.0;
  return hx.dot(s).real() / den;
}

/// Real-domain form: s_E^T H_E x_E / (||H_E x_E||^2 + K sigma^2).
inline double compute_beta_real(const RealVector& x_e, const RealMatrix& H_e, const RealVector& s_e, int users,
                                double sigma2) {
  const RealVector hx = H_e * x_e;
  const double den = hx.squaredNorm() + users * sigma2;
  if (den <= 0.0) return 0.0;
  return s_e.dot(hx) / den;
}

inline double compute_beta(const RealVector& x_e, const CIProblem& p, double sigma2) {
  return compute_beta_real(x_e, p.H_E, p.s_E, p.users(), sigma2);
}

/// Zero-forcing H^H (H H^H)^{-1} s at unit power, optionally 1-bit quantized.
inline PrecodeResult zf_precode(const ComplexMatrix& H, const ComplexVector& s, bool quantized) {
  if (H.rows() > H.cols()) throw std::invalid_argument("zf_precode: more users than antennas");
  const ComplexMatrix gram = H * H.adjoint();
  Eigen::FullPivLU<ComplexMatrix> lu(gram);
  lu.setThreshold(1e-10);
  if (lu.rank() < H.rows()) throw std::invalid_argument("zf_precode: channel is rank deficient");
  ComplexVector x = H.adjoint() * lu.solve(s);
  const double norm = x.norm();
  if (norm > 0.0) x /= norm;
  PrecodeResult r;
  if (quantized) x = quantize_1bit(x, DacAlphabet(static_cast<int>(H.cols())));
  r.x = x;
  r.x_e = expand_vector(x);
  return r;
}

/// Shared per-frame relaxation: the CI problem, its LP optimum (P3 for PSK,
/// P8 for QAM) and the resulting fixed/residual split.
struct CiRelaxation {
  CIProblem problem;
  LPSolution lp;
  RealVector x_quantized;
  SplitState split;
};

inline CiRelaxation relax_ci(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  CiRelaxation r;
  r.problem = build_M(H, s, c);
  r.lp = solve_maxmin_box(relaxation_lp(r.problem));
  if (r.lp.status != LpStatus::Optimal) throw std::runtime_error("relax_ci: relaxed CI problem is infeasible");
  r.x_quantized = quantize_1bit(r.lp.x, r.problem.dac);
  r.split = make_split(r.lp.x, r.problem.dac, default_boundary_eps(r.problem.dac));
  return r;
}

namespace detail {

inline PrecodeResult psk_result(const CIProblem& p, const RealVector& x_e) {
  PrecodeResult r;
  r.x_e = x_e;
  r.x = collapse(x_e);
  r.objective = psk_objective(p.M * x_e);
  return r;
}

inline PrecodeResult qam_result(const CIProblem& p, const RealVector& x_e, double sigma2) {
  PrecodeResult r;
  r.x_e = x_e;
  r.x = collapse(x_e);
  r.beta = compute_beta(x_e, p, sigma2);
  r.objective = mse_objective(x_e, r.beta, p, sigma2);
  return r;
}

/// Residual positions in descending gamma_k = min_l |M_R(l, k)|; stable on ties.
inline std::vector<int> opsu_order(const CIProblem& p, const SplitState& split) {
  const int n = split.residual_count();
  std::vector<double> gamma(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) gamma[k] = p.M.col(split.residual_idx[k]).cwiseAbs().minCoeff();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gamma[a] > gamma[b]; });
  return order;
}

}  // namespace detail

inline PrecodeResult ci_onebit_psk(const CiRelaxation& rel) { return detail::psk_result(rel.problem, rel.x_quantized); }

inline PrecodeResult ci_onebit_psk(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  return ci_onebit_psk(relax_ci(H, s, c));
}

inline PrecodeResult pbb_psk_precode(const CiRelaxation& rel, const BBOptions& opt = {}) {
  BBOutput out = pbb_psk(rel.problem, rel.split, rel.x_quantized, opt);
  PrecodeResult r = detail::psk_result(rel.problem, out.x_e);
  r.bb = std::move(out.diag);
  return r;
}

inline PrecodeResult pbb_psk_precode(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  return pbb_psk_precode(relax_ci(H, s, c));
}

inline PrecodeResult fbb_psk_precode(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  const CIProblem p = build_M(H, s, c);
  BBOutput out = fbb(p, BBObjective::MaxMin);
  PrecodeResult r = detail::psk_result(p, out.x_e);
  r.bb = std::move(out.diag);
  return r;
}

/// Single pass over the residual entries; each entry takes whichever sign
/// gives the larger min_l Lambda_l with all other entries at current values.
inline PrecodeResult opsu_psk(const CiRelaxation& rel) {
  const CIProblem& p = rel.problem;
  const double b = p.dac.scale();
  RealVector x = rel.x_quantized;
  RealVector lam = p.M * x;
  double best = lam.minCoeff();
  for (int k : detail::opsu_order(p, rel.split)) {
    const int n = rel.split.residual_idx[k];
    for (double v : {-b, b}) {
      if (v == x[n]) continue;
      const RealVector cand = lam + p.M.col(n) * (v - x[n]);
      const double obj = cand.minCoeff();
      if (obj > best) {
        best = obj;
        lam = cand;
        x[n] = v;
      }
    }
  }
  return detail::psk_result(p, x);
}

inline PrecodeResult opsu_psk(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  return opsu_psk(relax_ci(H, s, c));
}

inline PrecodeResult ci_onebit_qam(const CiRelaxation& rel, double sigma2) {
  return detail::qam_result(rel.problem, rel.x_quantized, sigma2);
}

inline PrecodeResult ci_onebit_qam(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c,
                                   double sigma2) {
  return ci_onebit_qam(relax_ci(H, s, c), sigma2);
}

/// Sequential update over the residual entries, recomputing beta for each candidate.
inline PrecodeResult opsu_qam(const CiRelaxation& rel, double sigma2) {
  const CIProblem& p = rel.problem;
  const double b = p.dac.scale();
  RealVector x = rel.x_quantized;
  double best = mse_objective(x, compute_beta(x, p, sigma2), p, sigma2);
  for (int k : detail::opsu_order(p, rel.split)) {
    const int n = rel.split.residual_idx[k];
    const double current = x[n];
    double keep = current;
    for (double v : {-b, b}) {
      if (v == current) continue;
      x[n] = v;
      const double mse = mse_objective(x, compute_beta(x, p, sigma2), p, sigma2);
      if (mse < best) {
        best = mse;
        keep = v;
      }
    }
    x[n] = keep;
  }
  return detail::qam_result(p, x, sigma2);
}

inline PrecodeResult opsu_qam(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c, double sigma2) {
  return opsu_qam(relax_ci(H, s, c), sigma2);
}

enum class InnerSearch { PartialBB, FullBB };

struct AltOptOptions {
  double eps0 = 1e-3;
  int max_rounds = 100;
  InnerSearch inner = InnerSearch::PartialBB;
};

/// Alternates the closed-form beta with an exact 1-bit search at fixed beta
/// until the MSE changes by at most eps0.
inline PrecodeResult alt_opt_pbb_qam(const CiRelaxation& rel, double sigma2, const AltOptOptions& opt = {}) {
  if (!(opt.eps0 > 0.0)) throw std::invalid_argument("alt_opt_pbb_qam: eps0 must be positive");
  const CIProblem& p = rel.problem;
  RealVector x = rel.x_quantized;
  double mse = mse_objective(x, compute_beta(x, p, sigma2), p, sigma2);
  PrecodeResult r;
  r.mse_trace.push_back(mse);
  int levels = 0;
  bool converged = false;
  for (r.rounds = 0; r.rounds < opt.max_rounds;) {
    const double beta = compute_beta(x, p, sigma2);
    BBOutput out = opt.inner == InnerSearch::PartialBB ? pbb_qam_inner(p, beta, sigma2, rel.split, x)
                                                       : fbb(p, BBObjective::Mse, beta, sigma2, &x);
    ++r.rounds;
    levels += out.diag.depth_iterations;
    r.bb.nodes_visited += out.diag.nodes_visited;
    r.bb.expansions += out.diag.expansions;
    r.bb.depth_iterations = std::max(r.bb.depth_iterations, out.diag.depth_iterations);
    r.bb.ub_trace.insert(r.bb.ub_trace.end(), out.diag.ub_trace.begin(), out.diag.ub_trace.end());
    x = out.x_e;
    const double next = out.objective;
    r.mse_trace.push_back(next);
    const bool done = std::abs(next - mse) <= opt.eps0;
    mse = next;
    if (done) {
      converged = true;
      break;
    }
  }
  const PrecodeResult final_point = detail::qam_result(p, x, sigma2);
  r.x = final_point.x;
  r.x_e = final_point.x_e;
  r.beta = final_point.beta;
  r.objective = final_point.objective;
  r.cap_reached = !converged;
  r.total_iterations = r.rounds + levels;
  return r;
}

inline PrecodeResult alt_opt_pbb_qam(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c,
                                     double sigma2, double eps0) {
  AltOptOptions opt;
  opt.eps0 = eps0;
  return alt_opt_pbb_qam(relax_ci(H, s, c), sigma2, opt);
}

}  // namespace onebit
