#pragma once

#include "onebit/constellation.hpp"
#include "onebit/maxmin_lp.hpp"
#include "onebit/real_expansion.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace onebit {

/// Everything needed to evaluate the scaling coefficients Lambda = M x_E for
/// one channel use. Rows of M are ordered [alpha_1^A..alpha_K^A, alpha_1^B..alpha_K^B].
struct CIProblem {
  RealMatrix M;
  DacAlphabet dac;
  Modulation kind = Modulation::Psk;
  std::optional<QamPartition> partition;  // QAM only
  ComplexMatrix H;
  ComplexVector s;
  RealMatrix H_E;
  RealVector s_E;

  int users() const { return static_cast<int>(H.rows()); }
  int antennas() const { return static_cast<int>(H.cols()); }
  int dims() const { return 2 * antennas(); }
};

inline CIProblem build_M(const ComplexMatrix& H, const ComplexVector& s, const Constellation& c) {
  const Eigen::Index k = H.rows();
  const Eigen::Index nt = H.cols();
  if (k < 1 || nt < 1) throw std::invalid_argument("build_M: empty channel");
  if (s.size() != k) throw std::invalid_argument("build_M: symbol count must equal channel rows");

  CIProblem p;
  p.kind = c.kind();
  p.dac = DacAlphabet(static_cast<int>(nt));
  p.H = H;
  p.s = s;
  p.H_E = expand_channel(H);
  p.s_E = expand_vector(s);
  p.M.resize(2 * k, 2 * nt);
  for (Eigen::Index u = 0; u < k; ++u) {
    if (c.kind() == Modulation::Qam) c.index_of(s[u]);
    const SymbolDecomposition d = decompose(s[u], c);
    const double alpha0 = d.a.real() * d.b.imag() - d.a.imag() * d.b.real();
    if (std::abs(alpha0) < 1e-12) throw std::invalid_argument("build_M: degenerate symbol decomposition");
    // alpha^A = u^T [Re z; Im z], alpha^B = v^T [Re z; Im z] with z = h^T x.
    const double ua = d.b.imag() / alpha0, ub = -d.b.real() / alpha0;
    const double va = -d.a.imag() / alpha0, vb = d.a.real() / alpha0;
    const auto hr = H.row(u).real();
    const auto hi = H.row(u).imag();
    p.M.row(u).head(nt) = ua * hr + ub * hi;
    p.M.row(u).tail(nt) = -ua * hi + ub * hr;
    p.M.row(k + u).head(nt) = va * hr + vb * hi;
    p.M.row(k + u).tail(nt) = -va * hi + vb * hr;
  }
  if (c.kind() == Modulation::Qam) p.partition = partition_qam(s, c);
  return p;
}

inline RealVector scaling_vector(const CIProblem& p, const RealVector& x_e) {
  if (x_e.size() != p.M.cols()) throw std::invalid_argument("scaling_vector: dimension mismatch");
  return p.M * x_e;
}

/// min_l Lambda_l; larger is better.
inline double psk_objective(const RealVector& lambda) { return lambda.minCoeff(); }

/// ||s_E - beta H_E x_E||^2 + beta^2 K sigma^2
inline double mse_objective(const RealVector& x_e, double beta, const CIProblem& p, double sigma2) {
  return (p.s_E - beta * (p.H_E * x_e)).squaredNorm() + beta * beta * p.users() * sigma2;
}

/// The relaxed CI problem over the full box: inequality rows for PSK and QAM
/// outer coordinates, equality rows for QAM inner coordinates.
inline MaxMinLP relaxation_lp(const CIProblem& p) {
  MaxMinLP lp;
  lp.A = p.M;
  lp.offsets = RealVector::Zero(p.M.rows());
  lp.box = p.dac.scale();
  if (p.partition) {
    lp.eq_rows.assign(static_cast<std::size_t>(p.M.rows()), false);
    for (int l : p.partition->inner) lp.eq_rows[static_cast<std::size_t>(l)] = true;
  }
  return lp;
}

inline KktReport kkt_residuals(const RealVector& x_e, double t, const RealVector& beta, const RealVector& mu,
                               const RealVector& nu, const CIProblem& p) {
  return kkt_residuals(relaxation_lp(p), x_e, t, beta, mu, nu);
}

/// Numerical rank by singular-value thresholding.
inline int audit_rank(const RealMatrix& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(M);
  const RealVector sv = svd.singularValues();
  const double tol =
      static_cast<double>(std::max(M.rows(), M.cols())) * std::numeric_limits<double>::epsilon() * sv[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv[i] > tol ? 1 : 0;
  return rank;
}

struct BoundaryAudit {
  std::vector<int> interior;  // entries strictly inside the box
  int count = 0;
};

/// Entries of a box-feasible x_E whose magnitude is below scale - eps.
inline BoundaryAudit audit_boundary(const RealVector& x_e, const DacAlphabet& dac, double eps) {
  BoundaryAudit a;
  const double b = dac.scale();
  for (Eigen::Index n = 0; n < x_e.size(); ++n) {
    const double mag = std::abs(x_e[n]);
    if (mag > b + eps) throw std::invalid_argument("audit_boundary: entry outside the DAC box");
    if (mag < b - eps) a.interior.push_back(static_cast<int>(n));
  }
  a.count = static_cast<int>(a.interior.size());
  return a;
}

inline double default_boundary_eps(const DacAlphabet& dac) { return 1e-6 * dac.scale(); }

}  // namespace onebit
