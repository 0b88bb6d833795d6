#include "onebit/ci_geometry.hpp"
#include "onebit/maxmin_lp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace onebit;

namespace {

ComplexMatrix rayleigh(int k, int nt, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix H(k, nt);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < nt; ++c) H(r, c) = Complex(g(rng), g(rng));
  return H;
}

ComplexVector random_symbols(int k, const Constellation& c, std::mt19937_64& rng) {
  ComplexVector s(k);
  for (int i = 0; i < k; ++i) s[i] = c.point(static_cast<int>(rng() % static_cast<unsigned>(c.order())));
  return s;
}

ComplexVector random_cvec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector x(n);
  for (int i = 0; i < n; ++i) x[i] = Complex(g(rng), g(rng));
  return x;
}

}  // namespace

TEST(BuildM, QpskClosedForm) {
  std::mt19937_64 rng(1);
  const auto c = Constellation::psk(4);
  const Complex s0(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const ComplexMatrix H = rayleigh(1, 5, rng);
  ComplexVector s(1);
  s << s0;
  const CIProblem p = build_M(H, s, c);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector x = random_cvec(5, rng);
    const Complex z = (H * x)[0];
    const RealVector lam = scaling_vector(p, expand_vector(x));
    EXPECT_NEAR(lam[0], std::sqrt(2.0) * z.real(), 1e-12);
    EXPECT_NEAR(lam[1], std::sqrt(2.0) * z.imag(), 1e-12);
  }
}

TEST(BuildM, SingleUserExactDelivery) {
  for (const auto& c : {Constellation::psk(4), Constellation::psk(8), Constellation::qam(16)}) {
    for (const auto& s0 : c.points()) {
      ComplexMatrix H(1, 1);
      H << Complex(1, 0);
      ComplexVector s(1);
      s << s0;
      const CIProblem p = build_M(H, s, c);
      const RealVector lam = scaling_vector(p, expand_vector(s));
      EXPECT_NEAR(lam[0], 1.0, 1e-12);
      EXPECT_NEAR(lam[1], 1.0, 1e-12);
    }
  }
}

TEST(BuildM, ReconstructionOracle) {
  std::mt19937_64 rng(2);
  for (const auto& c : {Constellation::psk(4), Constellation::psk(8), Constellation::psk(16), Constellation::qam(16),
                        Constellation::qam(64)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 1 + trial % 4, nt = k + 3;
      const ComplexMatrix H = rayleigh(k, nt, rng);
      const ComplexVector s = random_symbols(k, c, rng);
      const CIProblem p = build_M(H, s, c);
      ASSERT_EQ(p.M.rows(), 2 * k);
      ASSERT_EQ(p.M.cols(), 2 * nt);
      const ComplexVector x = random_cvec(nt, rng);
      const RealVector lam = scaling_vector(p, expand_vector(x));
      const ComplexVector hx = H * x;
      ComplexVector rebuilt(k);
      for (int u = 0; u < k; ++u) {
        const auto d = decompose(s[u], c);
        rebuilt[u] = lam[u] * d.a + lam[k + u] * d.b;
      }
      EXPECT_LE((rebuilt - hx).norm(), 1e-9);
    }
  }
}

TEST(BuildM, ExactDeliveryGivesOnes) {
  std::mt19937_64 rng(3);
  const auto c = Constellation::psk(8);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix H = rayleigh(3, 6, rng);
    const ComplexVector s = random_symbols(3, c, rng);
    const ComplexVector x = H.adjoint() * (H * H.adjoint()).lu().solve(s);
    const CIProblem p = build_M(H, s, c);
    EXPECT_LE((scaling_vector(p, expand_vector(x)) - RealVector::Ones(6)).norm(), 1e-9);
  }
}

TEST(BuildM, Errors) {
  std::mt19937_64 rng(4);
  const ComplexMatrix H = rayleigh(2, 4, rng);
  ComplexVector s(1);
  s << Complex(1, 0);
  EXPECT_THROW(build_M(H, s, Constellation::psk(4)), std::invalid_argument);
  ComplexVector off(2);
  off << Complex(0.3, 0.1), Complex(0.3, 0.1);
  EXPECT_THROW(build_M(H, off, Constellation::psk(4)), std::invalid_argument);
  EXPECT_THROW(build_M(H, off, Constellation::qam(16)), std::invalid_argument);
}

TEST(ScalingVector, ZeroLinearityMismatch) {
  std::mt19937_64 rng(5);
  const auto c = Constellation::psk(4);
  const CIProblem p = build_M(rayleigh(2, 4, rng), random_symbols(2, c, rng), c);
  EXPECT_EQ(scaling_vector(p, RealVector::Zero(8)), RealVector::Zero(4));
  const RealVector x = expand_vector(random_cvec(4, rng)), y = expand_vector(random_cvec(4, rng));
  EXPECT_LE((scaling_vector(p, x + y) - scaling_vector(p, x) - scaling_vector(p, y)).norm(), 1e-12);
  EXPECT_THROW(scaling_vector(p, RealVector::Zero(6)), std::invalid_argument);
}

TEST(Objectives, PskMin) {
  RealVector a(4), b(4);
  a << 1, 1, 1, 1;
  b << 0.5, -0.2, 1, 3;
  EXPECT_EQ(psk_objective(a), 1.0);
  EXPECT_EQ(psk_objective(b), -0.2);
}

TEST(Objectives, MseMatchesComplexForm) {
  std::mt19937_64 rng(6);
  const auto c = Constellation::qam(16);
  for (int trial = 0; trial < 30; ++trial) {
    const ComplexMatrix H = rayleigh(3, 5, rng);
    const ComplexVector s = random_symbols(3, c, rng);
    const CIProblem p = build_M(H, s, c);
    const ComplexVector x = random_cvec(5, rng);
    const double beta = 0.1 * trial, sigma2 = 0.05 * (trial % 7);
    const double direct = (s - beta * (H * x)).squaredNorm() + beta * beta * 3 * sigma2;
    EXPECT_NEAR(mse_objective(expand_vector(x), beta, p, sigma2), direct, 1e-10);
    EXPECT_NEAR(mse_objective(expand_vector(x), 0.0, p, sigma2), s.squaredNorm(), 1e-12);
  }
  const ComplexMatrix H = ComplexMatrix::Identity(2, 2);
  ComplexVector s(2);
  s << c.point(3), c.point(12);
  const CIProblem p = build_M(H, s, c);
  EXPECT_NEAR(mse_objective(expand_vector(s), 1.0, p, 0.0), 0.0, 1e-15);
}

TEST(AuditRank, GenericAndDeficient) {
  std::mt19937_64 rng(7);
  const auto c = Constellation::psk(4);
  const ComplexMatrix H = rayleigh(4, 16, rng);
  EXPECT_EQ(audit_rank(build_M(H, random_symbols(4, c, rng), c).M), 8);
  EXPECT_EQ(audit_rank(build_M(rayleigh(1, 3, rng), random_symbols(1, c, rng), c).M), 2);

  ComplexMatrix Hd = rayleigh(3, 8, rng);
  Hd.row(1) = Hd.row(0);
  ComplexVector s = random_symbols(3, c, rng);
  s[1] = s[0];
  const int r = audit_rank(build_M(Hd, s, c).M);
  EXPECT_LT(r, 6);
  Eigen::JacobiSVD<ComplexMatrix> svd(Hd);
  const auto sv = svd.singularValues();
  int rank_h = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank_h += sv[i] > 1e-10 * sv[0];
  EXPECT_EQ(r, 2 * rank_h);

  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 5;
    const ComplexMatrix G = rayleigh(k, 2 * k + 1, rng);
    EXPECT_EQ(audit_rank(build_M(G, random_symbols(k, Constellation::qam(16), rng), Constellation::qam(16)).M), 2 * k);
  }
}

TEST(AuditBoundary, Basics) {
  const DacAlphabet dac(8);
  std::mt19937_64 rng(8);
  const RealVector q = quantize_1bit(expand_vector(random_cvec(8, rng)), dac);
  EXPECT_EQ(audit_boundary(q, dac, default_boundary_eps(dac)).count, 0);
  RealVector x = q;
  x[3] = 0.0;
  x[5] = 0.5 * dac.scale();
  const auto a = audit_boundary(x, dac, default_boundary_eps(dac));
  EXPECT_EQ(a.interior, (std::vector<int>{3, 5}));
  x[1] = 1.01 * dac.scale();
  EXPECT_THROW(audit_boundary(x, dac, default_boundary_eps(dac)), std::invalid_argument);
}

TEST(AuditBoundary, LpSolutionsHaveFewInteriorEntries) {
  std::mt19937_64 rng(9);
  struct Case { int nt, k, trials; };
  for (Case cs : {Case{8, 2, 50}, Case{64, 16, 100}}) {
    for (const auto& c : {Constellation::psk(4), Constellation::qam(16)}) {
      for (int t = 0; t < cs.trials; ++t) {
        const CIProblem p = build_M(rayleigh(cs.k, cs.nt, rng), random_symbols(cs.k, c, rng), c);
        const LPSolution sol = solve_maxmin_box(relaxation_lp(p));
        ASSERT_EQ(sol.status, LpStatus::Optimal);
        EXPECT_LE(kkt_residuals(sol.x, sol.t, sol.beta, sol.mu, sol.nu, p).max(), 1e-6);
        EXPECT_LE(audit_boundary(sol.x, p.dac, default_boundary_eps(p.dac)).count, 2 * cs.k - 1);
      }
    }
  }
}

TEST(Kkt, HandBuiltToyIsExact) {
  const auto c = Constellation::psk(4);
  ComplexMatrix H(1, 1);
  H << Complex(1, 0);
  ComplexVector s(1);
  s << c.point(0);
  const CIProblem p = build_M(H, s, c);
  const double b = p.dac.scale();
  RealVector x(2);
  x << b * std::copysign(1.0, s[0].real()), b * std::copysign(1.0, s[0].imag());
  const RealVector lam = scaling_vector(p, x);
  ASSERT_NEAR(lam[0], lam[1], 1e-15);
  RealVector beta(2);
  beta << 0.5, 0.5;
  const RealVector g = p.M.transpose() * beta;
  const RealVector mu = g.cwiseMax(0.0), nu = (-g).cwiseMax(0.0);
  const KktReport r = kkt_residuals(x, lam.minCoeff(), beta, mu, nu, p);
  EXPECT_LE(r.max(), 1e-15);
}

TEST(Kkt, PerturbationIsDetected) {
  std::mt19937_64 rng(10);
  const auto c = Constellation::psk(4);
  for (int trial = 0; trial < 20; ++trial) {
    const CIProblem p = build_M(rayleigh(2, 8, rng), random_symbols(2, c, rng), c);
    const MaxMinLP lp = relaxation_lp(p);
    const LPSolution sol = solve_maxmin_box(lp);
    EXPECT_LE(kkt_residuals(lp, sol.x, sol.t, sol.beta, 1e-9).max(), 1e-6);
    // Move the lower-bound entry with the largest multiplier off its bound.
    int pick = -1;
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) {
      if (sol.x[i] <= -p.dac.scale() + 1e-12 && (pick < 0 || sol.nu[i] > sol.nu[pick])) pick = static_cast<int>(i);
    }
    ASSERT_GE(pick, 0);
    RealVector moved = sol.x;
    moved[pick] += 0.01;
    EXPECT_GT(kkt_residuals(lp, moved, sol.t, sol.beta, 1e-9).stationarity, 1e-3);
  }
}
