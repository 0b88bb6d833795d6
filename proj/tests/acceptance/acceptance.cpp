// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// a subset of criteria by number; criterion 8 reports on whatever ran before it.

#include "onebit/onebit.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace onebit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 and 2 ----

struct AuditTotals {
  int instances = 0;
  int boundary_failures = 0;
  int rank_failures = 0;
  int solve_failures = 0;
  double seconds = 0.0;
};

AuditTotals& prop1_totals() {
  static AuditTotals t;
  static bool done = false;
  if (done) return t;
  done = true;
  const auto t0 = Clock::now();
  struct Size { int nt, k; };
  const Size sizes[] = {{8, 2}, {16, 4}, {32, 8}, {64, 16}};
  const char* mods[] = {"qpsk", "8psk", "16qam"};
  const int per_combo = 42;  // 12 combinations, 504 instances
  std::uint64_t seed = 1000;
  for (const Size& sz : sizes) {
    for (const char* m : mods) {
      const Constellation c = Constellation::parse(m);
      ++seed;
      for (int i = 0; i < per_combo; ++i) {
        const Frame f = gen_frame(sz.k, sz.nt, c, seed, static_cast<std::uint64_t>(i));
        ++t.instances;
        try {
          const CiRelaxation rel = relax_ci(f.H, f.s, c);
          if (rel.lp.status != LpStatus::Optimal) {
            ++t.solve_failures;
            continue;
          }
          const auto b = audit_boundary(rel.lp.x, rel.problem.dac, default_boundary_eps(rel.problem.dac));
          if (b.count > 2 * sz.k - 1) ++t.boundary_failures;
          if (audit_rank(rel.problem.M) != 2 * sz.k) ++t.rank_failures;
        } catch (const std::exception&) {
          ++t.solve_failures;
        }
      }
    }
  }
  t.seconds = seconds_since(t0);
  return t;
}

Outcome criterion1() {
  const AuditTotals& t = prop1_totals();
  Outcome o;
  o.pass = t.boundary_failures == 0 && t.solve_failures == 0 && t.instances >= 500 && t.seconds <= 600.0;
  o.detail = fmt("boundary audit count <= 2K-1 on %d/%d instances (%d solve failures), %.1f s",
                 t.instances - t.boundary_failures - t.solve_failures, t.instances, t.solve_failures, t.seconds);
  return o;
}

Outcome criterion2() {
  const AuditTotals& t = prop1_totals();
  int dup = 0, dup_rank_ok = 0, dup_bound_ok = 0;
  struct Size { int nt, k; };
  const Size sizes[] = {{8, 2}, {16, 4}, {32, 8}};
  const char* mods[] = {"qpsk", "8psk", "16qam"};
  for (int i = 0; i < 50; ++i) {
    const Size sz = sizes[i % 3];
    const Constellation c = Constellation::parse(mods[(i / 3) % 3]);
    Frame f = gen_frame(sz.k, sz.nt, c, 2000, static_cast<std::uint64_t>(i));
    f.H.row(1) = f.H.row(0);
    f.s[1] = f.s[0];
    ++dup;
    try {
      const CiRelaxation rel = relax_ci(f.H, f.s, c);
      const int rank_m = audit_rank(rel.problem.M);
      const int rank_h = static_cast<int>(Eigen::FullPivLU<ComplexMatrix>(f.H).setThreshold(1e-10).rank());
      if (rank_m < 2 * sz.k && rank_m == 2 * rank_h) ++dup_rank_ok;
      const auto b = audit_boundary(rel.lp.x, rel.problem.dac, default_boundary_eps(rel.problem.dac));
      if (b.count <= 2 * rank_h - 1) ++dup_bound_ok;
    } catch (const std::exception&) {
    }
  }
  Outcome o;
  o.pass = t.rank_failures == 0 && t.solve_failures == 0 && dup_rank_ok == dup && dup_bound_ok == dup;
  o.detail = fmt("rank(M) = 2K on %d/%d; duplicated user: rank(M) = 2rank(H) < 2K on %d/%d, count <= 2rank(H)-1 on %d/%d",
                 t.instances - t.rank_failures - t.solve_failures, t.instances, dup_rank_ok, dup, dup_bound_ok, dup);
  return o;
}

// ---- 3 ----

Outcome criterion3() {
  const double tol = 1e-12;
  int checks = 0, mismatches = 0;
  auto compare = [&](double a, double b) {
    ++checks;
    if (!(std::abs(a - b) <= tol)) ++mismatches;
  };
  const Constellation qpsk = Constellation::psk(4), qam = Constellation::qam(16);
  for (int nt : {4, 6, 8}) {
    for (int seed = 0; seed < 100; ++seed) {
      const Frame f = gen_frame(2, nt, qpsk, 3000 + static_cast<std::uint64_t>(nt), static_cast<std::uint64_t>(seed));
      const CiRelaxation rel = relax_ci(f.H, f.s, qpsk);
      double ref = 0.0;
      exhaustive_oracle(rel.problem, BBObjective::MaxMin, rel.split, 1.0, 0.0, &ref);
      compare(pbb_psk(rel.problem, rel.split, rel.x_quantized).objective, ref);

      const Frame g = gen_frame(2, nt, qam, 3100 + static_cast<std::uint64_t>(nt), static_cast<std::uint64_t>(seed));
      const CiRelaxation rq = relax_ci(g.H, g.s, qam);
      const double sigma2 = snr_to_sigma2(10.0);
      const double beta = compute_beta(rq.x_quantized, rq.problem, sigma2);
      exhaustive_oracle(rq.problem, BBObjective::Mse, rq.split, beta, sigma2, &ref);
      compare(pbb_qam_inner(rq.problem, beta, sigma2, rq.split, rq.x_quantized).objective, ref);
    }
  }
  for (int nt : {1, 2, 3}) {
    const int k = std::min(nt, 2);
    for (int seed = 0; seed < 100; ++seed) {
      const Frame f = gen_frame(k, nt, qpsk, 3200 + static_cast<std::uint64_t>(nt), static_cast<std::uint64_t>(seed));
      const CIProblem p = build_M(f.H, f.s, qpsk);
      double ref = 0.0;
      exhaustive_oracle(p, BBObjective::MaxMin, full_split(p.dims()), 1.0, 0.0, &ref);
      compare(fbb(p, BBObjective::MaxMin).objective, ref);

      const Frame g = gen_frame(k, nt, qam, 3300 + static_cast<std::uint64_t>(nt), static_cast<std::uint64_t>(seed));
      const CIProblem q = build_M(g.H, g.s, qam);
      const double sigma2 = 0.1, beta = 0.8;
      exhaustive_oracle(q, BBObjective::Mse, full_split(q.dims()), beta, sigma2, &ref);
      compare(fbb(q, BBObjective::Mse, beta, sigma2).objective, ref);
    }
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = fmt("%d/%d B&B optima equal the exhaustive optimum to 1e-12", checks - mismatches, checks);
  return o;
}

// ---- 4 and 7 ----

using Table = std::map<std::string, std::vector<BERRecord>>;

Table by_precoder(const std::vector<BERRecord>& recs) {
  Table t;
  for (const auto& r : recs) t[r.precoder].push_back(r);
  return t;
}

/// SNR where the curve first falls through `level`, interpolated linearly in log10(BER).
double crossing(const std::vector<BERRecord>& curve, double level) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double a = curve[i - 1].ber, b = curve[i].ber;
    if (a > level && b <= level) {
      if (b <= 0.0) return curve[i].snr_db;
      const double fa = std::log10(a), fb = std::log10(b), fl = std::log10(level);
      return curve[i - 1].snr_db + (fl - fa) / (fb - fa) * (curve[i].snr_db - curve[i - 1].snr_db);
    }
  }
  return std::nan("");
}

/// Counts SNR points where `better` exceeds `worse` by more than 3x the combined standard error.
int ordering_violations(const Table& t, const std::vector<std::string>& chain, std::string& where) {
  int v = 0;
  for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
    const auto& a = t.at(chain[c]);
    const auto& b = t.at(chain[c + 1]);
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double gap = a[j].ber - b[j].ber;
      const double se = std::sqrt(a[j].ber_stderr * a[j].ber_stderr + b[j].ber_stderr * b[j].ber_stderr);
      if (gap > 3.0 * se) {
        ++v;
        where += fmt(" %s>%s@%gdB", chain[c].c_str(), chain[c + 1].c_str(), a[j].snr_db);
      }
    }
  }
  return v;
}

Outcome criterion4() {
  SimConfig cfg;
  cfg.nt = 8;
  cfg.k = 2;
  cfg.modulation = "qpsk";
  cfg.trials = 100000;
  cfg.snr_db.clear();
  for (int s = 0; s <= 20; ++s) cfg.snr_db.push_back(s);
  cfg.precoders = {"zf-1bit", "ci-1bit", "opsu", "pbb", "fbb"};
  cfg.seed = 4;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = Clock::now();
  std::ostringstream log;
  const Table t = by_precoder(run_ber_sweep(cfg, log));
  const double secs = seconds_since(t0);
  const double xp = crossing(t.at("pbb"), 1e-3), xf = crossing(t.at("fbb"), 1e-3);
  std::string where;
  const int v = ordering_violations(t, {"pbb", "opsu", "ci-1bit", "zf-1bit"}, where);
  Outcome o;
  o.pass = std::isfinite(xp) && std::isfinite(xf) && std::abs(xp - xf) <= 1.0 && v == 0 && secs <= 1800.0 &&
           log.str().empty();
  o.detail = fmt("BER 1e-3 crossing P-BB %.2f dB, F-BB %.2f dB (shift %.2f dB); ordering violations %d%s; %.1f s",
                 xp, xf, std::abs(xp - xf), v, where.c_str(), secs);
  if (!log.str().empty()) o.detail += "; sweep log not empty";
  return o;
}

Outcome criterion7() {
  SimConfig cfg;
  cfg.nt = 32;
  cfg.k = 4;
  cfg.modulation = "16qam";
  cfg.trials = 10000;
  cfg.snr_db.clear();
  for (int s = 0; s <= 14; ++s) cfg.snr_db.push_back(s);
  cfg.precoders = {"ci-1bit", "opsu", "pbb"};
  cfg.seed = 7;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = Clock::now();
  std::ostringstream log;
  const Table t = by_precoder(run_ber_sweep(cfg, log));
  std::string where;
  const int v = ordering_violations(t, {"pbb", "opsu", "ci-1bit"}, where);
  Outcome o;
  o.pass = v == 0 && log.str().empty();
  o.detail = fmt("alt-opt P-BB <= OPSU <= CI 1-bit, violations %d%s; BER @14 dB %.2e / %.2e / %.2e; %.1f s", v,
                 where.c_str(), t.at("pbb").back().ber, t.at("opsu").back().ber, t.at("ci-1bit").back().ber,
                 seconds_since(t0));
  if (!log.str().empty()) o.detail += "; sweep log not empty";
  return o;
}

// ---- 5 ----

Outcome criterion5() {
  SimConfig cfg;
  cfg.nt = 8;
  cfg.modulation = "qpsk";
  cfg.trials = 50;
  cfg.k_values = {2, 3, 4};
  cfg.seed = 5;
  std::ostringstream log;
  const auto recs = run_node_count(cfg, log);
  std::map<int, std::map<std::string, NodeCountRecord>> by_k;
  for (const auto& r : recs) by_k[r.k][r.method] = r;
  bool pass = by_k.size() == 3;
  std::string detail;
  for (int k : cfg.k_values) {
    const auto& m = by_k[k];
    if (!m.count("pbb") || !m.count("fbb")) {
      pass = false;
      continue;
    }
    const auto& p = m.at("pbb");
    const auto& f = m.at("fbb");
    pass = pass && p.mean_nodes < f.mean_nodes && p.max_depth <= 2 * k - 1;
    detail += fmt(" K=%d: %.2f vs %.2f nodes, max depth %d;", k, p.mean_nodes, f.mean_nodes, p.max_depth);
  }
  return {pass, "mean nodes P-BB vs F-BB," + detail};
}

// ---- 6 ----

Outcome criterion6() {
  const Constellation c = Constellation::qam(16);
  const double sigma2 = snr_to_sigma2(10.0);
  AltOptOptions opt;
  opt.eps0 = 1e-3;
  opt.max_rounds = 100;
  int ok = 0, non_monotone = 0, capped = 0, max_rounds = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const Frame f = gen_frame(2, 8, c, 6, static_cast<std::uint64_t>(seed));
    const PrecodeResult r = alt_opt_pbb_qam(relax_ci(f.H, f.s, c), sigma2, opt);
    bool mono = true;
    for (std::size_t i = 1; i < r.mse_trace.size(); ++i) mono = mono && r.mse_trace[i] <= r.mse_trace[i - 1];
    non_monotone += !mono;
    capped += r.cap_reached;
    max_rounds = std::max(max_rounds, r.rounds);
    ok += mono && !r.cap_reached;
  }
  const Frame big = gen_frame(8, 64, c, 6, 0);
  const PrecodeResult rb = alt_opt_pbb_qam(relax_ci(big.H, big.s, c), sigma2, opt);
  Outcome o;
  o.pass = ok == 100 && !rb.cap_reached && rb.total_iterations <= 50;
  o.detail = fmt("8x2: %d/100 monotone and terminated (max %d rounds, %d non-monotone, %d capped); "
                 "64x8: %d total iterations, %s",
                 ok, max_rounds, non_monotone, capped, rb.total_iterations,
                 rb.cap_reached ? "round cap reached" : "terminated");
  return o;
}

// ---- 8 ----

Outcome criterion8() {
  const SolverAudit& a = solver_audit();
  Outcome o;
  o.pass = a.lp_calls > 0 && a.lp_failures == 0 && a.ls_failures == 0;
  o.detail = fmt("LP KKT <= 1e-6 on %ld/%ld solves (worst %.2e); box LS KKT <= 1e-8 on %ld/%ld (worst %.2e)",
                 a.lp_calls - a.lp_failures, a.lp_calls.load(), a.lp_worst.load(), a.ls_calls - a.ls_failures,
                 a.ls_calls.load(), a.ls_worst.load());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  auto wanted = [&](int n) { return only.empty() || only.count(n); };

  solver_audit().reset();
  solver_audit().enabled = true;

  using Fn = Outcome (*)();
  const std::pair<int, Fn> criteria[] = {{1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
                                         {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  int failed = 0;
  for (const auto& [n, fn] : criteria) {
    if (!wanted(n)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
