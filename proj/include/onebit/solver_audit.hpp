#pragma once

#include <atomic>

namespace onebit {

/// Process-wide certification counters for the convex solvers. When enabled,
/// every LP solve is checked against its KKT conditions and every box-LS solve
/// against its optimality conditions; violations above the thresholds count
/// as failures.
struct SolverAudit {
  static constexpr double kLpTol = 1e-6;
  static constexpr double kLsTol = 1e-8;

  std::atomic<bool> enabled{false};
  std::atomic<long> lp_calls{0};
  std::atomic<long> lp_failures{0};
  std::atomic<long> ls_calls{0};
  std::atomic<long> ls_failures{0};
  std::atomic<double> lp_worst{0.0};
  std::atomic<double> ls_worst{0.0};

  void reset() {
    lp_calls = 0;
    lp_failures = 0;
    ls_calls = 0;
    ls_failures = 0;
    lp_worst = 0.0;
    ls_worst = 0.0;
  }

  void record_lp(double residual) {
    ++lp_calls;
    if (!(residual <= kLpTol)) ++lp_failures;
    raise(lp_worst, residual);
  }

  void record_ls(double residual) {
    ++ls_calls;
    if (!(residual <= kLsTol)) ++ls_failures;
    raise(ls_worst, residual);
  }

 private:
  static void raise(std::atomic<double>& slot, double v) {
    double cur = slot.load();
    while (v > cur && !slot.compare_exchange_weak(cur, v)) {
    }
  }
};

inline SolverAudit& solver_audit() {
  static SolverAudit audit;
  return audit;
}

}  // namespace onebit
