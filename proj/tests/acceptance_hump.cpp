// Acceptance check for the bump-channel benchmark on the 500 x 50 grid at
// row gravity 0.009: the run must converge below the steady tolerance, the
// steady depth profile must match the subcritical energy-balance profile to
// 0.5% in relative L2, and the steady discharge must match the imposed
// inflow to 0.3% in relative L2 along the channel.
//
// Prints one PASS/FAIL line; exits 0 only if it passes.
#include <swlbm/benchmarks.hpp>

#include <cstdio>

using namespace swlbm;
using namespace swlbm::bench;

int main() {
  const double g_row = 0.009;
  const int nx = 500;
  auto ci = bump_channel_case(g_row, nx);
  const double g_phys = ci.plan.eq.g;
  auto r = run_to_steady(ci.field, ci.plan, 5e-6, 100000, 0);
  if (!r.converged) {
    std::printf(
        "[FAIL] bump-channel accuracy (500 x 50, row gravity %.3f) — did "
        "not converge: %ld steps, residual %.3e%s\n",
        g_row, r.iterations, r.final_residual,
        r.diverged ? ", diverged" : "");
    return 1;
  }
  const BumpAccuracy acc = bump_accuracy(ci.field, g_phys);
  const bool ok = r.final_residual < 5e-6 && acc.depth_l2 <= 5e-3 &&
                  acc.discharge_l2 <= 3e-3;
  std::printf(
      "[%s] bump-channel accuracy (500 x 50, row gravity %.3f) — converged "
      "in %ld steps (R = %.2e); depth L2 error %.3e (<= 5e-3); discharge "
      "L2 error %.3e (<= 3e-3); max discharge deviation %.3e\n",
      ok ? "PASS" : "FAIL", g_row, r.iterations, r.final_residual,
      acc.depth_l2, acc.discharge_l2, acc.discharge_max);
  return ok ? 0 : 1;
}
