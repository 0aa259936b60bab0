// Acceptance check for the bump-channel convergence tables:
//
//  * gravity sweep: five row-gravity values across grids nx = 125/250/500;
//    convergence/divergence classification must match the recorded
//    reference cell-for-cell, and converged iteration counts must fall
//    within +-25% of the reference counts (the 0.07 row's single converged
//    cell is a qualitative target: classification is asserted, its count is
//    reported without a tolerance);
//  * family-parameter sweep at the symmetric-point gravity: rows
//    lambda in {-6, 0, 3} must converge on every grid with counts within
//    +-25% of the reference and identical across lambda; the lambda = 6.7
//    row's behaviour is recorded without assertion (its reference diverges
//    on the finest grid only via startup-transient amplification, which the
//    gentle ramped start here deliberately avoids).
//
// Prints one PASS/FAIL line per table; exits 0 only if all pass.
#include <swlbm/benchmarks.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

using namespace swlbm;
using namespace swlbm::bench;

namespace {

int failures = 0;

void report(bool ok, const std::string& label, const std::string& detail) {
  std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", label.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

bool within_band(long measured, long reference, double band) {
  return std::abs(double(measured) - double(reference)) <=
         band * double(reference);
}

void print_cell(const SweepCell& c) {
  std::printf("    row %-8g nx=%-4d %-9s %8ld steps (reference %s)\n",
              c.row_value, c.nx, c.converged ? "converged" : "diverged",
              c.iterations,
              c.reference > 0 ? std::to_string(c.reference).c_str()
                              : "diverged");
}

void gravity_table() {
  const auto rep = channel_gravity_sweep();
  long class_bad = 0, count_bad = 0, checked_counts = 0;
  for (const auto& c : rep.cells) {
    print_cell(c);
    const bool ref_converged = c.reference > 0;
    if (c.converged != ref_converged) ++class_bad;
    // The 0.07 row's converged cell is asserted by classification only.
    if (c.converged && ref_converged && c.row_value != 0.07) {
      ++checked_counts;
      if (!within_band(c.iterations, c.reference, 0.25)) ++count_bad;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "15 cells: %ld classification mismatches; %ld of %ld "
                "tolerance-checked counts outside +-25%%",
                class_bad, count_bad, checked_counts);
  report(class_bad == 0 && count_bad == 0 && checked_counts == 7,
         "channel gravity table", buf);
}

void lambda_table() {
  const auto rep = channel_lambda_sweep();
  long class_bad = 0, count_bad = 0, checked = 0, equal_bad = 0;
  std::map<int, long> first_count;  // per grid, from the first asserted row
  std::string recorded;
  for (const auto& c : rep.cells) {
    print_cell(c);
    if (c.row_value == 6.7) {
      // Recorded, not asserted.
      recorded += (recorded.empty() ? "" : ", ") + std::to_string(c.nx) +
                  (c.converged ? ":" + std::to_string(c.iterations)
                               : ":diverged");
      continue;
    }
    const bool ref_converged = c.reference > 0;
    if (c.converged != ref_converged) ++class_bad;
    if (c.converged && ref_converged) {
      ++checked;
      if (!within_band(c.iterations, c.reference, 0.25)) ++count_bad;
      auto [it, fresh] = first_count.try_emplace(c.nx, c.iterations);
      if (!fresh && it->second != c.iterations) ++equal_bad;
    }
  }
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "9 asserted cells: %ld classification mismatches, %ld "
                "counts outside +-25%%, %ld unequal across lambda; "
                "recorded lambda=6.7 row: %s",
                class_bad, count_bad, equal_bad, recorded.c_str());
  report(class_bad == 0 && count_bad == 0 && equal_bad == 0 && checked == 9,
         "channel family-parameter table", buf);
}

}  // namespace

int main() {
  gravity_table();
  lambda_table();
  return failures == 0 ? 0 : 1;
}
