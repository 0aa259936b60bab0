#pragma once
// Convergence and error metrics. All reductions use compensated (Kahan)
// summation in a fixed traversal order, so results are independent of
// thread count and reproducible run to run.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "field.hpp"

namespace swlbm {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Global relative change between two depth snapshots over the fluid mask:
// sqrt( sum_i ((h_i - h_i_prev) / h_i)^2 ), no node-count normalisation.
inline double global_relative_change(const std::vector<double>& h,
                                     const std::vector<double>& h_prev,
                                     const std::vector<Cell>& mask) {
  KahanSum acc;
  for (size_t i = 0; i < h.size(); ++i) {
    if (mask[i] != Cell::Fluid) continue;
    const double r = (h[i] - h_prev[i]) / h[i];
    acc.add(r * r);
  }
  return std::sqrt(acc.value());
}

// Relative L2 error of a numeric field against a reference:
// sqrt( sum |c - c_ref|^2 / sum |c_ref|^2 ).
inline double l2_relative_error(const std::vector<double>& c,
                                const std::vector<double>& c_ref) {
  KahanSum num, den;
  for (size_t i = 0; i < c.size(); ++i) {
    const double d = c[i] - c_ref[i];
    num.add(d * d);
    den.add(c_ref[i] * c_ref[i]);
  }
  return std::sqrt(num.value() / den.value());
}

// Masked variant: solid nodes are excluded from both sums.
inline double l2_relative_error(const std::vector<double>& c,
                                const std::vector<double>& c_ref,
                                const std::vector<Cell>& mask) {
  KahanSum num, den;
  for (size_t i = 0; i < c.size(); ++i) {
    if (mask[i] != Cell::Fluid) continue;
    const double d = c[i] - c_ref[i];
    num.add(d * d);
    den.add(c_ref[i] * c_ref[i]);
  }
  return std::sqrt(num.value() / den.value());
}

struct ErrorReport {
  double l2 = std::numeric_limits<double>::quiet_NaN();
  double linf = std::numeric_limits<double>::quiet_NaN();
  size_t nodes = 0;
};

inline ErrorReport error_report(const std::vector<double>& c,
                                const std::vector<double>& c_ref) {
  ErrorReport r;
  KahanSum num, den;
  double linf = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    const double d = c[i] - c_ref[i];
    num.add(d * d);
    den.add(c_ref[i] * c_ref[i]);
    linf = std::max(linf, std::abs(d));
  }
  r.l2 = std::sqrt(num.value() / den.value());
  r.linf = linf;
  r.nodes = c.size();
  return r;
}

// Column-wise unit-width discharge q(x) = mean over fluid rows of h*u_x.
// Columns with no fluid nodes yield NaN.
inline std::vector<double> discharge_profile(const DistributionField& F) {
  std::vector<double> q(F.nx, std::numeric_limits<double>::quiet_NaN());
  for (int x = 0; x < F.nx; ++x) {
    KahanSum s;
    int cnt = 0;
    for (int y = 0; y < F.ny; ++y) {
      if (!F.fluid(x, y)) continue;
      const MacroState m = F.macro(x, y);
      s.add(m.h * m.u.x);
      ++cnt;
    }
    if (cnt > 0) q[x] = s.value() / cnt;
  }
  return q;
}

// Total water volume over the fluid mask (for mass-conservation audits).
inline double total_volume(const DistributionField& F) {
  KahanSum s;
  for (int y = 0; y < F.ny; ++y)
    for (int x = 0; x < F.nx; ++x)
      if (F.fluid(x, y)) s.add(F.depth[F.nidx(x, y)]);
  return s.value() * F.dx * F.dx;
}

// Depth-weighted mass computed directly from the populations (independent
// of the depth cache refreshed during collision).
inline double total_population_mass(const DistributionField& F) {
  KahanSum s;
  double loc[kMaxDirs];
  for (int y = 0; y < F.ny; ++y)
    for (int x = 0; x < F.nx; ++x) {
      if (!F.fluid(x, y)) continue;
      for (int i = 0; i < F.vs.n; ++i) loc[i] = F.f[F.fidx(i, x, y)];
      double h = 0.0;
      for (int i = 0; i < F.vs.n; ++i) h += loc[i];
      s.add(h);
    }
  return s.value();
}

}  // namespace swlbm
