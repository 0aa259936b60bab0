#pragma once
// Grid storage for the fully discrete solver: per-direction population
// planes, cell mask, bed topography and the depth fields used by the
// convergence monitor.
//
// Storage is plane-major: f[(i*ny + y)*nx + x], so each (direction, row)
// pair is a contiguous span; streaming then reduces to shifted row copies.
// Physical coordinates are cell-centered: x_i = (i + 1/2) dx.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"

namespace swlbm {

enum class Cell : std::uint8_t { Fluid = 0, Solid = 1 };

// Behaviour of one domain side.
enum class SideKind : std::uint8_t {
  Wall,             // no-slip: half-way bounce-back at the edge
  SlipWall,         // free-slip: zero-gradient copy from the inward neighbour
  Periodic,         // wraps during streaming; opposite side must match
  InflowDischarge,  // fixed unit-width discharge into the domain, depth
                    // extrapolated from the inward neighbour
  InflowDepth,      // prescribed depth signal h(t), velocity extrapolated
  OutflowDepth,     // prescribed depth, velocity extrapolated
  OutflowVelocity,  // prescribed velocity, depth extrapolated
};

struct SideSpec {
  SideKind kind = SideKind::Wall;
  double q = 0.0;  // InflowDischarge: unit-width discharge (m^2/s), positive
                   // into the domain
  double h = 0.0;  // OutflowDepth: prescribed depth
  Vec2 u{};        // OutflowVelocity: prescribed velocity
  std::function<double(double)> depth_signal;  // InflowDepth: h(t)
  // InflowDischarge startup: seconds over which the discharge rises
  // smoothly from 0 to q (cosine ramp). Starting a steady-flow case from
  // rest with the full discharge applied at once launches a bore whose
  // reflection can drive the flow transcritical; ramping keeps the startup
  // inside the subcritical family. 0 = no ramp.
  double ramp_time = 0.0;
};

struct Boundaries {
  SideSpec west, east, south, north;
};

struct DistributionField {
  VelocitySet vs;
  int nx = 0, ny = 0;
  double dx = 1.0, dt = 1.0;
  long step_count = 0;  // completed steps
  double time = 0.0;    // dt * step_count

  std::vector<Cell> cell;               // mask, y*nx + x
  std::vector<double> f, fpost;         // population planes
  std::vector<double> depth;            // h entering the current step
  std::vector<double> depth_prev;       // h entering the previous step
  std::vector<double> zb, dzx, dzy;     // bed elevation and slope

  size_t nidx(int x, int y) const { return size_t(y) * nx + x; }
  size_t fidx(int i, int x, int y) const {
    return (size_t(i) * ny + y) * nx + x;
  }
  bool fluid(int x, int y) const { return cell[nidx(x, y)] == Cell::Fluid; }

  double x_of(int i) const { return (i + 0.5) * dx; }
  double y_of(int j) const { return (j + 0.5) * dx; }

  MacroState macro(int x, int y) const {
    double loc[kMaxDirs];
    for (int i = 0; i < vs.n; ++i) loc[i] = f[fidx(i, x, y)];
    return moments(loc, vs);
  }
};

inline DistributionField make_field(Model model, double e, int nx, int ny,
                                    double dx) {
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("make_field: grid must be at least 3x3");
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw std::invalid_argument("make_field: dx must be positive");
  DistributionField F;
  F.vs = velocity_set(model, e);
  F.nx = nx;
  F.ny = ny;
  F.dx = dx;
  F.dt = dx / e;
  const size_t nn = size_t(nx) * ny;
  F.cell.assign(nn, Cell::Fluid);
  F.f.assign(size_t(F.vs.n) * nn, 0.0);
  F.fpost.assign(size_t(F.vs.n) * nn, 0.0);
  F.depth.assign(nn, 0.0);
  F.depth_prev.assign(nn, 0.0);
  F.zb.assign(nn, 0.0);
  F.dzx.assign(nn, 0.0);
  F.dzy.assign(nn, 0.0);
  return F;
}

// Bed topography and its slope. Interior nodes use centred differences;
// edges use one-sided second-order stencils. The expressions are built from
// explicit differences so a constant bed yields exactly zero slope, and in
// sign-symmetric form so that reversing the bed in x (or y) negates the
// slope bit for bit -- the solver's reflection-equivariance depends on it.
inline void set_bed(DistributionField& F,
                    const std::function<double(double, double)>& z) {
  const int nx = F.nx, ny = F.ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) F.zb[F.nidx(i, j)] = z(F.x_of(i), F.y_of(j));

  const double inv2 = 1.0 / (2.0 * F.dx);
  // One-sided forms: low edge  (4(z1-z0) - (z2-z0)) / (2 dx),
  //                  high edge ((zn3-zn1) - 4(zn2-zn1)) / (2 dx);
  // the second is the exact floating-point negation image of the first on
  // index-reversed data.
  for (int j = 0; j < ny; ++j) {
    const double* row = &F.zb[F.nidx(0, j)];
    double* gx = &F.dzx[F.nidx(0, j)];
    gx[0] = (4.0 * (row[1] - row[0]) - (row[2] - row[0])) * inv2;
    for (int i = 1; i < nx - 1; ++i) gx[i] = (row[i + 1] - row[i - 1]) * inv2;
    gx[nx - 1] = ((row[nx - 3] - row[nx - 1]) -
                  4.0 * (row[nx - 2] - row[nx - 1])) *
                 inv2;
  }
  for (int i = 0; i < nx; ++i) {
    auto zat = [&](int j) { return F.zb[F.nidx(i, j)]; };
    F.dzy[F.nidx(i, 0)] =
        (4.0 * (zat(1) - zat(0)) - (zat(2) - zat(0))) * inv2;
    for (int j = 1; j < ny - 1; ++j)
      F.dzy[F.nidx(i, j)] = (zat(j + 1) - zat(j - 1)) * inv2;
    F.dzy[F.nidx(i, ny - 1)] =
        ((zat(ny - 3) - zat(ny - 1)) - 4.0 * (zat(ny - 2) - zat(ny - 1))) *
        inv2;
  }
}

// Populate every fluid node with the equilibrium of (h0, u0); solid nodes
// carry zero populations. Resets the step counter and the depth history.
inline void initialize_equilibrium(DistributionField& F, const EqCoeffs& eq,
                                   const std::vector<double>& h0,
                                   const std::vector<Vec2>& u0) {
  const size_t nn = size_t(F.nx) * F.ny;
  if (h0.size() != nn || u0.size() != nn)
    throw std::invalid_argument("initialize_equilibrium: field size mismatch");
  if (eq.n != F.vs.n || eq.e != F.vs.e)
    throw std::invalid_argument(
        "initialize_equilibrium: equilibrium/velocity-set mismatch");
  std::fill(F.fpost.begin(), F.fpost.end(), 0.0);
  double loc[kMaxDirs];
  for (int y = 0; y < F.ny; ++y)
    for (int x = 0; x < F.nx; ++x) {
      const size_t n = F.nidx(x, y);
      F.depth[n] = h0[n];
      F.depth_prev[n] = h0[n];
      if (F.cell[n] != Cell::Fluid) {
        for (int i = 0; i < F.vs.n; ++i) F.f[F.fidx(i, x, y)] = 0.0;
        continue;
      }
      if (!(h0[n] > 0.0))
        throw std::invalid_argument(
            "initialize_equilibrium: fluid node with non-positive depth");
      equilibrium(eq, F.vs, {h0[n], u0[n]}, loc);
      for (int i = 0; i < F.vs.n; ++i) F.f[F.fidx(i, x, y)] = loc[i];
    }
  F.step_count = 0;
  F.time = 0.0;
}

}  // namespace swlbm
