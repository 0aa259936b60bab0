#pragma once
// Depth-averaged body forces: bed slope, bed friction (constant drag or
// Manning roughness), wind stress at the free surface, and the Coriolis
// pseudo-force. All terms are per unit water density, i.e. the returned
// vector is the acceleration source h * (forcing per unit mass).

#include <cmath>

#include "lattice.hpp"

namespace swlbm {

// 2 * (earth angular velocity); multiply by sin(latitude) for the local
// Coriolis parameter.
inline constexpr double kTwoEarthOmega = 2.0 * 7.3e-5;

inline double coriolis_parameter(double latitude_rad) {
  return kTwoEarthOmega * std::sin(latitude_rad);
}

// Empirical surface drag coefficient for wind speed |w| (m/s) at 10 m.
inline double wind_drag_coefficient(double rho_air, double wind_speed) {
  return rho_air * (0.75 + 0.067 * wind_speed) * 1.0e-3;
}

struct ForceParams {
  double gravity = 9.81;
  double rho0 = 1000.0;      // water density (kg/m^3)
  double cb = 0.0;           // constant bed drag coefficient
  double manning_n = 0.0;    // Manning roughness; overrides cb when > 0
  Vec2 wind{};               // wind velocity at 10 m (m/s)
  double rho_air = 1.2;      // air density (kg/m^3)
  double coriolis = 0.0;     // Coriolis parameter (1/s)

  bool any() const {
    return cb != 0.0 || manning_n != 0.0 || coriolis != 0.0 ||
           wind.x != 0.0 || wind.y != 0.0;
  }
};

// Total force vector at one node. grad_z is the local bed slope. The bed
// and wind stresses enter divided by rho0, so rho0 itself cancels from the
// wind term and scales only external stress inputs (none here).
inline Vec2 force_vector(const MacroState& st, Vec2 grad_z,
                         const ForceParams& p) {
  const double g = p.gravity;
  double Fx = -g * st.h * grad_z.x;
  double Fy = -g * st.h * grad_z.y;

  double cb = p.cb;
  if (p.manning_n > 0.0)
    cb = g * p.manning_n * p.manning_n / std::cbrt(st.h);
  if (cb != 0.0) {
    const double umag = std::sqrt(st.u.x * st.u.x + st.u.y * st.u.y);
    Fx -= cb * st.u.x * umag;
    Fy -= cb * st.u.y * umag;
  }

  if (p.wind.x != 0.0 || p.wind.y != 0.0) {
    const double wmag =
        std::sqrt(p.wind.x * p.wind.x + p.wind.y * p.wind.y);
    const double cw = wind_drag_coefficient(p.rho_air, wmag);
    Fx += cw * p.wind.x * wmag;
    Fy += cw * p.wind.y * wmag;
  }

  if (p.coriolis != 0.0) {
    Fx -= p.coriolis * st.h * st.u.y;
    Fy += p.coriolis * st.h * st.u.x;
  }
  return {Fx, Fy};
}

}  // namespace swlbm
