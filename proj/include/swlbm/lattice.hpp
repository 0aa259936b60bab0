#pragma once
// Velocity sets and local equilibrium families for shallow-water lattice
// Boltzmann models.
//
// Two velocity sets are provided: the nine-speed square-lattice set D2Q9
// (rest + 4 axis links + 4 diagonal links) and the seven-speed hexagonal set
// D2Q7 (rest + 6 links at 60 degree spacing). Equilibria are polynomials in
// the conserved pair (h, hu); every family satisfies the moment identities
//
//     sum_i feq_i             = h
//     sum_i feq_i xi_i        = h u
//     sum_i feq_i xi_i xi_i^T = (g h^2 / 2) I + h u u^T
//
// which tie the kinetic scheme to the shallow-water equations. The moment
// identities are the ground truth here: every family below is written so
// that brute-force summation over its velocity set reproduces them exactly.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swlbm {

inline constexpr int kMaxDirs = 9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class Model { D2Q7, D2Q9 };

// A discrete velocity set plus the bookkeeping the solver needs: integer
// streaming offsets on the storage grid, opposite/mirror direction maps and
// the weights used by the forcing term.
//
// D2Q9 ordering: 0 rest; 1..4 = +x, +y, -x, -y; 5..8 = (+,+), (-,+), (-,-),
// (+,-) diagonals. D2Q7 ordering: 0 rest; i = 1..6 at angle (i-1)*60deg.
// The hexagonal set streams on axial storage coordinates, i.e. row j is
// offset half a cell in physical space; the integer offsets below move
// populations to the correct hexagonal neighbour.
struct VelocitySet {
  Model model = Model::D2Q9;
  int n = 9;        // number of populations
  double e = 1.0;   // lattice speed dx/dt
  std::array<Vec2, kMaxDirs> xi{};
  std::array<int, kMaxDirs> dx{};        // streaming offset, storage grid
  std::array<int, kMaxDirs> dy{};
  std::array<int, kMaxDirs> opposite{};
  std::array<int, kMaxDirs> mirror_x{};  // direction after x -> -x reflection
  std::array<int, kMaxDirs> mirror_y{};  // direction after y -> -y reflection
  std::array<double, kMaxDirs> force_weight{};  // f*_i in the forcing term
  double cs2 = 0.0;  // sum_i f*_i xi_ix^2; normalises the forcing term
};

inline VelocitySet velocity_set(Model model, double e) {
  if (!(e > 0.0) || !std::isfinite(e))
    throw std::invalid_argument("velocity_set: lattice speed e must be positive");
  VelocitySet vs;
  vs.model = model;
  vs.e = e;
  if (model == Model::D2Q9) {
    vs.n = 9;
    const int ex[9] = {0, 1, 0, -1, 0, 1, -1, -1, 1};
    const int ey[9] = {0, 0, 1, 0, -1, 1, 1, -1, -1};
    for (int i = 0; i < 9; ++i) {
      vs.xi[i] = {e * ex[i], e * ey[i]};
      vs.dx[i] = ex[i];
      vs.dy[i] = ey[i];
    }
    vs.opposite = {0, 3, 4, 1, 2, 7, 8, 5, 6};
    vs.mirror_x = {0, 3, 2, 1, 4, 6, 5, 8, 7};
    vs.mirror_y = {0, 1, 4, 3, 2, 8, 7, 6, 5};
    vs.force_weight = {4.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
                       1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0};
    vs.cs2 = e * e / 3.0;
  } else {
    vs.n = 7;
    vs.xi[0] = {0.0, 0.0};
    for (int i = 1; i <= 6; ++i) {
      const double ang = (i - 1) * (M_PI / 3.0);
      vs.xi[i] = {e * std::cos(ang), e * std::sin(ang)};
    }
    // Exact values where cos/sin are +-1 or +-1/2 (avoid 6.1e-17 residue).
    vs.xi[1] = {e, 0.0};
    vs.xi[4] = {-e, 0.0};
    vs.xi[2].x = 0.5 * e;
    vs.xi[3].x = -0.5 * e;
    vs.xi[5].x = -0.5 * e;
    vs.xi[6].x = 0.5 * e;
    // Axial storage offsets: basis a1 = xi_1, a2 = xi_2.
    const int adx[7] = {0, 1, 0, -1, -1, 0, 1};
    const int ady[7] = {0, 0, 1, 1, 0, -1, -1};
    for (int i = 0; i < 7; ++i) {
      vs.dx[i] = adx[i];
      vs.dy[i] = ady[i];
    }
    vs.opposite = {0, 4, 5, 6, 1, 2, 3};
    vs.mirror_x = {0, 4, 3, 2, 1, 6, 5};
    vs.mirror_y = {0, 1, 6, 5, 4, 3, 2};
    vs.force_weight = {0.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0,
                       1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    vs.cs2 = e * e / 2.0;
  }
  return vs;
}

// Equilibrium families. D2Q9Lambda is a one-parameter family; D2Q9Salmon is
// its lambda = 1 member written in the classical form; D2Q9Standard is the
// same member with the lattice speed pinned to 1. D2Q7 is the hexagonal
// equilibrium.
enum class Family { D2Q7, D2Q9Salmon, D2Q9Lambda, D2Q9Standard };

inline Model model_of(Family f) {
  return f == Family::D2Q7 ? Model::D2Q7 : Model::D2Q9;
}

inline const char* family_name(Family f) {
  switch (f) {
    case Family::D2Q7: return "d2q7";
    case Family::D2Q9Salmon: return "d2q9-salmon";
    case Family::D2Q9Lambda: return "d2q9-lambda";
    case Family::D2Q9Standard: return "d2q9-standard";
  }
  return "?";
}

struct EquilibriumSpec {
  Family family = Family::D2Q9Salmon;
  double g = 9.81;      // gravitational acceleration, > 0
  double e = 1.0;       // lattice speed (D2Q9Standard requires e == 1)
  double lambda = 1.0;  // free parameter, used by D2Q9Lambda only
};

inline void validate(const EquilibriumSpec& s) {
  if (!(s.g > 0.0) || !std::isfinite(s.g))
    throw std::invalid_argument("EquilibriumSpec: g must be positive");
  if (!(s.e > 0.0) || !std::isfinite(s.e))
    throw std::invalid_argument("EquilibriumSpec: e must be positive");
  if (!std::isfinite(s.lambda))
    throw std::invalid_argument("EquilibriumSpec: lambda must be finite");
  if (s.family == Family::D2Q9Standard && s.e != 1.0)
    throw std::invalid_argument("EquilibriumSpec: the standard family fixes e = 1");
}

inline EquilibriumSpec make_spec(Family family, double g, double e = 1.0,
                                 double lambda = 1.0) {
  EquilibriumSpec s{family, g, e, lambda};
  if (family == Family::D2Q9Standard) s.e = 1.0;
  validate(s);
  return s;
}

struct MacroState {
  double h = 1.0;
  Vec2 u{};
};

// Per-direction polynomial coefficients of an equilibrium family:
//
//   feq_i = a_i h + b_i g h^2 + p_i h (xi_i.u) + q_i h (xi_i.u)^2 + r_i h |u|^2
//
// One coefficient table serves the equilibrium itself, its Jacobian in the
// conserved variables and the solver's collision kernel.
struct EqCoeffs {
  Model model = Model::D2Q9;
  int n = 9;
  double e = 1.0;
  double g = 9.81;
  std::array<double, kMaxDirs> a{}, b{}, p{}, q{}, r{};
};

inline EqCoeffs eq_coeffs(const EquilibriumSpec& s) {
  validate(s);
  EqCoeffs c;
  c.model = model_of(s.family);
  c.e = s.e;
  c.g = s.g;
  const double e2 = s.e * s.e;
  const double e4 = e2 * e2;
  if (c.model == Model::D2Q7) {
    c.n = 7;
    c.a[0] = 1.0;
    c.b[0] = -1.0 / e2;
    c.p[0] = 0.0;
    c.q[0] = 0.0;
    c.r[0] = -1.0 / e2;
    for (int i = 1; i <= 6; ++i) {
      c.a[i] = 0.0;
      c.b[i] = 1.0 / (6.0 * e2);
      c.p[i] = 1.0 / (3.0 * e2);
      c.q[i] = 2.0 / (3.0 * e4);
      c.r[i] = -1.0 / (6.0 * e2);
    }
  } else {
    c.n = 9;
    // lambda = 1 reproduces the classical nine-speed equilibrium.
    const double la = (s.family == Family::D2Q9Lambda) ? s.lambda : 1.0;
    c.a[0] = (8.0 + la) / 9.0;
    c.b[0] = -(4.0 + la) / (6.0 * e2);
    c.p[0] = 0.0;
    c.q[0] = 0.0;
    c.r[0] = -2.0 / (3.0 * e2);
    for (int i = 1; i <= 4; ++i) {
      c.a[i] = (1.0 - la) / 18.0;
      c.b[i] = (1.0 + la) / (12.0 * e2);
      c.p[i] = 1.0 / (3.0 * e2);
      c.q[i] = 1.0 / (2.0 * e4);
      c.r[i] = -1.0 / (6.0 * e2);
    }
    for (int i = 5; i <= 8; ++i) {
      c.a[i] = (la - 1.0) / 36.0;
      c.b[i] = (2.0 - la) / (24.0 * e2);
      c.p[i] = 1.0 / (12.0 * e2);
      c.q[i] = 1.0 / (8.0 * e4);
      c.r[i] = -1.0 / (24.0 * e2);
    }
  }
  return c;
}

// feq for one node. `out` must hold at least c.n entries.
inline void equilibrium(const EqCoeffs& c, const VelocitySet& vs,
                        const MacroState& st, double* out) {
  const double h = st.h;
  const double gh2 = c.g * h * h;
  const double usq = st.u.x * st.u.x + st.u.y * st.u.y;
  for (int i = 0; i < c.n; ++i) {
    const double d = vs.xi[i].x * st.u.x + vs.xi[i].y * st.u.y;
    out[i] = c.a[i] * h + c.b[i] * gh2 + c.p[i] * h * d + c.q[i] * h * (d * d) +
             c.r[i] * h * usq;
  }
}

inline std::array<double, kMaxDirs> equilibrium(const EquilibriumSpec& s,
                                                const MacroState& st) {
  std::array<double, kMaxDirs> out{};
  const EqCoeffs c = eq_coeffs(s);
  const VelocitySet vs = velocity_set(c.model, c.e);
  equilibrium(c, vs, st, out.data());
  return out;
}

// Jacobian d feq_i / d f_j through the conserved moments (h, hu). Writing
// feq_i as a function of m = h and momentum P = h u,
//
//   feq_i = a_i m + b_i g m^2 + p_i (xi_i.P) + q_i (xi_i.P)^2 / m + r_i |P|^2 / m
//
// and using d m / d f_j = 1, d P / d f_j = xi_j gives, with d_i = xi_i.u,
//
//   J_ij = a_i + 2 b_i g h - q_i d_i^2 - r_i |u|^2
//        + p_i (xi_i.xi_j) + 2 q_i d_i (xi_i.xi_j) + 2 r_i (u.xi_j).
//
// J is a projection (J^2 = J) for every state: it maps any population vector
// onto the equilibrium manifold's tangent space, which is 3-dimensional, so
// rank(J) = 3 and J - I has rank n - 3.
inline void equilibrium_jacobian(const EqCoeffs& c, const VelocitySet& vs,
                                 const MacroState& st, double* J) {
  const double h = st.h;
  const double usq = st.u.x * st.u.x + st.u.y * st.u.y;
  for (int i = 0; i < c.n; ++i) {
    const double di = vs.xi[i].x * st.u.x + vs.xi[i].y * st.u.y;
    const double base =
        c.a[i] + 2.0 * c.b[i] * c.g * h - c.q[i] * di * di - c.r[i] * usq;
    for (int j = 0; j < c.n; ++j) {
      const double xx = vs.xi[i].x * vs.xi[j].x + vs.xi[i].y * vs.xi[j].y;
      const double uxj = st.u.x * vs.xi[j].x + st.u.y * vs.xi[j].y;
      J[i * c.n + j] =
          base + c.p[i] * xx + 2.0 * c.q[i] * di * xx + 2.0 * c.r[i] * uxj;
    }
  }
}

// Conserved moments of a population vector. The sums are grouped so that
// reflecting the populations in x (or y) yields the exactly negated (resp.
// identical) momentum, bit for bit; the solver's reflection-equivariance
// guarantee rests on this.
//
// The unchecked variant performs no validation (h may come out non-positive
// or non-finite); the solver uses it on in-flight states and applies its own
// divergence handling. The public moments() throws on a dry/invalid node.
inline MacroState moments_unchecked(const double* f, const VelocitySet& vs) {
  MacroState st;
  double h, px, py;
  if (vs.model == Model::D2Q9) {
    h = f[0] + ((f[1] + f[3]) + (f[2] + f[4])) + ((f[5] + f[7]) + (f[6] + f[8]));
    px = (f[1] - f[3]) + ((f[5] - f[7]) + (f[8] - f[6]));
    py = (f[2] - f[4]) + ((f[5] - f[7]) + (f[6] - f[8]));
    px *= vs.e;
    py *= vs.e;
  } else {
    h = f[0] + (f[1] + f[4]) + ((f[2] + f[3]) + (f[5] + f[6]));
    const double s = 0.5 * vs.e;
    const double t = vs.xi[2].y;  // e * sqrt(3)/2
    px = vs.e * (f[1] - f[4]) + s * ((f[2] - f[3]) + (f[6] - f[5]));
    py = t * ((f[2] + f[3]) - (f[5] + f[6]));
  }
  st.h = h;
  st.u = {px / h, py / h};
  return st;
}

inline MacroState moments(const double* f, const VelocitySet& vs) {
  const MacroState st = moments_unchecked(f, vs);
  if (!(st.h > 0.0) || !std::isfinite(st.h))
    throw std::domain_error("moments: dry or invalid node (sum f <= 0)");
  return st;
}

struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

// Second moment sum_i f_i xi_i xi_i^T. At equilibrium this equals
// (g h^2 / 2) I + h u u^T, the shallow-water momentum flux.
inline Mat2 momentum_flux(const double* f, const VelocitySet& vs) {
  Mat2 m;
  for (int i = 0; i < vs.n; ++i) {
    m.xx += f[i] * vs.xi[i].x * vs.xi[i].x;
    m.xy += f[i] * vs.xi[i].x * vs.xi[i].y;
    m.yy += f[i] * vs.xi[i].y * vs.xi[i].y;
  }
  m.yx = m.xy;
  return m;
}

}  // namespace swlbm
