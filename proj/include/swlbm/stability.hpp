#pragma once
// Linear stability structure of the BGK collision operator at a rest state.
//
// At the constant state (hbar, u = 0) the collision Jacobian is
// J_f = (J - I)/tau with J = d feq/d f. Stability of the relaxation requires
// a positive diagonal weight B that symmetrises B J; then J_f is similar to
// a symmetric negative semi-definite matrix with spectrum {0 x3, -1/tau}.
// This header verifies those ingredients numerically for each equilibrium
// family, constructs the similarity explicitly, and exposes the closed-form
// admissible ranges of g for which the weight stays positive definite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace swlbm {

enum class Verdict { Stable, Indeterminate, Unstable };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Indeterminate: return "Indeterminate";
    case Verdict::Unstable: return "Unstable";
  }
  return "?";
}

// Thrown when a diagonal weight entry has a vanishing denominator (the state
// sits exactly on a pole of the closed-form weight).
struct SingularScalingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
// den = t1 + t2 with a relative singularity guard.
inline double guarded_ratio(double num, double t1, double t2,
                            const char* what) {
  const double den = t1 + t2;
  const double scale = std::abs(t1) + std::abs(t2);
  if (!(std::abs(den) > 1e-13 * scale))
    throw SingularScalingError(std::string("scaling weight singular: ") + what);
  return num / den;
}
}  // namespace detail

// Diagonal entries of the symmetrising weight for each family, closed form.
// Entries are finite but may be negative outside the admissible g range;
// exact poles raise SingularScalingError.
inline Eigen::VectorXd scaling_diagonal(const EquilibriumSpec& s, double hbar) {
  validate(s);
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw std::invalid_argument("scaling_diagonal: hbar must be positive");
  const double e2 = s.e * s.e;
  const double gh = s.g * hbar;
  if (s.family == Family::D2Q7) {
    Eigen::VectorXd d(7);
    d[0] = detail::guarded_ratio(e2, e2, -2.0 * gh, "e^2 - 2 g hbar");
    for (int i = 1; i <= 6; ++i) d[i] = 3.0 * e2 / gh;
    return d;
  }
  Eigen::VectorXd d(9);
  if (s.family == Family::D2Q9Lambda) {
    const double la = s.lambda;
    d[0] = detail::guarded_ratio(9.0 * e2, (8.0 + la) * e2,
                                 -3.0 * (4.0 + la) * gh,
                                 "(8+lambda) e^2 - 3 (4+lambda) g hbar");
    const double ax = detail::guarded_ratio(18.0 * e2, (1.0 - la) * e2,
                                            3.0 * (1.0 + la) * gh,
                                            "(1-lambda) e^2 + 3 (1+lambda) g hbar");
    const double di = detail::guarded_ratio(36.0 * e2, (la - 1.0) * e2,
                                            3.0 * (2.0 - la) * gh,
                                            "(lambda-1) e^2 + 3 (2-lambda) g hbar");
    for (int i = 1; i <= 4; ++i) d[i] = ax;
    for (int i = 5; i <= 8; ++i) d[i] = di;
  } else {
    d[0] = detail::guarded_ratio(3.0 * e2, 3.0 * e2, -5.0 * gh,
                                 "3 e^2 - 5 g hbar");
    for (int i = 1; i <= 4; ++i) d[i] = 3.0 * e2 / gh;
    for (int i = 5; i <= 8; ++i) d[i] = 12.0 * e2 / gh;
  }
  return d;
}

inline Eigen::MatrixXd scaling_matrix(const EquilibriumSpec& s, double hbar) {
  return scaling_diagonal(s, hbar).asDiagonal();
}

// Equilibrium Jacobian at an arbitrary state, as a dense matrix.
inline Eigen::MatrixXd equilibrium_jacobian_matrix(const EquilibriumSpec& s,
                                                   const MacroState& st) {
  const EqCoeffs c = eq_coeffs(s);
  const VelocitySet vs = velocity_set(c.model, c.e);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> J(c.n,
                                                                           c.n);
  equilibrium_jacobian(c, vs, st, J.data());
  return J;
}

struct StabilityReport {
  Verdict verdict = Verdict::Unstable;
  double hbar = 0.0, tau = 0.0, tol = 0.0;
  // ||J J - J||max / ||J||max: J must be a projection.
  double projection_defect = 0.0;
  // ||B J - (B J)^T||max / ||B J||max: the weight must symmetrise J.
  double symmetry_defect = 0.0;
  bool scaling_positive = false;  // all weight entries finite and > 0
  bool singular_scaling = false;  // weight hit an exact pole
  int jacobian_rank = 0;          // numerical rank of J (expected 3)
  int collision_rank = 0;         // numerical rank of J - I (expected n - 3)
  int modes_conserved = 0;        // eigenvalues of J_f at 0 (expected 3)
  int modes_relaxing = 0;         // eigenvalues of J_f at -1/tau (expected n-3)
  bool spectrum_ok = false;
  Eigen::VectorXd scaling;      // weight diagonal (empty when singular)
  Eigen::VectorXd eigenvalues;  // real parts of eig(J_f), ascending
};

// Full numerical audit of the stability structure at (hbar, 0). Computes all
// Jacobian-based quantities even when the scaling weight is singular; flags
// that case instead of throwing (verify_stability re-throws it).
inline StabilityReport analyze_stability(const EquilibriumSpec& s, double hbar,
                                         double tau, double tol = 1e-10) {
  validate(s);
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw std::invalid_argument("analyze_stability: hbar must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("analyze_stability: tau must be positive");
  if (!(tol > 0.0))
    throw std::invalid_argument("analyze_stability: tol must be positive");

  StabilityReport r;
  r.hbar = hbar;
  r.tau = tau;
  r.tol = tol;

  const MacroState rest{hbar, {0.0, 0.0}};
  const Eigen::MatrixXd J = equilibrium_jacobian_matrix(s, rest);
  const int n = static_cast<int>(J.rows());

  const double jmax = J.cwiseAbs().maxCoeff();
  r.projection_defect = (J * J - J).cwiseAbs().maxCoeff() / jmax;

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_j(J);
    const double smax = svd_j.singularValues()[0];
    r.jacobian_rank =
        (svd_j.singularValues().array() > 1e-9 * smax).count();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_c(
        Eigen::MatrixXd(J - Eigen::MatrixXd::Identity(n, n)));
    const double cmax = svd_c.singularValues()[0];
    r.collision_rank =
        (svd_c.singularValues().array() > 1e-9 * cmax).count();
  }

  // Spectrum of J_f = (J - I)/tau; multiplicities counted on tau*J_f with an
  // absolute 1e-8 window around 0 and -1.
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd re(n);
    for (int k = 0; k < n; ++k) {
      const std::complex<double> mu = (es.eigenvalues()[k] - 1.0);  // tau*J_f
      if (std::abs(mu) < 1e-8) ++r.modes_conserved;
      if (std::abs(mu + 1.0) < 1e-8) ++r.modes_relaxing;
      re[k] = mu.real() / tau;
    }
    std::sort(re.data(), re.data() + n);
    r.eigenvalues = re;
    r.spectrum_ok = (r.modes_conserved == 3) && (r.modes_relaxing == n - 3);
  }

  try {
    r.scaling = scaling_diagonal(s, hbar);
    r.scaling_positive = (r.scaling.array() > 0.0).all() &&
                         r.scaling.allFinite();
    const Eigen::MatrixXd BJ = r.scaling.asDiagonal() * J;
    const double bjmax = BJ.cwiseAbs().maxCoeff();
    r.symmetry_defect =
        (BJ - BJ.transpose()).cwiseAbs().maxCoeff() / bjmax;
  } catch (const SingularScalingError&) {
    r.singular_scaling = true;
    r.scaling_positive = false;
    r.symmetry_defect = std::numeric_limits<double>::quiet_NaN();
  }

  // Verdict. A failed positivity or a gross asymmetry is a genuine
  // structural failure; a defect inside [tol, 100 tol) sits in the guard
  // band where round-off near interval endpoints flips the test, and the
  // projection/spectrum checks can only fail through numerical trouble, so
  // both map to Indeterminate rather than a confident answer.
  if (r.singular_scaling || !r.scaling_positive) {
    r.verdict = Verdict::Unstable;
  } else if (r.symmetry_defect >= 100.0 * tol) {
    r.verdict = Verdict::Unstable;
  } else if (r.symmetry_defect >= tol) {
    r.verdict = Verdict::Indeterminate;
  } else if (r.projection_defect >= tol || !r.spectrum_ok) {
    r.verdict = Verdict::Indeterminate;
  } else {
    r.verdict = Verdict::Stable;
  }
  return r;
}

// As analyze_stability, but an exact pole of the weight propagates as
// SingularScalingError.
inline StabilityReport verify_stability(const EquilibriumSpec& s, double hbar,
                                        double tau, double tol = 1e-10) {
  StabilityReport r = analyze_stability(s, hbar, tau, tol);
  if (r.singular_scaling)
    throw SingularScalingError("verify_stability: scaling weight singular at this state");
  return r;
}

// Explicit stability structure: an invertible P with P^T P = diag(a) > 0 and
// P J_f = -diag(lam) P, lam = (0, 0, 0, 1/tau, ..., 1/tau).
struct StabilityStructure {
  Eigen::MatrixXd P;
  Eigen::VectorXd a;
  Eigen::VectorXd lam;
};

inline StabilityStructure construct_structure(const EquilibriumSpec& s,
                                              double hbar, double tau,
                                              double tol = 1e-10) {
  const StabilityReport r = verify_stability(s, hbar, tau, tol);
  if (r.verdict != Verdict::Stable)
    throw std::invalid_argument(
        std::string("construct_structure: state is not Stable (") +
        verdict_name(r.verdict) + ")");

  const MacroState rest{hbar, {0.0, 0.0}};
  const Eigen::MatrixXd J = equilibrium_jacobian_matrix(s, rest);
  const int n = static_cast<int>(J.rows());
  const Eigen::VectorXd b = r.scaling;
  const Eigen::VectorXd bs = b.cwiseSqrt();

  // K = I - J = -tau J_f. B K is symmetric, so S = B^1/2 K B^-1/2 is too.
  const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n, n) - J;
  Eigen::MatrixXd S =
      bs.asDiagonal() * K * bs.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("construct_structure: eigensolver failed");

  StabilityStructure st;
  st.P = es.eigenvectors().transpose() * bs.asDiagonal();
  st.a = b;
  st.lam = Eigen::VectorXd(n);
  for (int k = 0; k < n; ++k) {
    const double mu = es.eigenvalues()[k];  // ascending: 0 x3, 1 x(n-3)
    if (std::abs(mu) < 1e-8)
      st.lam[k] = 0.0;
    else if (std::abs(mu - 1.0) < 1e-8)
      st.lam[k] = 1.0 / tau;
    else
      st.lam[k] = mu / tau;  // unreachable for a Stable state
  }
  return st;
}

// Closed-form admissible range of g for each family: the set where the
// scaling weight is positive definite (and, for the one-parameter family
// away from lambda = 1, where the symmetry condition can hold at all, which
// collapses the range to the single point g = e^2 / (3 hbar)).
struct GInterval {
  bool is_point = false;
  double lo = 0.0, hi = 0.0;  // open interval (lo, hi) when !is_point
  double point = 0.0;
};

inline GInterval stable_g_interval(Family f, double hbar, double e,
                                   double lambda = 1.0) {
  if (!(hbar > 0.0) || !(e > 0.0))
    throw std::invalid_argument("stable_g_interval: hbar and e must be positive");
  GInterval gi;
  switch (f) {
    case Family::D2Q7:
      gi.hi = e * e / (2.0 * hbar);
      break;
    case Family::D2Q9Salmon:
    case Family::D2Q9Standard:
      gi.hi = 3.0 * e * e / (5.0 * hbar);
      break;
    case Family::D2Q9Lambda:
      if (lambda == 1.0) {
        gi.hi = 3.0 * e * e / (5.0 * hbar);
      } else {
        gi.is_point = true;
        gi.point = e * e / (3.0 * hbar);
      }
      break;
  }
  return gi;
}

// Five-speed square-lattice set: only its admissible bound is exposed (no
// equilibrium family is implemented for it).
inline GInterval stable_g_interval_d2q5(double hbar, double e) {
  if (!(hbar > 0.0) || !(e > 0.0))
    throw std::invalid_argument("stable_g_interval_d2q5: hbar and e must be positive");
  GInterval gi;
  gi.hi = e * e / (2.0 * hbar);
  return gi;
}

// Empirical limit observed for the fully discrete scheme in channel runs:
// g below 3/(5 e) keeps the benchmarks convergent. Dimensional rule of
// thumb, distinct from the structural interval above.
inline double empirical_discrete_g_limit(double e) { return 3.0 / (5.0 * e); }

// Parameter scan over (g, lambda) grids. Per-cell failures are recorded in
// the verdict column instead of being thrown.
struct ScanCell {
  double g = 0.0;
  double lambda = 0.0;
  std::string verdict;
  double projection_defect = 0.0;
  double symmetry_defect = 0.0;
  int rank = 0;  // numerical rank of J - I at rest
};

inline std::vector<ScanCell> scan(const EquilibriumSpec& base,
                                  const std::vector<double>& gs,
                                  const std::vector<double>& lambdas,
                                  double hbar, double tau, double tol = 1e-10) {
  std::vector<ScanCell> cells;
  cells.reserve(gs.size() * std::max<size_t>(1, lambdas.size()));
  const std::vector<double> las =
      lambdas.empty() ? std::vector<double>{base.lambda} : lambdas;
  for (double g : gs) {
    for (double la : las) {
      ScanCell cell;
      cell.g = g;
      cell.lambda = la;
      try {
        EquilibriumSpec s = base;
        s.g = g;
        s.lambda = la;
        const StabilityReport r = analyze_stability(s, hbar, tau, tol);
        cell.verdict =
            r.singular_scaling ? "SingularScaling" : verdict_name(r.verdict);
        cell.projection_defect = r.projection_defect;
        cell.symmetry_defect = r.symmetry_defect;
        cell.rank = r.collision_rank;
      } catch (const std::exception& ex) {
        cell.verdict = std::string("Error: ") + ex.what();
        cell.projection_defect = std::numeric_limits<double>::quiet_NaN();
        cell.symmetry_defect = std::numeric_limits<double>::quiet_NaN();
        cell.rank = -1;
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
  os << "g,lambda,verdict,projection_defect,symmetry_defect,rank\n";
  char buf[160];
  for (const ScanCell& c : cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", c.g, c.lambda);
    os << buf;
    // Verdicts are plain words except error texts; quote those per RFC 4180.
    if (c.verdict.find_first_of(",\"\n") != std::string::npos) {
      os << '"';
      for (char ch : c.verdict) {
        if (ch == '"') os << '"';
        os << ch;
      }
      os << '"';
    } else {
      os << c.verdict;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%d\n", c.projection_defect,
                  c.symmetry_defect, c.rank);
    os << buf;
  }
}

}  // namespace swlbm
