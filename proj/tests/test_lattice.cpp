// Velocity sets, equilibrium families and their conserved-moment structure.
//
// The moment identities are checked by brute-force summation over the
// velocity set (the independent oracle), the Jacobian against central finite
// differences, and a handful of frozen closed-form values.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

#include "swlbm/lattice.hpp"
#include "test_util.hpp"

using namespace swlbm;
using Catch::Approx;

namespace {

const Family kFamilies[] = {Family::D2Q7, Family::D2Q9Salmon,
                            Family::D2Q9Lambda, Family::D2Q9Standard};

// Random spec + state with g inside the family's admissible range and a
// moderate velocity.
struct StateSample {
  EquilibriumSpec spec;
  MacroState st;
};

StateSample sample_state(std::mt19937_64& rng, Family family) {
  const double hbar = testutil::log_uniform(rng, 0.05, 60.0);
  double e = testutil::log_uniform(rng, 0.3, 300.0);
  if (family == Family::D2Q9Standard) e = 1.0;
  const double top = testutil::g_interval_top(family, hbar, e);
  const double g = top * testutil::uniform(rng, 1e-3, 0.999);
  const double lambda = testutil::uniform(rng, -8.0, 8.0);
  StateSample s;
  s.spec = make_spec(family, g, e, lambda);
  s.st.h = hbar;
  const double umag = testutil::uniform(rng, 0.0, 0.3 * e);
  const double ang = testutil::uniform(rng, 0.0, 2.0 * M_PI);
  s.st.u = {umag * std::cos(ang), umag * std::sin(ang)};
  return s;
}

}  // namespace

TEST_CASE("velocity sets: geometry and bookkeeping") {
  SECTION("nine-speed set at e = 15") {
    const VelocitySet vs = velocity_set(Model::D2Q9, 15.0);
    REQUIRE(vs.n == 9);
    CHECK(vs.xi[0].x == 0.0);
    CHECK(vs.xi[1].x == 15.0);
    CHECK(vs.xi[1].y == 0.0);
    CHECK(vs.xi[5].x == 15.0);
    CHECK(vs.xi[5].y == 15.0);
    CHECK(vs.xi[7].x == -15.0);
    CHECK(vs.xi[7].y == -15.0);
    CHECK(vs.cs2 == Approx(15.0 * 15.0 / 3.0));
  }

  SECTION("seven-speed set at e = 1: links at 60 degree spacing") {
    const VelocitySet vs = velocity_set(Model::D2Q7, 1.0);
    REQUIRE(vs.n == 7);
    CHECK(vs.xi[1].x == 1.0);
    CHECK(vs.xi[2].x == Approx(0.5));
    CHECK(vs.xi[2].y == Approx(std::sqrt(3.0) / 2.0));
    CHECK(vs.xi[4].x == -1.0);
    CHECK(vs.xi[6].y == Approx(-std::sqrt(3.0) / 2.0));
    CHECK(vs.cs2 == Approx(0.5));
    for (int i = 1; i < 7; ++i)
      CHECK(std::hypot(vs.xi[i].x, vs.xi[i].y) == Approx(1.0));
  }

  SECTION("opposites, mirrors and streaming offsets are consistent") {
    for (Model m : {Model::D2Q7, Model::D2Q9}) {
      const VelocitySet vs = velocity_set(m, 2.5);
      for (int i = 0; i < vs.n; ++i) {
        const int o = vs.opposite[i];
        CHECK(vs.opposite[o] == i);
        CHECK(vs.xi[o].x == Approx(-vs.xi[i].x).margin(1e-15));
        CHECK(vs.xi[o].y == Approx(-vs.xi[i].y).margin(1e-15));
        CHECK(vs.dx[o] == -vs.dx[i]);
        CHECK(vs.dy[o] == -vs.dy[i]);
        CHECK(vs.mirror_x[vs.mirror_x[i]] == i);
        CHECK(vs.mirror_y[vs.mirror_y[i]] == i);
        CHECK(vs.xi[vs.mirror_x[i]].x == Approx(-vs.xi[i].x).margin(1e-15));
        CHECK(vs.xi[vs.mirror_x[i]].y == Approx(vs.xi[i].y).margin(1e-15));
      }
      // Forcing weights: unit mass on moving links and the stated cs2.
      double wsum = 0.0, wxx = 0.0;
      for (int i = 0; i < vs.n; ++i) {
        wsum += vs.force_weight[i];
        wxx += vs.force_weight[i] * vs.xi[i].x * vs.xi[i].x;
      }
      CHECK(wsum == Approx(1.0).margin(m == Model::D2Q7 ? 1e-15 : 0.0));
      CHECK(wxx == Approx(vs.cs2));
    }
  }

  SECTION("argument validation") {
    CHECK_THROWS_AS(velocity_set(Model::D2Q9, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(velocity_set(Model::D2Q9, -2.0), std::invalid_argument);
  }
}

TEST_CASE("equilibrium: conserved-moment identities (brute-force oracle)") {
  std::mt19937_64 rng(20260818);
  for (Family family : kFamilies) {
    for (int trial = 0; trial < 200; ++trial) {
      const StateSample s = sample_state(rng, family);
      const VelocitySet vs = velocity_set(model_of(family), s.spec.e);
      const auto f = equilibrium(s.spec, s.st);

      double m0 = 0.0, m1x = 0.0, m1y = 0.0;
      Mat2 m2;
      for (int i = 0; i < vs.n; ++i) {
        m0 += f[i];
        m1x += f[i] * vs.xi[i].x;
        m1y += f[i] * vs.xi[i].y;
        m2.xx += f[i] * vs.xi[i].x * vs.xi[i].x;
        m2.xy += f[i] * vs.xi[i].x * vs.xi[i].y;
        m2.yy += f[i] * vs.xi[i].y * vs.xi[i].y;
      }
      const double h = s.st.h;
      const double g = s.spec.g;
      const double scale0 = h;
      const double scale1 = h * (std::abs(s.st.u.x) + std::abs(s.st.u.y)) +
                            h * s.spec.e * 1e-3;
      const double scale2 = 0.5 * g * h * h +
                            h * (s.st.u.x * s.st.u.x + s.st.u.y * s.st.u.y);
      INFO("family=" << family_name(family) << " trial=" << trial);
      REQUIRE(std::abs(m0 - h) <= 1e-13 * scale0);
      REQUIRE(std::abs(m1x - h * s.st.u.x) <= 1e-12 * scale1);
      REQUIRE(std::abs(m1y - h * s.st.u.y) <= 1e-12 * scale1);
      REQUIRE(std::abs(m2.xx - (0.5 * g * h * h + h * s.st.u.x * s.st.u.x)) <=
              1e-12 * scale2);
      REQUIRE(std::abs(m2.xy - h * s.st.u.x * s.st.u.y) <= 1e-12 * scale2);
      REQUIRE(std::abs(m2.yy - (0.5 * g * h * h + h * s.st.u.y * s.st.u.y)) <=
              1e-12 * scale2);
    }
  }
}

TEST_CASE("equilibrium: frozen rest-state values") {
  SECTION("nine-speed classical form at hbar=2, g=0.009, e=15") {
    const EquilibriumSpec s = make_spec(Family::D2Q9Salmon, 0.009, 15.0);
    const auto f = equilibrium(s, {2.0, {0.0, 0.0}});
    const double e2 = 225.0, gh2 = 0.009 * 4.0;
    CHECK(f[0] == Approx(2.0 - 5.0 * gh2 / (6.0 * e2)).epsilon(1e-14));
    for (int i = 1; i <= 4; ++i)
      CHECK(f[i] == Approx(gh2 / (6.0 * e2)).epsilon(1e-14));
    for (int i = 5; i <= 8; ++i)
      CHECK(f[i] == Approx(gh2 / (24.0 * e2)).epsilon(1e-14));
  }

  SECTION("seven-speed form at rest") {
    const EquilibriumSpec s = make_spec(Family::D2Q7, 0.3, 2.0);
    const auto f = equilibrium(s, {1.5, {0.0, 0.0}});
    const double e2 = 4.0, gh2 = 0.3 * 2.25;
    CHECK(f[0] == Approx(1.5 - gh2 / e2).epsilon(1e-14));
    for (int i = 1; i <= 6; ++i)
      CHECK(f[i] == Approx(gh2 / (6.0 * e2)).epsilon(1e-14));
  }

  SECTION("one-parameter family reduces to the classical form at lambda = 1") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      StateSample s = sample_state(rng, Family::D2Q9Salmon);
      EquilibriumSpec sl = s.spec;
      sl.family = Family::D2Q9Lambda;
      sl.lambda = 1.0;
      const auto fa = equilibrium(s.spec, s.st);
      const auto fb = equilibrium(sl, s.st);
      for (int i = 0; i < 9; ++i) REQUIRE(fa[i] == fb[i]);
    }
  }

  SECTION("standard family is the classical form pinned to e = 1") {
    const EquilibriumSpec a = make_spec(Family::D2Q9Standard, 0.2);
    const EquilibriumSpec b = make_spec(Family::D2Q9Salmon, 0.2, 1.0);
    const MacroState st{1.3, {0.08, -0.05}};
    const auto fa = equilibrium(a, st);
    const auto fb = equilibrium(b, st);
    for (int i = 0; i < 9; ++i) CHECK(fa[i] == fb[i]);
  }
}

TEST_CASE("equilibrium spec validation") {
  CHECK_THROWS_AS(make_spec(Family::D2Q9Salmon, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_spec(Family::D2Q9Salmon, -9.81, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_spec(Family::D2Q7, 0.1, -1.0), std::invalid_argument);
  // The standard family pins e = 1; a direct aggregate with e != 1 is invalid.
  EquilibriumSpec bad{Family::D2Q9Standard, 0.1, 2.0, 1.0};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK(make_spec(Family::D2Q9Standard, 0.1, 7.0).e == 1.0);
}

TEST_CASE("equilibrium Jacobian matches central finite differences") {
  std::mt19937_64 rng(123u);
  for (Family family : kFamilies) {
    for (int trial = 0; trial < 60; ++trial) {
      const StateSample s = sample_state(rng, family);
      const EqCoeffs c = eq_coeffs(s.spec);
      const VelocitySet vs = velocity_set(c.model, c.e);
      const int n = c.n;

      std::array<double, kMaxDirs * kMaxDirs> J{};
      equilibrium_jacobian(c, vs, s.st, J.data());

      std::array<double, kMaxDirs> base{};
      equilibrium(c, vs, s.st, base.data());

      const double eps = 1e-6 * s.st.h;
      for (int j = 0; j < n; ++j) {
        std::array<double, kMaxDirs> fp = base, fm = base;
        fp[j] += eps;
        fm[j] -= eps;
        std::array<double, kMaxDirs> gp{}, gm{};
        equilibrium(c, vs, moments(fp.data(), vs), gp.data());
        equilibrium(c, vs, moments(fm.data(), vs), gm.data());
        for (int i = 0; i < n; ++i) {
          const double fd = (gp[i] - gm[i]) / (2.0 * eps);
          INFO("family=" << family_name(family) << " trial=" << trial
                         << " i=" << i << " j=" << j);
          REQUIRE(J[i * n + j] == Approx(fd).epsilon(5e-5).margin(1e-7));
        }
      }
    }
  }
}

TEST_CASE("equilibrium Jacobian is a projection at every state") {
  std::mt19937_64 rng(99u);
  for (Family family : kFamilies) {
    for (int trial = 0; trial < 100; ++trial) {
      const StateSample s = sample_state(rng, family);
      const EqCoeffs c = eq_coeffs(s.spec);
      const VelocitySet vs = velocity_set(c.model, c.e);
      const int n = c.n;
      std::array<double, kMaxDirs * kMaxDirs> J{};
      equilibrium_jacobian(c, vs, s.st, J.data());
      double maxentry = 0.0, defect = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int k = 0; k < n; ++k) acc += J[i * n + k] * J[k * n + j];
          defect = std::max(defect, std::abs(acc - J[i * n + j]));
          maxentry = std::max(maxentry, std::abs(J[i * n + j]));
        }
      INFO("family=" << family_name(family) << " trial=" << trial);
      REQUIRE(defect <= 1e-12 * maxentry);
    }
  }
}

TEST_CASE("rest-state Jacobian rows: frozen closed forms") {
  const double hbar = 2.0, g = 0.009, e = 15.0, e2 = e * e;
  const EquilibriumSpec s = make_spec(Family::D2Q9Salmon, g, e);
  const EqCoeffs c = eq_coeffs(s);
  const VelocitySet vs = velocity_set(Model::D2Q9, e);
  std::array<double, 81> J{};
  equilibrium_jacobian(c, vs, {hbar, {0.0, 0.0}}, J.data());
  const double gh = g * hbar;
  for (int j = 0; j < 9; ++j)
    CHECK(J[j] == Approx(1.0 - 5.0 * gh / (3.0 * e2)).epsilon(1e-14));
  for (int i = 1; i <= 4; ++i)
    for (int j = 0; j < 9; ++j) {
      const double xx = vs.xi[i].x * vs.xi[j].x + vs.xi[i].y * vs.xi[j].y;
      CHECK(J[i * 9 + j] ==
            Approx(gh / (3.0 * e2) + xx / (3.0 * e2)).epsilon(1e-12));
    }
  for (int i = 5; i <= 8; ++i)
    for (int j = 0; j < 9; ++j) {
      const double xx = vs.xi[i].x * vs.xi[j].x + vs.xi[i].y * vs.xi[j].y;
      CHECK(J[i * 9 + j] ==
            Approx(gh / (12.0 * e2) + xx / (12.0 * e2)).epsilon(1e-12));
    }
}

TEST_CASE("moments: inverse of equilibrium, dry-node detection") {
  std::mt19937_64 rng(4242u);
  for (Family family : kFamilies) {
    for (int trial = 0; trial < 100; ++trial) {
      const StateSample s = sample_state(rng, family);
      const VelocitySet vs = velocity_set(model_of(family), s.spec.e);
      const auto f = equilibrium(s.spec, s.st);
      const MacroState back = moments(f.data(), vs);
      REQUIRE(back.h == Approx(s.st.h).epsilon(1e-13));
      REQUIRE(back.u.x == Approx(s.st.u.x).margin(1e-12 * s.spec.e));
      REQUIRE(back.u.y == Approx(s.st.u.y).margin(1e-12 * s.spec.e));
    }
  }
  const VelocitySet vs = velocity_set(Model::D2Q9, 1.0);
  std::array<double, 9> zero{};
  CHECK_THROWS_AS(moments(zero.data(), vs), std::domain_error);
  std::array<double, 9> neg{};
  neg.fill(-0.1);
  CHECK_THROWS_AS(moments(neg.data(), vs), std::domain_error);
  std::array<double, 9> nan{};
  nan.fill(std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(moments(nan.data(), vs), std::domain_error);
}

TEST_CASE("momentum flux at equilibrium equals pressure + advection tensor") {
  std::mt19937_64 rng(31337u);
  for (Family family : kFamilies) {
    for (int trial = 0; trial < 50; ++trial) {
      const StateSample s = sample_state(rng, family);
      const VelocitySet vs = velocity_set(model_of(family), s.spec.e);
      const auto f = equilibrium(s.spec, s.st);
      const Mat2 pi = momentum_flux(f.data(), vs);
      const double h = s.st.h, g = s.spec.g;
      const double press = 0.5 * g * h * h;
      const double scale =
          press + h * (s.st.u.x * s.st.u.x + s.st.u.y * s.st.u.y) + 1e-300;
      CHECK(std::abs(pi.xx - (press + h * s.st.u.x * s.st.u.x)) <=
            1e-12 * scale);
      CHECK(std::abs(pi.yy - (press + h * s.st.u.y * s.st.u.y)) <=
            1e-12 * scale);
      CHECK(std::abs(pi.xy - h * s.st.u.x * s.st.u.y) <= 1e-12 * scale);
      CHECK(pi.yx == pi.xy);
    }
  }
}
