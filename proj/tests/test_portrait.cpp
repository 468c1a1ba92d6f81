#include <doctest.h>

#include <cmath>
#include <numbers>

#include "euler2c/errors.hpp"
#include "euler2c/portrait.hpp"
#include "support.hpp"

using namespace euler2c;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ehat0 special values and symmetry") {
  CHECK(ehat0(0.7, 1.0, 1.3) == 1.0);
  CHECK(ehat0(2.1, -1.0, 0.4) == 1.0);
  CHECK(ehat0(kPi, 0.0, 1.7) == -1.7);
  CHECK(ehat0(0.0, std::sqrt(0.75), 1.0) == doctest::Approx(1.25).epsilon(1e-15));
  for (double g : {0.2, 1.0, 2.9}) {
    CHECK(ehat0(g, 0.3, 0.8) == doctest::Approx(ehat0(kPi - g, 0.3, -0.8)).epsilon(1e-15));
  }
}

TEST_CASE("critical points") {
  auto p = critical_points(1.0);
  REQUIRE(p.size() == 3);
  CHECK(p[0].value == -1.0);
  CHECK(p[0].kind == CriticalKind::kMin);
  CHECK(p[1].value == 1.0);
  CHECK(p[1].kind == CriticalKind::kSaddle);
  CHECK(p[2].value == 1.25);
  CHECK(p[2].kind == CriticalKind::kMax);
  for (const auto& c : p) CHECK(ehat0(c.gbar, c.Ghat, 1.0) == doctest::Approx(c.value).epsilon(1e-15));

  p = critical_points(3.0);
  REQUIRE(p.size() == 2);
  CHECK(p[1].value == 3.0);
  CHECK(p[1].kind == CriticalKind::kMax);

  p = critical_points(2.0);
  REQUIRE(p.size() == 2);
  CHECK(p[1].kind == CriticalKind::kDegenerate);

  p = critical_points(1e-6);
  CHECK(p[1].value == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(p[2].value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(critical_points(0.0), DomainError);
}

TEST_CASE("g roots") {
  GRoots g = g_roots(1.0, 1.0);
  CHECK(g.Gp2 == doctest::Approx(1.0));
  CHECK(g.Gm2 == doctest::Approx(0.0));
  g = g_roots(1.0 - 1e-12, 1.0);
  CHECK(g.Gmax * g.Gmax == doctest::Approx(1.0).epsilon(1e-6));
  for (double d : {0.5, 1.5}) {
    const double top = 1.0 + 0.25 * d * d;
    g = g_roots(top, d);
    CHECK(g.Gp2 == doctest::Approx(1.0 - 0.25 * d * d));
    CHECK(g.Gm2 == doctest::Approx(1.0 - 0.25 * d * d));
    g = g_roots(d, d);
    CHECK(g.Gmax * g.Gmax == doctest::Approx(d * (2.0 - d)));
    CHECK(g.Gmin == 0.0);
  }
  CHECK_THROWS_AS(g_roots(5.0, 2.5), DomainError);
  CHECK_THROWS_AS(g_roots(-3.0, 2.5), DomainError);
}

TEST_CASE("level branches") {
  auto [gp, gm] = level_branch(0.0, 1.0, 0.0);
  CHECK(gp == doctest::Approx(kPi / 2));
  CHECK(gm == doctest::Approx(3 * kPi / 2));
  CHECK(ehat0(gp, 0.0, 1.0) == doctest::Approx(0.0));

  // Lower endpoint for |Ê| <= δ.
  CHECK(level_branch(0.3, 0.8, 0.0).first == doctest::Approx(std::acos(0.3 / 0.8)));
  // Upper endpoint for Ê < 1, = 1, > 1.
  CHECK(level_branch(0.3, 0.8, g_roots(0.3, 0.8).Gmax).first == kPi);
  CHECK(level_branch(1.0, 0.8, 1.0).first == kPi / 2);
  CHECK(level_branch(1.1, 0.8, g_roots(1.1, 0.8).Gmax).first == 0.0);

  CHECK_THROWS_AS(level_branch(0.3, 0.8, 0.99), DomainError);
  // Ê > δ: the band excludes Ĝ = 0.
  CHECK_THROWS_AS(level_branch(1.1, 0.8, 0.0), DomainError);
}

TEST_CASE("sampled level curves lie on their level") {
  for (double d : {0.5, 1.0, 1.5, 3.0}) {
    const auto [lo, hi] = level_range(d);
    for (int j = 0; j <= 40; ++j) {
      const double e = lo + (hi - lo) * j / 40.0;
      for (const CurvePoint& p : sample_level(e, d, 64)) {
        CHECK(std::abs(ehat0(p.gbar, p.Ghat, d) - e) < 1e-12);
      }
    }
  }
}

TEST_CASE("branch slope matches finite differences") {
  for (double d : {0.5, 1.5}) {
    for (double e : {-0.3 * d, 0.5 * (d + 1.0), 1.05}) {
      if (e > level_range(d).second) continue;
      const GRoots g = g_roots(e, d);
      for (int k = 1; k < 10; ++k) {
        const double G = g.Gmin + (g.Gmax - g.Gmin) * (0.1 + 0.08 * k);
        const double h = 1e-7;
        const double fd =
            (level_branch(e, d, G + h).first - level_branch(e, d, G - h).first) / (2.0 * h);
        const double an = level_branch_slope(e, d, G);
        CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
      }
    }
  }
}

TEST_CASE("branch extremum at sqrt(2 - E) and monotonicity below 1") {
  const double d = 1.0, e = 1.1;
  const double G0 = std::sqrt(2.0 - e);
  const GRoots g = g_roots(e, d);
  REQUIRE(G0 > g.Gmin);
  REQUIRE(G0 < g.Gmax);
  CHECK(std::abs(level_branch_slope(e, d, G0)) < 1e-12);
  CHECK(level_branch_slope(e, d, G0 - 1e-3) * level_branch_slope(e, d, G0 + 1e-3) < 0.0);

  for (double ee : {-0.2, 0.4, 0.9}) {
    const GRoots gg = g_roots(ee, d);
    double prev = -1.0;
    for (int k = 0; k <= 1000; ++k) {
      const double G = gg.Gmin + (gg.Gmax - gg.Gmin) * k / 1000.0;
      const double gp = level_branch(ee, d, G).first;
      CHECK(gp >= prev);
      prev = gp;
    }
  }
}

TEST_CASE("separatrices") {
  Separatrices s = separatrices(0.5, 101);
  CHECK(s.has_s0);
  bool found = false;
  for (const CurvePoint& p : s.s1) {
    if (p.branch == 2 && p.gbar == 0.0) {
      CHECK(p.Ghat == doctest::Approx(std::sqrt(0.75)));
      found = true;
    }
  }
  CHECK(found);
  for (const CurvePoint& p : s.s0) CHECK(std::abs(ehat0(p.gbar, p.Ghat, 0.5) - 0.5) < 1e-12);
  // S1 vertical branches lie on the level 1.
  for (const CurvePoint& p : s.s1) CHECK(std::abs(ehat0(p.gbar, p.Ghat, 0.5) - 1.0) < 1e-12);

  s = separatrices(3.0, 101);
  CHECK_FALSE(s.has_s0);
  CHECK(s.s0.empty());
  for (const CurvePoint& p : s.s1) {
    if (p.branch >= 2) {
      CHECK(std::cos(p.gbar) >= 0.0);
      CHECK(std::cos(p.gbar) <= 1.0 / 3.0 + 1e-12);
    }
  }
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(0.5, 0.9).tag() == "1_3");
  CHECK(classify_regime(1.5, 1.2).tag() == "2_3");
  CHECK(classify_regime(3.0, 2.0).tag() == "3_3");
  CHECK(classify_regime(0.5, -0.5).curve == CurveIdentity::kMin);
  CHECK(classify_regime(0.5, 0.5).curve == CurveIdentity::kS0);
  RegimeLabel l = classify_regime(0.5, 1.0);
  CHECK(l.tag() == "1_4");
  CHECK(l.curve == CurveIdentity::kS1);
  CHECK_FALSE(l.note.empty());
  CHECK(classify_regime(0.5, 1.0625).curve == CurveIdentity::kMax);
  CHECK(classify_regime(1.5, 1.55).tag() == "2_5");
  CHECK(classify_regime(2.0, 2.0).curve == CurveIdentity::kSaddle);
  CHECK(classify_regime(3.0, 1.0).tag() == "3_2");
  CHECK_THROWS_AS(classify_regime(2.5, 5.0), DomainError);
}

TEST_CASE("collision orbit") {
  auto [G, g] = collision_orbit(0.5, 1.0, 0.0, 0.0, 1);
  CHECK(G == doctest::Approx(std::sqrt(0.75)));
  CHECK(std::abs(wrap_pi(g - kPi)) < 1e-12);

  auto far = collision_orbit(0.5, 1.0, 60.0, 0.0, 1);
  CHECK(std::abs(far.first) < 1e-10);
  CHECK(std::abs(far.second) < 1e-4);

  // δ = 1: pendulum separatrix.
  for (double t : {-2.0, -0.5, 0.7, 3.0}) {
    CHECK(collision_orbit(1.0, 1.3, t, 0.1, 1).first ==
          doctest::Approx(1.3 / std::cosh(1.3 * (t - 0.1))));
  }
  CHECK_THROWS_AS(collision_orbit(2.0, 1.0, 0.0, 0.0, 1), DomainError);

  // Stays on the level δ and satisfies Hamilton's equations of
  // Ê₀ with L = 1: dG/dt = δ sqrt(1 - G²) sin ḡ, dḡ/dt = G (2 - δ cos ḡ / sqrt(1 - G²)).
  for (double d : {0.5, 1.0, 1.5}) {
    for (int s : {1, -1}) {
      for (double t = -4.0; t <= 4.0; t += 0.37) {
        const auto [G0, g0] = collision_orbit(d, 1.0, t, 0.0, s);
        CHECK(std::abs(ehat0(g0, G0, d) - d) < 1e-10);
        const double h = 1e-5;
        const auto a = collision_orbit(d, 1.0, t + h, 0.0, s);
        const auto b = collision_orbit(d, 1.0, t - h, 0.0, s);
        const double dG = (a.first - b.first) / (2 * h);
        const double dg = wrap_pi(a.second - b.second) / (2 * h);
        const double w = std::sqrt(1.0 - G0 * G0);
        CHECK(std::abs(dG - d * w * std::sin(g0)) < 1e-8);
        CHECK(std::abs(dg - G0 * (2.0 - d * std::cos(g0) / w)) < 1e-8);
      }
    }
  }
}

TEST_CASE("action-angle transform") {
  for (double Gc : {0.3, -0.3, 0.8, -0.95}) {
    for (double gam : {0.0, 0.4, 1.7, 3.0, 5.5}) {
      const AAImage img = aa_transform(1.2, Gc, 0.3, gam);
      CHECK(img.L == 1.2);
      CHECK(std::sqrt(1.0 - img.G * img.G / 1.44) * std::cos(img.gbar) ==
            doctest::Approx(Gc / 1.2).epsilon(1e-12));
    }
  }
  AAImage z = aa_transform(1.0, 0.5, 0.0, 0.0);
  CHECK(z.G == doctest::Approx(std::sqrt(0.75)));
  CHECK(z.gbar == 0.0);
  z = aa_transform(1.0, -0.5, 0.0, 0.0);
  CHECK(std::abs(z.gbar) == doctest::Approx(kPi));
  z = aa_transform(1.0, 1.0, 0.0, 0.9);
  CHECK(z.G == 0.0);
  CHECK_THROWS_AS(aa_transform(1.0, 0.0, 0.0, 0.1), DomainError);
  CHECK(aa_action(1.3, 0.0) == 0.0);
  CHECK(aa_action(1.3, 0.5) == doctest::Approx(0.65));
}

TEST_CASE("E0 in action-angle form") {
  MassParams m{0.7, 1.4, 1.0, 1.0};
  for (double gam : {0.1, 1.0, 2.2}) {
    const double Lc = 1.1, Gc = -0.4, r = 50.0;
    const AAImage img = aa_transform(Lc, Gc, 0.0, gam);
    const double direct = img.G * img.G + r * m.m * m.m * m.M *
                                              std::sqrt(1.0 - img.G * img.G / (Lc * Lc)) *
                                              std::cos(img.gbar);
    CHECK(testsupport::rel_err(e0_in_aa(Lc, Gc, gam, r, m), direct) < 1e-10);
  }
}

TEST_CASE("leading flow period is 2 pi L") {
  for (double E : {0.2, -0.2, 0.7, -0.7}) {
    const double T = leading_flow_period(1.3, E, 1e-13);
    CHECK(std::abs(T - kTwoPi * 1.3) < 1e-6 * kTwoPi * 1.3);
  }
}
