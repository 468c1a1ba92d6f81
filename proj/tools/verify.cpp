#include "verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "euler2c/dynamics.hpp"
#include "euler2c/errors.hpp"
#include "euler2c/hamiltonians.hpp"
#include "euler2c/kepler.hpp"
#include "euler2c/kmap.hpp"
#include "euler2c/secular.hpp"
#include "output.hpp"

namespace euler2c::cli {
namespace {

using nlohmann::json;

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-14});
}

// Per-point random draws come from a generator seeded by (seed, index), so
// results do not depend on the thread count.
class Draw {
 public:
  Draw(unsigned long seed, std::size_t index) : rng_(seed * 1000003ul + index) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double angle() { return uniform(0.0, kTwoPi); }

  MassParams masses() {
    MassParams m;
    m.m = uniform(0.5, 2.0);
    m.M = uniform(0.5, 2.0);
    m.Mprime = uniform(0.1, 1.5);
    m.m0 = uniform(0.5, 2.0);
    return m;
  }

  KCoords spatial() {
    KCoords k;
    k.L = uniform(0.6, 1.5);
    k.G = k.L * uniform(0.3, 0.9);
    k.Theta = k.G * uniform(-0.8, 0.8);
    k.C = std::max(std::abs(k.Theta), k.G) * uniform(1.1, 3.0);
    k.Z = k.C * uniform(-0.8, 0.8);
    k.R = uniform(-1.0, 1.0);
    k.zeta = angle();
    k.g = angle();
    k.theta = angle();
    k.gbar = angle();
    k.r = uniform(2.0, 6.0);
    k.ell = angle();
    return k;
  }

  PlanarKCoords planar() {
    PlanarKCoords k;
    k.L = uniform(0.6, 1.5);
    k.G = k.L * uniform(0.3, 0.9);
    k.C = k.G * uniform(1.2, 3.0);
    k.Z = k.C * uniform(-0.8, 0.8);
    k.R = uniform(-1.0, 1.0);
    k.zeta = angle();
    k.g = angle();
    k.gbar = angle();
    k.r = uniform(2.0, 6.0);
    k.ell = angle();
    return k;
  }

 private:
  std::mt19937_64 rng_;
};

// Max over points of a fixed-size residual vector computed in parallel.
template <std::size_t K>
std::array<double, K> max_over(int n, const std::function<std::array<double, K>(std::size_t)>& f) {
  std::vector<std::array<double, K>> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = f(i); });
  std::array<double, K> m{};
  for (const auto& a : out) {
    for (std::size_t j = 0; j < K; ++j) m[j] = std::max(m[j], a[j]);
  }
  return m;
}

SuiteResult kepler_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "kepler";
  r.points = o.points > 0 ? o.points : 10000;
  const auto m = max_over<1>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    const double e = d.uniform(0.0, 0.99), ell = d.angle();
    const double xi = solve_kepler(e, ell);
    return std::array<double, 1>{std::abs(xi - e * std::sin(xi) - ell)};
  });
  r.residuals = {{"kepler_equation", m[0]}};
  r.thresholds = {{"kepler_equation", 1e-13}};
  r.passed = m[0] < 1e-13;
  return r;
}

SuiteResult canonicity_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "canonicity";
  r.points = o.points > 0 ? o.points : 100;
  const auto m = max_over<2>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    const MassParams masses = d.masses();
    const PlanarSense sense = i % 2 == 0 ? PlanarSense::kPrograde : PlanarSense::kRetrograde;
    return std::array<double, 2>{canonicity_residual(d.spatial(), masses, 1e-6),
                                 canonicity_residual_planar(d.planar(), sense, masses, 1e-6)};
  });
  r.residuals = {{"spatial", m[0]}, {"planar", m[1]}};
  r.thresholds = {{"spatial", 1e-5}, {"planar", 1e-5}};
  r.passed = m[0] < 1e-5 && m[1] < 1e-5;
  return r;
}

SuiteResult euler_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "euler_integral";
  r.points = o.points > 0 ? o.points : 100;
  const auto m = max_over<1>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    const MassParams masses = d.masses();
    const CartesianState c = k_to_cartesian(d.spatial(), masses);
    const SymmetricProblem sp = to_symmetric(c, masses);
    const double m2 = masses.m * masses.m;
    const double e2 = masses.m * 0.5 * c.xprime.squaredNorm() * two_centre_energy_cartesian(c, masses);
    const double v[4] = {
        m2 * euler_integral_symmetric(sp.u, sp.v, sp.v0, sp.m_plus, sp.m_minus) - e2,
        m2 * euler_integral_elliptic(sp.u, sp.v, sp.v0, sp.m_plus, sp.m_minus) - e2,
        euler_integral_cartesian(c, masses),
        e_in_k(cartesian_to_k(c, masses), masses),
    };
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) worst = std::max(worst, rel_err(v[a], v[b]));
    }
    return std::array<double, 1>{worst};
  });
  r.residuals = {{"pairwise_relative", m[0]}};
  r.thresholds = {{"pairwise_relative", 1e-10}};
  r.passed = m[0] < 1e-10;
  return r;
}

SuiteResult integrability_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "integrability";
  r.points = o.points > 0 ? o.points : 50;
  QuadratureSpec q;
  q.tol = 1e-11;
  const auto m = max_over<2>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const MassParams masses = d.masses();
      const double L = d.uniform(0.7, 1.3);
      const double a = semi_major_axis(L, masses);
      const double rr = a * d.uniform(0.05, 3.0);
      const double G = L * d.uniform(0.1, 0.95);
      const double Theta = G * d.uniform(-0.8, 0.8);
      const double g = d.angle();
      const double E0 = e0_in_k(L, G, Theta, rr, g, masses);
      if (E0 < Theta * Theta || E0 > L * L) continue;
      try {
        const double U = average_potential(rr, L, Theta, G, g, masses, q);
        const EIParams ei = ei_params(L, Theta, E0);
        const double F = f_tilde(rr, a, ei.Ecal, ei.Ical, q);
        // Second point on the same E0 level at another G: solve the cos ḡ term.
        double U2 = U;
        bool paired = false;
        for (int k = 0; k < 200 && !paired; ++k) {
          const double G2 = L * d.uniform(0.1, 0.95);
          if (std::abs(Theta) >= G2) continue;
          const double amp = masses.m * masses.m * masses.M * rr * std::sqrt(1.0 - Theta * Theta / (G2 * G2)) *
                             std::sqrt(1.0 - G2 * G2 / (L * L));
          const double c = (E0 - G2 * G2) / amp;
          if (std::abs(c) > 1.0 || std::abs(G2 - G) < 1e-3 * L) continue;
          try {
            U2 = average_potential(rr, L, Theta, G2, std::acos(c), masses, q);
            paired = true;
          } catch (const CollisionError&) {
          }
        }
        if (!paired) continue;
        return std::array<double, 2>{std::abs(masses.m * masses.Mprime * F + U), std::abs(U - U2)};
      } catch (const CollisionError&) {
        continue;
      }
    }
    throw NumericError("integrability suite: no admissible point found");
  });
  r.residuals = {{"normal_form", m[0]}, {"level_pairs", m[1]}};
  r.thresholds = {{"normal_form", 1e-9}, {"level_pairs", 2e-11}};
  r.passed = m[0] < 1e-9 && m[1] < 2e-11;
  return r;
}

using Field = std::function<double(const CartesianState&)>;

std::array<double, 12> cartesian_gradient(const Field& f, const CartesianState& s, double h) {
  std::array<double, 12> g{};
  for (int i = 0; i < 12; ++i) {
    auto bump = [&](double dx) {
      CartesianState t = s;
      Vec3* v = i < 3 ? &t.xprime : i < 6 ? &t.x : i < 9 ? &t.yprime : &t.y;
      (*v)[i % 3] += dx;
      return f(t);
    };
    g[i] = (8.0 * (bump(h) - bump(-h)) - (bump(2 * h) - bump(-2 * h))) / (12.0 * h);
  }
  return g;
}

double bracket(const Field& f, const Field& g, const CartesianState& s) {
  const auto df = cartesian_gradient(f, s, 1e-4);
  const auto dg = cartesian_gradient(g, s, 1e-4);
  double b = 0.0;
  for (int i = 0; i < 6; ++i) b += df[i] * dg[i + 6] - df[i + 6] * dg[i];
  return b;
}

SuiteResult brackets_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "brackets";
  r.points = o.points > 0 ? o.points : 20;
  const auto m = max_over<5>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    const MassParams masses = d.masses();
    const CartesianState c = k_to_cartesian(d.spatial(), masses);
    const Field e0 = [&](const CartesianState& t) { return euler_integral_parts(t, masses).e0; };
    const Field rr = [](const CartesianState& t) { return t.xprime.norm(); };
    const Field L = [&](const CartesianState& t) {
      return masses.m * masses.M * std::sqrt(-masses.m / (2.0 * kepler_energy(t.y, t.x, masses)));
    };
    const Field Theta = [](const CartesianState& t) { return t.x.cross(t.y).dot(t.xprime.normalized()); };
    const Field J = [&](const CartesianState& t) { return two_centre_energy_cartesian(t, masses); };
    const Field E = [&](const CartesianState& t) { return euler_integral_cartesian(t, masses); };

    // {U, E0} on the (G, ḡ) plane at an admissible planar point.
    double ue0 = 0.0;
    QuadratureSpec q;
    q.tol = 1e-13;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double Lp = d.uniform(0.7, 1.3);
      const double rp = semi_major_axis(Lp, masses) * d.uniform(0.05, 3.0);
      const double Gp = Lp * d.uniform(0.1, 0.9);
      const double gp = d.angle();
      const PlaneField U = [&](double G, double g) {
        return average_potential(rp, Lp, 0.0, G, g, masses, q);
      };
      const PlaneField E0 = [&](double G, double g) { return e0_in_k(Lp, G, 0.0, rp, g, masses); };
      try {
        ue0 = std::abs(poisson_bracket_fd(U, E0, Gp, gp, 1e-5));
        break;
      } catch (const CollisionError&) {
        continue;
      }
    }
    return std::array<double, 5>{std::abs(bracket(e0, rr, c)), std::abs(bracket(e0, L, c)),
                                 std::abs(bracket(e0, Theta, c)), std::abs(bracket(J, E, c)), ue0};
  });
  r.residuals = {{"E0_r", m[0]}, {"E0_L", m[1]}, {"E0_Theta", m[2]}, {"J_E", m[3]}, {"U_E0", m[4]}};
  r.thresholds = {{"E0_r", 1e-6}, {"E0_L", 1e-6}, {"E0_Theta", 1e-6}, {"J_E", 1e-6}, {"U_E0", 1e-6}};
  r.passed = *std::max_element(m.begin(), m.end()) < 1e-6;
  return r;
}

SuiteResult conservation_suite(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "conservation";
  r.points = o.points > 0 ? o.points : 3;
  const auto m = max_over<5>(r.points, [&](std::size_t i) {
    Draw d(o.seed, i);
    const MassParams masses = d.masses();
    KCoords k = d.spatial();
    while (semi_major_axis(k.L, masses) * (1.0 + eccentricity(k.L, k.G)) > 0.5 * k.r) k = d.spatial();
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-12;
    cfg.t_end = 10.0 * inner_period(k.L, masses);
    cfg.sample_dt = cfg.t_end / 500.0;
    FlowParams p;
    p.masses = masses;
    p.Theta = k.Theta;
    const IntegrationReport rep =
        integrate(HamiltonianKind::kTwoCentre, {k.R, k.r, k.L, k.ell, k.G, k.gbar}, p, cfg);
    if (rep.termination != Termination::kCompleted) throw NumericError("conservation run: " + rep.reason);
    bool first = true;
    double j0 = 0, e0 = 0, t0 = 0, cj = 0, ce = 0, ct = 0;
    integrate_two_centre_cartesian(k_to_cartesian(k, masses), masses, cfg, [&](const CartesianSample& s) {
      if (first) {
        j0 = s.J;
        e0 = s.E;
        t0 = s.Theta;
        first = false;
      }
      cj = std::max(cj, rel_err(s.J, j0));
      ce = std::max(ce, rel_err(s.E, e0));
      ct = std::max(ct, rel_err(s.Theta, t0));
    });
    return std::array<double, 5>{rep.max_rel_drift_H, rep.max_rel_drift_E, cj, ce, ct};
  });
  r.residuals = {{"k_J", m[0]}, {"k_E", m[1]}, {"cartesian_J", m[2]}, {"cartesian_E", m[3]},
                 {"cartesian_Theta", m[4]}};
  r.thresholds = {{"k_J", 1e-8}, {"k_E", 1e-8}, {"cartesian_J", 1e-8}, {"cartesian_E", 1e-8},
                  {"cartesian_Theta", 1e-8}};
  r.passed = *std::max_element(m.begin(), m.end()) < 1e-8;
  return r;
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"kepler", kepler_suite},
      {"canonicity", canonicity_suite},
      {"euler_integral", euler_suite},
      {"integrability", integrability_suite},
      {"brackets", brackets_suite},
      {"conservation", conservation_suite},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& opt) {
  std::vector<std::pair<std::string, SuiteFn>> chosen;
  for (const auto& entry : registry()) {
    if (opt.suite == "all" || opt.suite == entry.first) chosen.push_back(entry);
  }
  if (chosen.empty()) throw std::invalid_argument("unknown suite '" + opt.suite + "'");
  std::vector<SuiteResult> out;
  for (const auto& [name, fn] : chosen) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = fn(opt);
    } catch (const std::exception& e) {
      r.name = name;
      r.passed = false;
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const SuiteResult& r) {
  json j{{"suite", r.name},
         {"passed", r.passed},
         {"points", r.points},
         {"residuals", r.residuals.is_null() ? json::object() : r.residuals},
         {"thresholds", r.thresholds.is_null() ? json::object() : r.thresholds}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace euler2c::cli
