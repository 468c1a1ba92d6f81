#include "euler2c/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "euler2c/dop853.hpp"
#include "euler2c/errors.hpp"

namespace euler2c {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBandSlack = 1e-12;

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("delta must be positive and finite (got " + std::to_string(delta) + ")");
  }
}

void require_level(double ehat, double delta) {
  require_delta(delta);
  const auto [lo, hi] = level_range(delta);
  if (!(ehat >= lo && ehat <= hi)) {
    throw DomainError("level " + std::to_string(ehat) + " outside the admissible range [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "] for delta " +
                      std::to_string(delta));
  }
}

// Endpoint value of the branch at |Ĝ| = Gmax.
double upper_endpoint(double ehat) {
  if (ehat < 1.0) return kPi;
  if (ehat == 1.0) return 0.5 * kPi;
  return 0.0;
}

}  // namespace

double ehat0(double gbar, double Ghat, double delta) {
  const double q = std::max(0.0, (1.0 - Ghat) * (1.0 + Ghat));
  return Ghat * Ghat + delta * std::sqrt(q) * std::cos(gbar);
}

double delta_parameter(double r, double L, const MassParams& masses) {
  masses.validate();
  if (!(L > 0.0) || !(r > 0.0)) throw DomainError("delta_parameter: need r, L > 0");
  return masses.m * masses.m * masses.M * r / (L * L);
}

std::pair<double, double> level_range(double delta) {
  require_delta(delta);
  return {-delta, delta <= 2.0 ? 1.0 + 0.25 * delta * delta : delta};
}

std::vector<CriticalPoint> critical_points(double delta) {
  require_delta(delta);
  std::vector<CriticalPoint> pts;
  pts.push_back({kPi, 0.0, -delta, CriticalKind::kMin});
  if (delta < 2.0) {
    pts.push_back({0.0, 0.0, delta, CriticalKind::kSaddle});
    pts.push_back({0.0, std::sqrt(1.0 - 0.25 * delta * delta), 1.0 + 0.25 * delta * delta,
                   CriticalKind::kMax});
  } else if (delta == 2.0) {
    pts.push_back({0.0, 0.0, 2.0, CriticalKind::kDegenerate});
  } else {
    pts.push_back({0.0, 0.0, delta, CriticalKind::kMax});
  }
  return pts;
}

GRoots g_roots(double ehat, double delta) {
  require_level(ehat, delta);
  const double root = delta * std::sqrt(std::max(0.0, 1.0 + 0.25 * delta * delta - ehat));
  const double base = ehat - 0.5 * delta * delta;
  GRoots g;
  g.Gp2 = base + root;
  g.Gm2 = base - root;
  g.Gmin = std::sqrt(std::max(g.Gm2, 0.0));
  g.Gmax = std::sqrt(std::clamp(g.Gp2, 0.0, 1.0));
  return g;
}

std::pair<double, double> level_branch(double ehat, double delta, double Ghat) {
  const GRoots roots = g_roots(ehat, delta);
  const double aG = std::abs(Ghat);
  if (aG > roots.Gmax * (1.0 + kBandSlack) + 1e-15 || aG < roots.Gmin * (1.0 - kBandSlack) - 1e-15) {
    throw DomainError("level_branch: |G| = " + std::to_string(aG) + " outside [" +
                      std::to_string(roots.Gmin) + ", " + std::to_string(roots.Gmax) + "]");
  }
  double gp;
  if (aG >= roots.Gmax) {
    gp = upper_endpoint(ehat);
  } else {
    const double c = (ehat - aG * aG) / (delta * std::sqrt((1.0 - aG) * (1.0 + aG)));
    gp = std::acos(std::clamp(c, -1.0, 1.0));
  }
  return {gp, gp == 0.0 ? 0.0 : kTwoPi - gp};
}

double level_branch_slope(double ehat, double delta, double Ghat) {
  const GRoots roots = g_roots(ehat, delta);
  const double G2 = Ghat * Ghat;
  const double band = (G2 - roots.Gm2) * (roots.Gmax * roots.Gmax - G2);
  if (!(band > 0.0)) throw DomainError("level_branch_slope: G not inside the open band");
  return Ghat / std::sqrt(band) * (2.0 - ehat - G2) / (1.0 - G2);
}

std::vector<CurvePoint> sample_level(double ehat, double delta, int n) {
  if (n < 2) throw DomainError("sample_level: need at least two samples");
  const GRoots roots = g_roots(ehat, delta);
  std::vector<CurvePoint> pts;
  pts.reserve(4 * static_cast<std::size_t>(n));
  for (int b = 0; b < 4; ++b) {
    for (int k = 0; k < n; ++k) {
      const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * k / (n - 1)));
      double G = roots.Gmin + (roots.Gmax - roots.Gmin) * s;
      if (k == n - 1) G = roots.Gmax;
      const auto [gp, gm] = level_branch(ehat, delta, G);
      const double sign = b < 2 ? 1.0 : -1.0;
      pts.push_back({(b % 2 == 0) ? gp : gm, sign * G, b});
    }
  }
  return pts;
}

Separatrices separatrices(double delta, int n_samples) {
  require_delta(delta);
  if (n_samples < 2) throw DomainError("separatrices: need at least two samples");
  Separatrices s;
  s.has_s0 = delta < 2.0;
  if (s.has_s0) s.s0 = sample_level(delta, delta, n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double g = kTwoPi * k / (n_samples - 1);
    s.s1.push_back({g, 1.0, 0});
    s.s1.push_back({g, -1.0, 1});
  }
  for (int k = 0; k < n_samples; ++k) {
    const double g = kTwoPi * k / (n_samples - 1);
    // sqrt(1 - G²) = delta cos(gbar), so only the half with cos(gbar) >= 0.
    const double c = delta * std::cos(g);
    const double q = 1.0 - c * c;
    if (c < 0.0 || q < 0.0) continue;
    s.s1.push_back({g, std::sqrt(q), 2});
    s.s1.push_back({g, -std::sqrt(q), 3});
  }
  return s;
}

std::string RegimeLabel::tag() const {
  return std::to_string(family) + "_" + std::to_string(item);
}

std::string to_string(CurveIdentity c) {
  switch (c) {
    case CurveIdentity::kRegular: return "regular";
    case CurveIdentity::kS0: return "S0";
    case CurveIdentity::kS1: return "S1";
    case CurveIdentity::kMin: return "MIN";
    case CurveIdentity::kSaddle: return "SADDLE";
    case CurveIdentity::kMax: return "MAX";
  }
  return "?";
}

std::string to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::kMin: return "min";
    case CriticalKind::kSaddle: return "saddle";
    case CriticalKind::kMax: return "max";
    case CriticalKind::kDegenerate: return "degenerate";
  }
  return "?";
}

RegimeLabel classify_regime(double delta, double ehat) {
  require_level(ehat, delta);
  const auto [lo, hi] = level_range(delta);
  RegimeLabel lab;
  if (delta <= 1.0) {
    lab.family = 1;
    if (ehat < delta) {
      lab.item = 1;
    } else if (ehat == delta) {
      lab.item = 2;
      lab.curve = CurveIdentity::kS0;
      if (delta == 1.0) lab.note = "delta = 1: S0 and S1 coincide";
    } else if (ehat < 1.0) {
      lab.item = 3;
    } else if (ehat == 1.0) {
      lab.item = 4;
      lab.curve = CurveIdentity::kS1;
      lab.note = "the list names this level S0; it is the curve S1";
    } else {
      lab.item = 5;
    }
  } else if (delta <= 2.0) {
    lab.family = 2;
    if (ehat < 1.0) {
      lab.item = 1;
    } else if (ehat == 1.0) {
      lab.item = 2;
      lab.curve = CurveIdentity::kS1;
    } else if (ehat < delta) {
      lab.item = 3;
    } else if (ehat == delta) {
      lab.item = 4;
      lab.curve = CurveIdentity::kS0;
      if (delta == 2.0) {
        lab.curve = CurveIdentity::kSaddle;
        lab.note = "delta = 2: S0 is contracted to the point P0";
      }
    } else {
      lab.item = 5;
    }
  } else {
    lab.family = 3;
    if (ehat < 1.0) {
      lab.item = 1;
    } else if (ehat == 1.0) {
      lab.item = 2;
      lab.curve = CurveIdentity::kS1;
    } else {
      lab.item = 3;
    }
  }
  if (ehat == lo) {
    lab.curve = CurveIdentity::kMin;
  } else if (ehat == hi && lab.curve == CurveIdentity::kRegular) {
    lab.curve = CurveIdentity::kMax;
  }
  return lab;
}

std::pair<double, double> collision_orbit(double delta, double L, double t, double t0,
                                          int branch_sign) {
  if (!(delta > 0.0 && delta < 2.0)) {
    throw DomainError("collision_orbit: S0 exists only for 0 < delta < 2");
  }
  if (!(L > 0.0)) throw DomainError("collision_orbit: L must be positive");
  if (branch_sign != 1 && branch_sign != -1) throw DomainError("branch_sign must be +1 or -1");
  const double sigma = std::sqrt(delta * (2.0 - delta));
  const double tau = sigma * L * (t - t0);
  const double ch = std::cosh(tau);
  const double sh2 = std::sinh(tau) * std::sinh(tau);
  const double G = branch_sign * sigma * L / ch;
  // cos ḡ = (1 - β²/ch²) / sqrt(1 - σ²/ch²), β² = 2 - δ, rewritten without
  // the cancellation near tau = 0.
  const double den = ch * std::sqrt(sh2 + (1.0 - delta) * (1.0 - delta));
  const double c = den > 0.0 ? (sh2 + delta - 1.0) / den : 0.0;
  const double g = std::acos(std::clamp(c, -1.0, 1.0));
  if (tau == 0.0) return {G, g};
  const double side = tau > 0.0 ? 1.0 : -1.0;
  return {G, -branch_sign * side * g};
}

AAImage aa_transform(double Lcal, double Gcal, double lambda, double gamma) {
  if (!(Lcal > 0.0)) throw DomainError("aa_transform: L must be positive");
  if (Gcal == 0.0 || !(std::abs(Gcal) <= Lcal)) {
    throw DomainError("aa_transform: need 0 < |G| <= L");
  }
  const double q = Gcal / Lcal;
  const double s = std::sqrt(std::max(0.0, (1.0 - q) * (1.0 + q)));
  AAImage img;
  img.L = Lcal;
  img.G = Lcal * s * std::cos(gamma);
  img.ell = lambda + std::atan2(std::sin(gamma) / std::abs(q), std::cos(gamma));
  // tan ḡ = -(s/q) sin γ with cos ḡ of the sign of q.
  img.gbar = std::atan2(-s * std::sin(gamma), q);
  return img;
}

double aa_action(double Lcal, double Ecal) {
  if (!(std::abs(Ecal) <= 1.0)) throw DomainError("aa_action: need |E| <= 1");
  return Lcal * Ecal;
}

double e0_in_aa(double Lcal, double Gcal, double gamma, double r, const MassParams& masses) {
  masses.validate();
  const double c = std::cos(gamma);
  return r * masses.m * masses.m * masses.M * Gcal / Lcal + (Lcal * Lcal - Gcal * Gcal) * c * c;
}

double leading_flow_period(double Lcal, double Ecal, double rel_tol) {
  if (!(Lcal > 0.0)) throw DomainError("leading_flow_period: L must be positive");
  if (!(std::abs(Ecal) > 0.0 && std::abs(Ecal) < 1.0)) {
    throw DomainError("leading_flow_period: need 0 < |E| < 1");
  }
  using Integrator = Dop853<2>;
  const double L2 = Lcal * Lcal;
  auto rhs = [L2](double, const Integrator::State& y, Integrator::State& dy) {
    const double w = std::sqrt(std::max(0.0, 1.0 - y[0] * y[0] / L2));
    if (!(w > 0.0)) throw DomainError("leading flow reached |G| = L");
    dy[0] = w * std::sin(y[1]);
    dy[1] = -(y[0] / L2) * std::cos(y[1]) / w;
  };
  Dop853Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol * Lcal;
  const double t_guess = kTwoPi * Lcal;
  opt.max_step = t_guess / 50.0;
  Integrator ode(rhs, opt);

  Integrator::State y = {Lcal * std::sqrt(1.0 - Ecal * Ecal), Ecal > 0.0 ? 0.0 : std::numbers::pi};
  std::vector<double> crossings;
  auto observer = [&](double t0, const Integrator::State& y0, const Integrator::State& dy0,
                      double t1, const Integrator::State& y1) {
    if ((y0[0] > 0.0) == (y1[0] > 0.0)) return true;
    // Illinois regula falsi on the sub-step length.
    double ha = 0.0, fa = y0[0];
    double hb = t1 - t0, fb = y1[0];
    int side = 0;
    for (int it = 0; it < 200 && std::abs(hb - ha) > 1e-15 * t_guess; ++it) {
      const double hc = (ha * fb - hb * fa) / (fb - fa);
      const double fc = ode.advance(t0, y0, dy0, hc)[0];
      if (fc == 0.0) {
        ha = hb = hc;
        break;
      }
      if ((fc > 0.0) == (fb > 0.0)) {
        hb = hc;
        fb = fc;
        if (side == -1) fa *= 0.5;
        side = -1;
      } else {
        ha = hc;
        fa = fc;
        if (side == 1) fb *= 0.5;
        side = 1;
      }
    }
    crossings.push_back(t0 + 0.5 * (ha + hb));
    return crossings.size() < 2;
  };
  ode.integrate(0.0, y, 2.0 * t_guess, observer);
  if (crossings.size() < 2) throw NumericError("leading_flow_period: fewer than two crossings");
  return 2.0 * (crossings[1] - crossings[0]);
}

}  // namespace euler2c
