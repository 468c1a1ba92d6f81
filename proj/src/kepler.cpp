#include "euler2c/kepler.hpp"

#include <cmath>
#include <string>

#include "euler2c/errors.hpp"

namespace euler2c {

void MassParams::validate() const {
  if (!(m > 0.0) || !(M > 0.0) || !(m0 > 0.0) || !(Mprime >= 0.0)) {
    throw DomainError("mass parameters must be positive (m=" + std::to_string(m) +
                      ", M=" + std::to_string(M) + ", M'=" + std::to_string(Mprime) +
                      ", m0=" + std::to_string(m0) + ")");
  }
}

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_pi(double angle) {
  double w = std::remainder(angle, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

double solve_kepler(double e, double ell, double tol) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw DomainError("solve_kepler: eccentricity " + std::to_string(e) + " outside [0, 1)");
  }
  if (!(tol > 0.0)) throw DomainError("solve_kepler: tolerance must be positive");
  if (!std::isfinite(ell)) throw DomainError("solve_kepler: non-finite mean anomaly");

  const double turns = std::floor((ell + std::numbers::pi) / kTwoPi);
  const double shift = turns * kTwoPi;
  const double l = ell - shift;  // in [-π, π)
  if (e == 0.0) return ell;

  double lo = l - e;
  double hi = l + e;
  double x = l + e * std::sin(l);
  for (int it = 0; it < 64; ++it) {
    const double f = x - e * std::sin(x) - l;
    if (std::abs(f) < tol) return x + shift;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double next = x - f / (1.0 - e * std::cos(x));
    x = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  const double f = x - e * std::sin(x) - l;
  if (std::abs(f) < tol) return x + shift;
  throw NumericError("solve_kepler: no convergence for e=" + std::to_string(e) +
                     ", ell=" + std::to_string(ell));
}

double semi_major_axis(double L, const MassParams& masses) {
  return L * L / (masses.m * masses.m * masses.M);
}

double eccentricity(double L, double G) {
  if (!(L > 0.0) || !(G > 0.0) || G > L) {
    throw DomainError("eccentricity: need 0 < G <= L (L=" + std::to_string(L) +
                      ", G=" + std::to_string(G) + ")");
  }
  const double q = G / L;
  return std::sqrt(std::max(0.0, (1.0 - q) * (1.0 + q)));
}

OrbitalElements elements_from_actions(double L, double G, double ell, double gbar,
                                      const MassParams& masses) {
  masses.validate();
  OrbitalElements el;
  el.e = eccentricity(L, G);
  el.a = semi_major_axis(L, masses);
  el.xi = solve_kepler(el.e, ell);
  const double c = std::cos(el.xi);
  const double s = std::sin(el.xi);
  const double eta = G / L;
  el.rho = 1.0 - el.e * c;
  el.nu = std::atan2(eta * s, c - el.e);
  el.nu += kTwoPi * std::round((el.xi - el.nu) / kTwoPi);
  el.p = (c - el.e) * std::cos(gbar) - eta * s * std::sin(gbar);
  return el;
}

}  // namespace euler2c
