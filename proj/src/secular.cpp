#include "euler2c/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "euler2c/errors.hpp"

namespace euler2c {
namespace {

constexpr double kCollisionRatio = 1e-8;

}  // namespace

void QuadratureSpec::validate() const {
  if (nodes < 8 || nodes % 2 != 0) throw DomainError("quadrature needs an even node count >= 8");
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  if (max_doublings < 0) throw DomainError("max_doublings must be non-negative");
}

QuadratureResult periodic_mean(const std::function<double(double)>& f,
                               const std::function<double(double)>& radicand,
                               double collision_floor, const QuadratureSpec& q) {
  q.validate();
  double min_rad = std::numeric_limits<double>::infinity();
  auto sample = [&](double w) {
    if (radicand) {
      const double rad = radicand(w);
      min_rad = std::min(min_rad, rad);
      if (!(rad > collision_floor)) {
        throw CollisionError("collisional configuration: kernel radicand " + std::to_string(rad) +
                             " at w=" + std::to_string(w));
      }
    }
    return f(w);
  };

  int n = q.nodes;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += sample(kTwoPi * j / n);
  double value = sum / n;
  for (int d = 0; d < q.max_doublings; ++d) {
    // The new nodes are the midpoints of the old grid.
    double odd = 0.0;
    for (int j = 0; j < n; ++j) odd += sample(kTwoPi * (j + 0.5) / n);
    sum += odd;
    n *= 2;
    const double next = sum / n;
    const double change = std::abs(next - value);
    value = next;
    if (change < q.tol) return {value, n, change, min_rad};
  }
  throw NumericError("periodic quadrature did not converge with " + std::to_string(n) + " nodes");
}

QuadratureResult average_potential_detail(double r, double L, double Theta, double G, double gbar,
                                          const MassParams& masses, const QuadratureSpec& q) {
  masses.validate();
  if (!(r > 0.0)) throw DomainError("average_potential: r must be positive");
  if (!(std::abs(Theta) <= G)) throw DomainError("average_potential: need |Theta| <= G");
  const double a = semi_major_axis(L, masses);
  const double e = eccentricity(L, G);
  const double eta = G / L;
  const double tilt = std::sqrt(std::max(0.0, 1.0 - (Theta / G) * (Theta / G)));
  const double cg = std::cos(gbar);
  const double sg = std::sin(gbar);
  auto rad = [&](double xi) {
    const double c = std::cos(xi);
    const double rho = 1.0 - e * c;
    const double p = (c - e) * cg - eta * std::sin(xi) * sg;
    return r * r + 2.0 * r * a * tilt * p + a * a * rho * rho;
  };
  auto integrand = [&](double xi) { return (1.0 - e * std::cos(xi)) / std::sqrt(rad(xi)); };
  QuadratureResult res = periodic_mean(integrand, rad, kCollisionRatio * r * r, q);
  const double pref = -masses.m * masses.Mprime;
  res.value *= pref;
  res.last_change *= std::abs(pref);
  return res;
}

double average_potential(double r, double L, double Theta, double G, double gbar,
                         const MassParams& masses, const QuadratureSpec& q) {
  if (masses.Mprime == 0.0) {
    masses.validate();
    return 0.0;
  }
  return average_potential_detail(r, L, Theta, G, gbar, masses, q).value;
}

double f_tilde(double r, double a, double Ecal, double Ical, const QuadratureSpec& q) {
  if (!(r > 0.0) || !(a >= 0.0)) throw DomainError("f_tilde: need r > 0 and a >= 0");
  if (!(Ecal >= 0.0 && Ecal < 1.0)) throw DomainError("f_tilde: need 0 <= E < 1");
  auto rad = [&](double w) {
    const double c = std::cos(w);
    return r * r + a * a - 2.0 * a * (r * Ical * std::sin(w) + a * Ecal * c) +
           a * a * Ecal * Ecal * c * c;
  };
  auto integrand = [&](double w) { return (1.0 - Ecal * std::cos(w)) / std::sqrt(rad(w)); };
  return periodic_mean(integrand, rad, kCollisionRatio * r * r, q).value;
}

EIParams ei_params(double L, double Theta, double E0) {
  if (!(L > 0.0)) throw DomainError("ei_params: L must be positive");
  const double L2 = L * L;
  const double T2 = Theta * Theta;
  const double slack = 1e-14 * L2;
  if (!(E0 >= T2 - slack && E0 <= L2 + slack)) {
    throw DomainError("ei_params: need Theta^2 <= E0 <= L^2 (E0=" + std::to_string(E0) + ")");
  }
  return {std::sqrt(std::max(0.0, L2 - E0)) / L, std::sqrt(std::max(0.0, E0 - T2)) / L};
}

double poisson_bracket_fd(const PlaneField& f, const PlaneField& g, double G, double gbar,
                          double h) {
  if (!(h > 1e-12 * (1.0 + std::abs(G)))) {
    throw NumericError("poisson_bracket_fd: finite-difference step too small");
  }
  auto dG = [&](const PlaneField& u) { return (u(G + h, gbar) - u(G - h, gbar)) / (2.0 * h); };
  auto dg = [&](const PlaneField& u) { return (u(G, gbar + h) - u(G, gbar - h)) / (2.0 * h); };
  return dg(f) * dG(g) - dG(f) * dg(g);
}

}  // namespace euler2c
