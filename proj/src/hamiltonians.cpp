#include "euler2c/hamiltonians.hpp"

#include <cmath>
#include <string>

#include "euler2c/errors.hpp"

namespace euler2c {
namespace {

constexpr double kCollisionFraction = 1e-14;

double checked_norm(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0)) throw CollisionError(std::string("collision: ") + what + " vanishes");
  return n;
}

double tilt_factor(double G, double Theta) {
  if (!(std::abs(Theta) <= std::abs(G))) {
    throw DomainError("need |Theta| <= G (Theta=" + std::to_string(Theta) +
                      ", G=" + std::to_string(G) + ")");
  }
  const double q = Theta / G;
  return std::sqrt(std::max(0.0, (1.0 - q) * (1.0 + q)));
}

}  // namespace

double kepler_energy(const Vec3& y, const Vec3& x, const MassParams& masses) {
  return y.squaredNorm() / (2.0 * masses.m) - masses.m * masses.M / checked_norm(x, "|x|");
}

double two_centre_energy_cartesian(const CartesianState& s, const MassParams& masses) {
  masses.validate();
  const double d = checked_norm(s.xprime - s.x, "|x' - x|");
  return kepler_energy(s.y, s.x, masses) - masses.m * masses.Mprime / d;
}

EulerIntegralParts euler_integral_parts(const CartesianState& s, const MassParams& masses) {
  masses.validate();
  const Vec3 rel = s.xprime - s.x;
  const double d = checked_norm(rel, "|x' - x|");
  const Vec3 M = angular_momentum(s.x, s.y);
  const Vec3 L = eccentricity_vector(s.x, s.y, masses);
  const double m2 = masses.m * masses.m;
  EulerIntegralParts parts;
  parts.e0 = M.squaredNorm() - s.xprime.dot(L);
  parts.e1 = m2 * masses.Mprime * rel.dot(s.xprime) / d;
  parts.e2 = masses.m * 0.5 * s.xprime.squaredNorm() * two_centre_energy_cartesian(s, masses);
  return parts;
}

double euler_integral_cartesian(const CartesianState& s, const MassParams& masses) {
  const EulerIntegralParts parts = euler_integral_parts(s, masses);
  return parts.e0 + parts.e1;
}

double euler_integral_symmetric(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus,
                                double m_minus) {
  const double rp = checked_norm(v + v0, "|v + v0|");
  const double rm = checked_norm(v - v0, "|v - v0|");
  const double v0u = v0.dot(u);
  return v.cross(u).squaredNorm() + v0u * v0u + 2.0 * v.dot(v0) * (m_plus / rp - m_minus / rm);
}

EllipticCoordinates elliptic_coordinates(const Vec3& v, const Vec3& v0) {
  const double r0 = v0.norm();
  if (!(r0 > 0.0)) throw DomainError("elliptic coordinates: the centres coincide (v0 = 0)");
  const double rp = checked_norm(v + v0, "|v + v0|");
  const double rm = checked_norm(v - v0, "|v - v0|");
  return {0.5 * (rp + rm) / r0, 0.5 * (rp - rm) / r0};
}

double euler_integral_elliptic(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus,
                               double m_minus) {
  const EllipticCoordinates ec = elliptic_coordinates(v, v0);
  const double lam = ec.lambda;
  const double beta = ec.beta;
  const double lam2m1 = lam * lam - 1.0;
  const double one_m_b2 = 1.0 - beta * beta;
  if (!(lam2m1 > 0.0) || !(one_m_b2 > 0.0)) {
    throw DomainError("euler_integral_elliptic: degenerate elliptic coordinates (v on the axis)");
  }
  const double r0 = v0.norm();
  const double rp = (v + v0).norm();
  const double rm = (v - v0).norm();

  const Vec3 axis = v0 / r0;
  const Vec3 M = v.cross(u);
  const double Theta = M.dot(axis);
  const double energy = 0.5 * u.squaredNorm() - m_plus / rp - m_minus / rm;

  // Momenta conjugate to lambda and beta: u projected on the coordinate
  // tangents, split into the axial and cylindrical radial parts.
  const Vec3 perp = v - v.dot(axis) * axis;
  const double rho = perp.norm();
  const double u_ax = u.dot(axis);
  const double u_rho = u.dot(perp) / rho;
  const double p_lam = r0 * (beta * u_ax + lam * std::sqrt(one_m_b2 / lam2m1) * u_rho);
  const double p_beta = r0 * (lam * u_ax - beta * std::sqrt(lam2m1 / one_m_b2) * u_rho);

  return 0.5 * p_beta * p_beta * one_m_b2 - 0.5 * p_lam * p_lam * lam2m1 +
         0.5 * Theta * Theta * (1.0 / one_m_b2 - 1.0 / lam2m1) +
         r0 * (m_plus * (lam + beta) + m_minus * (lam - beta)) +
         r0 * r0 * (lam * lam + beta * beta) * energy;
}

SymmetricProblem to_symmetric(const CartesianState& s, const MassParams& masses) {
  masses.validate();
  return {s.y / masses.m, s.x - 0.5 * s.xprime, 0.5 * s.xprime, masses.M, masses.Mprime};
}

KGeometry k_geometry(double L, double G, double Theta, double r, double ell, double gbar,
                     const MassParams& masses) {
  if (!(r > 0.0)) throw DomainError("k_geometry: r must be positive");
  const OrbitalElements el = elements_from_actions(L, G, ell, gbar, masses);
  KGeometry geo;
  geo.a = el.a;
  geo.e = el.e;
  geo.xi = el.xi;
  geo.rho = el.rho;
  geo.p = el.p;
  geo.tilt = tilt_factor(G, Theta);
  const double d2 = r * r + 2.0 * r * el.a * geo.tilt * el.p + el.a * el.a * el.rho * el.rho;
  const double floor = kCollisionFraction * (r + el.a);
  if (!(d2 > floor * floor)) throw CollisionError("collision: |x' - x| vanishes in K-coordinates");
  geo.distance = std::sqrt(d2);
  return geo;
}

double j_in_k(const KCoords& k, const MassParams& masses) {
  masses.validate();
  const KGeometry geo = k_geometry(k.L, k.G, k.Theta, k.r, k.ell, k.gbar, masses);
  const double m = masses.m;
  return -m * m * m * masses.M * masses.M / (2.0 * k.L * k.L) - m * masses.Mprime / geo.distance;
}

double e0_in_k(double L, double G, double Theta, double r, double gbar, const MassParams& masses) {
  masses.validate();
  const double e = eccentricity(L, G);
  const double tilt = tilt_factor(G, Theta);
  return G * G + masses.m * masses.m * masses.M * r * tilt * e * std::cos(gbar);
}

double e_in_k(const KCoords& k, const MassParams& masses) {
  masses.validate();
  const KGeometry geo = k_geometry(k.L, k.G, k.Theta, k.r, k.ell, k.gbar, masses);
  const double e1 = masses.m * masses.m * masses.Mprime * k.r * (k.r + geo.a * geo.tilt * geo.p) /
                    geo.distance;
  return e0_in_k(k.L, k.G, k.Theta, k.r, k.gbar, masses) + e1;
}

}  // namespace euler2c
