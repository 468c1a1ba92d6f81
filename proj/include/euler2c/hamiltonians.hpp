#pragma once

#include "euler2c/kepler.hpp"
#include "euler2c/kmap.hpp"

namespace euler2c {

/// |y|²/(2m) - m M / |x|.
double kepler_energy(const Vec3& y, const Vec3& x, const MassParams& masses);

/// Two-centre energy |y|²/(2m) - m M/|x| - m M'/|x' - x|. Throws CollisionError
/// if x = 0 or x = x'.
double two_centre_energy_cartesian(const CartesianState& s, const MassParams& masses);

/// Pieces of the Euler integral of the asymmetric problem.
///   e0 = |M|² - x'·L
///   e1 = m² M' (x' - x)·x' / |x' - x|
///   e2 = m |x'|²/2 · J   (itself a first integral, dropped from E)
struct EulerIntegralParts {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};
EulerIntegralParts euler_integral_parts(const CartesianState& s, const MassParams& masses);

/// E = e0 + e1.
double euler_integral_cartesian(const CartesianState& s, const MassParams& masses);

/// Symmetric form: unit-mass particle at v with velocity u, centres m_plus at
/// -v0 and m_minus at +v0.
double euler_integral_symmetric(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus,
                                double m_minus);

/// Same quantity through the elliptic coordinates (λ, β) and their conjugate
/// momenta, with the energy evaluated on shell. Throws DomainError when the
/// elliptic coordinates degenerate (v on the axis through the centres, β = ±1,
/// or vanishing angular momentum).
double euler_integral_elliptic(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus,
                               double m_minus);

/// Elliptic coordinates of v relative to centres at ∓v0.
struct EllipticCoordinates {
  double lambda = 0.0;  ///< (r₊ + r₋) / (2 r₀)
  double beta = 0.0;    ///< (r₊ - r₋) / (2 r₀)
};
EllipticCoordinates elliptic_coordinates(const Vec3& v, const Vec3& v0);

/// The symmetric problem equivalent to an asymmetric state: u = y/m,
/// v = x - x'/2, v0 = x'/2, m_plus = M, m_minus = M'. Then
/// m² · euler_integral_symmetric = e0 + e1 + e2.
struct SymmetricProblem {
  Vec3 u = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 v0 = Vec3::Zero();
  double m_plus = 0.0;
  double m_minus = 0.0;
};
SymmetricProblem to_symmetric(const CartesianState& s, const MassParams& masses);

/// Ellipse data entering the K-coordinate formulas at (L, G, Theta, r, ell, gbar).
struct KGeometry {
  double a = 0.0;
  double e = 0.0;
  double xi = 0.0;
  double rho = 0.0;
  double p = 0.0;
  double tilt = 1.0;       ///< sqrt(1 - Theta²/G²)
  double distance = 0.0;   ///< |x' - x| = sqrt(r² + 2 r a tilt p + a² rho²)
};
KGeometry k_geometry(double L, double G, double Theta, double r, double ell, double gbar,
                     const MassParams& masses);

/// Two-centre energy in K-coordinates. Throws CollisionError when |x' - x|
/// vanishes numerically.
double j_in_k(const KCoords& k, const MassParams& masses);

/// Euler integral e0 + e1 in K-coordinates.
double e_in_k(const KCoords& k, const MassParams& masses);

/// e0 = G² + m² M r sqrt(1 - Theta²/G²) sqrt(1 - G²/L²) cos(gbar). Independent of ell.
double e0_in_k(double L, double G, double Theta, double r, double gbar, const MassParams& masses);

}  // namespace euler2c
