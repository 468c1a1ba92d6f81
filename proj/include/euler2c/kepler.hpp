#pragma once

#include <numbers>

namespace euler2c {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Mass parameters of the two-centre problem. The gravitational constant is
/// absorbed into the centre masses, so the library is unit-agnostic.
///
/// `m` is the (reduced) mass of the moving body, `M` the mass of the centre at
/// the origin, `Mprime` the mass of the centre at x'. `m0` is only used by the
/// three-body Hamiltonian (heliocentric mass in the kinetic coupling term).
struct MassParams {
  double m = 1.0;
  double M = 1.0;
  double Mprime = 1.0;
  double m0 = 1.0;

  /// Throws DomainError unless every mass is strictly positive. `Mprime` may
  /// be zero (Keplerian limit).
  void validate() const;
};

/// Keplerian elements of the ellipse described by the Delaunay actions.
struct OrbitalElements {
  double a = 0.0;    ///< semi-major axis
  double e = 0.0;    ///< eccentricity
  double xi = 0.0;   ///< eccentric anomaly, same 2π-branch as the mean anomaly
  double nu = 0.0;   ///< true anomaly, within π of xi
  double rho = 1.0;  ///< radial factor 1 - e cos(xi) = |x| / a
  double p = 0.0;    ///< projection factor (cos xi - e) cos(gbar) - (G/L) sin xi sin(gbar)
};

/// Solves ξ - e sin ξ = ℓ.
///
/// Newton iteration from ξ₀ = ℓ + e sin ℓ with a bisection fallback whenever a
/// Newton step leaves the bracket [ℓ - e, ℓ + e]; at most 64 iterations. ℓ is
/// reduced mod 2π internally and the result is shifted back into the branch
/// containing ℓ.
///
/// Throws DomainError for e outside [0, 1) or tol <= 0, NumericError when the
/// residual does not drop below `tol`.
double solve_kepler(double e, double ell, double tol = 1e-14);

double semi_major_axis(double L, const MassParams& masses);

/// e = sqrt(1 - G²/L²). Throws DomainError unless 0 < G <= L.
double eccentricity(double L, double G);

/// Elements of the ellipse with Delaunay actions (L, G) at mean anomaly `ell`;
/// `gbar` only enters the projection factor p. Throws DomainError unless
/// 0 < G <= L.
OrbitalElements elements_from_actions(double L, double G, double ell, double gbar,
                                      const MassParams& masses);

/// Maps an angle onto [0, 2π).
double wrap_two_pi(double angle);

/// Maps an angle onto (-π, π].
double wrap_pi(double angle);

}  // namespace euler2c
