#pragma once

#include <Eigen/Dense>

#include "euler2c/kepler.hpp"

namespace euler2c {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// The twelve canonical K-coordinates. Conjugate pairs are (Z, zeta),
/// (C, g), (Theta, theta), (G, gbar), (R, r), (L, ell); the first member of
/// each pair is the momentum.
struct KCoords {
  double Z = 0.0;      ///< third component of the total angular momentum C
  double C = 0.0;      ///< |C|
  double Theta = 0.0;  ///< projection of M = x × y on x'
  double G = 0.0;      ///< |M|
  double R = 0.0;      ///< radial impulse y'·x'/|x'|
  double L = 0.0;      ///< Delaunay action m sqrt(M a)
  double zeta = 0.0;   ///< longitude of the node k × C
  double g = 0.0;      ///< angle from k × C to C × x' about C
  double theta = 0.0;  ///< angle from C × x' to x' × M about x'
  double gbar = 0.0;   ///< angle from x' × M to M × P about M
  double r = 0.0;      ///< |x'|
  double ell = 0.0;    ///< mean anomaly of x on its Kepler ellipse
};

/// Impulses and positions (y', y, x', x).
struct CartesianState {
  Vec3 yprime = Vec3::Zero();
  Vec3 y = Vec3::Zero();
  Vec3 xprime = Vec3::Zero();
  Vec3 x = Vec3::Zero();
};

struct Inclinations {
  double i = 0.0;   ///< acos(Z / C)
  double i1 = 0.0;  ///< acos(Theta / C)
  double i2 = 0.0;  ///< acos(Theta / G)
};

/// Coordinates of the planar map: Theta = 0 and theta fixed by the sense
/// (pi for prograde, 0 for retrograde).
struct PlanarKCoords {
  double Z = 0.0;
  double C = 0.0;
  double R = 0.0;
  double L = 0.0;
  double G = 0.0;
  double zeta = 0.0;
  double g = 0.0;
  double gbar = 0.0;
  double r = 0.0;
  double ell = 0.0;
};

enum class PlanarSense : int { kPrograde = 1, kRetrograde = -1 };

/// Rotation about the first axis.
Mat3 rot1(double angle);
/// Rotation about the third axis.
Mat3 rot3(double angle);

/// Oriented angle from u to v, counterclockwise about w, in [0, 2π). Both u
/// and v are first projected orthogonally to w.
double oriented_angle(const Vec3& w, const Vec3& u, const Vec3& v);

Inclinations inclinations(const KCoords& k);

/// Position x̄ and impulse ȳ of the Kepler motion in the frame attached to M
/// (third axis along M, first axis along the node x' × M).
struct KeplerFrameState {
  Vec3 x = Vec3::Zero();
  Vec3 y = Vec3::Zero();
};
KeplerFrameState kepler_frame_state(double L, double G, double ell, double gbar,
                                    const MassParams& masses);

CartesianState k_to_cartesian(const KCoords& k, const MassParams& masses);
KCoords cartesian_to_k(const CartesianState& s, const MassParams& masses);

CartesianState k_to_cartesian_planar(const PlanarKCoords& k, PlanarSense sense,
                                     const MassParams& masses);

/// Embeds planar coordinates into the full set (Theta = 0, theta = π or 0).
KCoords to_kcoords(const PlanarKCoords& k, PlanarSense sense);

/// Angular momentum x × y, eccentricity vector y × M - m² M_sun x / |x|.
Vec3 angular_momentum(const Vec3& x, const Vec3& y);
Vec3 eccentricity_vector(const Vec3& x, const Vec3& y, const MassParams& masses);

/// ‖JᵀΩJ - Ω‖∞ for the finite-difference Jacobian J of the map K → Cartesian,
/// K ordered as angles (zeta, g, theta, gbar, r, ell) then actions
/// (Z, C, Theta, G, R, L), Cartesian as positions (x', x) then impulses (y', y).
///
/// Throws DomainError if `k` itself is degenerate and NumericError if the step
/// is too small or the stencil crosses the domain boundary.
double canonicity_residual(const KCoords& k, const MassParams& masses, double fd_step);

/// Same check for the planar map restricted to the (C, g), (G, gbar), (R, r),
/// (L, ell) pairs at fixed Z and zeta: J is 12×8 and the pulled-back form is
/// compared with the 8×8 standard one.
double canonicity_residual_planar(const PlanarKCoords& k, PlanarSense sense,
                                  const MassParams& masses, double fd_step);

}  // namespace euler2c
