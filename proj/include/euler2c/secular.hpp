#pragma once

#include <functional>

#include "euler2c/kepler.hpp"

namespace euler2c {

/// Periodic trapezoid settings: start with `nodes` points and double until two
/// successive values differ by less than `tol`, at most `max_doublings` times.
struct QuadratureSpec {
  int nodes = 64;
  double tol = 1e-12;
  int max_doublings = 7;

  void validate() const;
};

/// Result of a converged periodic quadrature.
struct QuadratureResult {
  double value = 0.0;
  int nodes = 0;            ///< node count of the accepted value
  double last_change = 0.0; ///< |I(n) - I(n/2)| at acceptance
  double min_radicand = 0.0;
};

/// Mean over one period of f(w), w ∈ [0, 2π), by node doubling. `radicand`
/// (optional) returns the quantity under the square root of the kernel; the
/// integration fails with CollisionError if its minimum on the grid drops below
/// `collision_floor`.
QuadratureResult periodic_mean(const std::function<double(double)>& f,
                               const std::function<double(double)>& radicand,
                               double collision_floor, const QuadratureSpec& q);

/// ℓ-average of the Newtonian interaction with the centre at distance r:
///   U = -(m M'/2π) ∫ dℓ / sqrt(r² + 2 r a tilt p + a² ρ²),
/// integrated in the eccentric anomaly (dℓ = ρ dξ).
/// Throws CollisionError if the orbit passes within sqrt(1e-8) r of the centre,
/// NumericError if the node doubling does not converge.
QuadratureResult average_potential_detail(double r, double L, double Theta, double G, double gbar,
                                          const MassParams& masses, const QuadratureSpec& q);
double average_potential(double r, double L, double Theta, double G, double gbar,
                         const MassParams& masses, const QuadratureSpec& q);

/// (1/2π) ∫ (1 - E cos w) dw / sqrt(r² + a² - 2a(r I sin w + a E cos w) + a² E² cos² w).
/// U = -m M' f_tilde(r, a, E, I) when (E, I) come from ei_params at E0.
double f_tilde(double r, double a, double Ecal, double Ical, const QuadratureSpec& q);

struct EIParams {
  double Ecal = 0.0;
  double Ical = 0.0;
};

/// ℰ = sqrt(L² - E0)/L, 𝓘 = sqrt(E0 - Theta²)/L. Requires Theta² <= E0 <= L²
/// (a relative slack of 1e-14 absorbs rounding).
EIParams ei_params(double L, double Theta, double E0);

/// Canonical bracket on the (G, gbar) plane:
///   {f, g} = ∂_gbar f ∂_G g - ∂_G f ∂_gbar g
/// by central differences with step h in both variables.
/// Throws NumericError if h is not above 1e-12 (1 + |G|).
using PlaneField = std::function<double(double G, double gbar)>;
double poisson_bracket_fd(const PlaneField& f, const PlaneField& g, double G, double gbar,
                          double h);

}  // namespace euler2c
