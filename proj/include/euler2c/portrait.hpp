#pragma once

#include <string>
#include <utility>
#include <vector>

#include "euler2c/kepler.hpp"

namespace euler2c {

// Normalised planar level function Ê₀(ḡ, Ĝ) = Ĝ² + δ sqrt(1 - Ĝ²) cos ḡ with
// Ĝ = G/L and δ = m² M r / L² = r/a.

double ehat0(double gbar, double Ghat, double delta);

/// δ = m² M r / L².
double delta_parameter(double r, double L, const MassParams& masses);

/// Admissible level range: [-δ, 1 + δ²/4] for δ <= 2, [-δ, δ] beyond.
std::pair<double, double> level_range(double delta);

enum class CriticalKind { kMin, kSaddle, kMax, kDegenerate };

struct CriticalPoint {
  double gbar = 0.0;
  double Ghat = 0.0;
  double value = 0.0;
  CriticalKind kind = CriticalKind::kMin;
};

/// Critical points with Ĝ >= 0 (the maximum for δ < 2 has a mirror copy at
/// -Ĝ). At δ = 2 the saddle and maximum merge into one kDegenerate point.
std::vector<CriticalPoint> critical_points(double delta);

struct GRoots {
  double Gm2 = 0.0;    ///< Ĝ₋²
  double Gp2 = 0.0;    ///< Ĝ₊²
  double Gmin = 0.0;   ///< sqrt(max(Ĝ₋², 0))
  double Gmax = 0.0;   ///< sqrt(min(Ĝ₊², 1))
};

/// Ĝ±² = Ê - δ²/2 ± δ sqrt(1 + δ²/4 - Ê). Throws DomainError outside level_range.
GRoots g_roots(double ehat, double delta);

/// The two solutions ḡ₊ ∈ [0, π] and ḡ₋ = -ḡ₊ mod 2π of Ê₀(ḡ, Ĝ) = Ê.
/// Throws DomainError unless Gmin <= |Ĝ| <= Gmax (relative slack 1e-12). At
/// |Ĝ| = Gmax the closed-form endpoint values are returned.
std::pair<double, double> level_branch(double ehat, double delta, double Ghat);

/// ∂ḡ₊/∂Ĝ on the open band Gmin < Ĝ < Gmax.
double level_branch_slope(double ehat, double delta, double Ghat);

struct CurvePoint {
  double gbar = 0.0;
  double Ghat = 0.0;
  int branch = 0;  ///< 0: (+Ĝ, ḡ₊)  1: (+Ĝ, ḡ₋)  2: (-Ĝ, ḡ₊)  3: (-Ĝ, ḡ₋)
};

/// Samples the level set Ê₀ = Ê with n points per branch, clustered at the
/// ends of the Ĝ band.
std::vector<CurvePoint> sample_level(double ehat, double delta, int n);

struct Separatrices {
  bool has_s0 = false;
  std::vector<CurvePoint> s0;
  /// Branch 0/1: Ĝ = +1 / -1. Branch 2/3: Ĝ = ±sqrt(1 - δ² cos² ḡ).
  std::vector<CurvePoint> s1;
};

/// S₀ is the level Ê = δ through the saddle (only for δ < 2); S₁ is the union
/// of the lines Ĝ = ±1 and the curves Ĝ = ±sqrt(1 - δ² cos² ḡ), the latter
/// sampled only where the radicand is non-negative.
Separatrices separatrices(double delta, int n_samples);

/// Case numbers follow the itemised description of the portrait:
/// family 1 for δ <= 1, 2 for 1 < δ <= 2, 3 for δ > 2.
enum class CurveIdentity { kRegular, kS0, kS1, kMin, kSaddle, kMax };

struct RegimeLabel {
  int family = 0;
  int item = 0;
  CurveIdentity curve = CurveIdentity::kRegular;
  std::string note;

  std::string tag() const;  ///< "1_3", "2_4", ...
};

RegimeLabel classify_regime(double delta, double ehat);

std::string to_string(CurveIdentity c);
std::string to_string(CriticalKind k);

/// Motion on S₀ for δ ∈ (0, 2), in the time of the flow of
/// E₀ = G² + m² M r sqrt(1 - G²/L²) cos ḡ with δ = m² M r / L²:
///   G(t) = s σ L / cosh(σ L (t - t0)),  σ² = δ(2 - δ), β² = 2 - δ,
///   cos ḡ(t) = (1 - β²/ch²) / sqrt(1 - σ²/ch²).
/// `branch_sign` s = ±1 selects the mirror solution (G, ḡ) -> (-G, -ḡ).
/// Returns (G, ḡ) with ḡ in (-π, π].
std::pair<double, double> collision_orbit(double delta, double L, double t, double t0,
                                          int branch_sign);

/// Large-r action-angle image of (𝓛, 𝓖, λ, γ).
struct AAImage {
  double L = 0.0;
  double G = 0.0;
  double ell = 0.0;
  double gbar = 0.0;
};

/// L = 𝓛, G = sqrt(𝓛² - 𝓖²) cos γ, ℓ = λ + arg(cos γ, (𝓛/|𝓖|) sin γ),
/// tan ḡ = -(𝓛/𝓖) sqrt(1 - 𝓖²/𝓛²) sin γ with sign cos ḡ = sign 𝓖.
/// Throws DomainError unless 0 < |𝓖| <= 𝓛.
AAImage aa_transform(double Lcal, double Gcal, double lambda, double gamma);

/// 𝓖 = 𝓛 ℰ. Throws DomainError for |ℰ| > 1.
double aa_action(double Lcal, double Ecal);

/// E₀ = r m² M 𝓖/𝓛 + (𝓛² - 𝓖²) cos² γ.
double e0_in_aa(double Lcal, double Gcal, double gamma, double r, const MassParams& masses);

/// Period of the flow of H = sqrt(1 - G²/𝓛²) cos ḡ on the level ℰ, measured
/// as twice the time between consecutive crossings of G = 0.
double leading_flow_period(double Lcal, double Ecal, double rel_tol);

}  // namespace euler2c
