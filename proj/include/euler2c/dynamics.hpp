#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "euler2c/errors.hpp"
#include "euler2c/kepler.hpp"
#include "euler2c/kmap.hpp"

namespace euler2c {

/// Planar (or fixed-Theta) K-variables evolved by the flows:
/// pairs (R, r), (L, ell), (G, gbar).
struct PhaseState {
  double R = 0.0;
  double r = 1.0;
  double L = 1.0;
  double ell = 0.0;
  double G = 0.5;
  double gbar = 0.0;

  std::array<double, 6> to_array() const { return {R, r, L, ell, G, gbar}; }
  static PhaseState from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

enum class HamiltonianKind {
  kTwoCentre,  ///< J(L, G, Theta, r, ell, gbar), Theta a parameter
  kE0,         ///< E0(L, G, Theta, r, gbar); G may change sign
  kThreeBody,  ///< planar three-body Hamiltonian with total angular momentum C
};

/// Sign of the kinetic coupling y'·y / m0 once written in K-coordinates.
/// kConsistent is the sign obtained by substituting the planar K-map into the
/// Cartesian Hamiltonian; kPrinted is the opposite sign.
enum class CouplingConvention { kConsistent, kPrinted };

struct FlowParams {
  MassParams masses;
  double Theta = 0.0;  ///< two-centre and E0 flows
  double C = 0.0;      ///< three-body: total angular momentum
  double mprime = 1.0; ///< three-body: mass m' of the outer body
  CouplingConvention coupling = CouplingConvention::kConsistent;
};

/// Three-body state with its constant total angular momentum.
struct ThreeBodyState {
  double R = 0.0;
  double r = 1.0;
  double L = 1.0;
  double ell = 0.0;
  double G = 0.5;
  double gbar = 0.0;
  double C = 1.0;

  PhaseState phase() const { return {R, r, L, ell, G, gbar}; }
};

/// H = J + K + f with
///   J = -m³M²/(2L²) - m M / |x - x'|
///   K = R²/(2m') + C²/(2m' r²) - m' M'/r
///   f = (G² - 2CG)/(2m' r²) + (κ/m0)((C - G)/r y1 - R y2)
struct ThreeBodyParts {
  double J = 0.0;
  double K = 0.0;
  double f = 0.0;
  double total() const { return J + K + f; }
};

ThreeBodyParts threebody_parts(const ThreeBodyState& s, const FlowParams& p);
double threebody_hamiltonian(const ThreeBodyState& s, const FlowParams& p);

/// Components (y1, y2) of the Kepler velocity in the perihelion frame.
std::array<double, 2> kepler_velocity_components(double L, double G, double ell, double gbar,
                                                 const MassParams& masses);

/// Equilibrium radius C²/(m'² M') of K(R, r).
double radial_equilibrium(double C, double mprime, double Mprime);

/// Hamiltonian value at a phase state.
double hamiltonian_value(HamiltonianKind kind, const PhaseState& s, const FlowParams& p);

/// Gradient (∂R, ∂r, ∂L, ∂ell, ∂G, ∂gbar) of the Hamiltonian, analytic
/// (eccentric anomaly differentiated through Kepler's equation).
std::array<double, 6> hamiltonian_gradient(HamiltonianKind kind, const PhaseState& s,
                                           const FlowParams& p);

/// Hamilton's equations: dR = -H_r, dr = H_R, dL = -H_ell, dell = H_L,
/// dG = -H_gbar, dgbar = H_G. Throws DomainError when the state leaves the
/// guard band (e <= 1e-9, G/L >= 1 - 1e-9, G <= 0 outside the E0 flow, collision).
PhaseState hamiltonian_rhs(HamiltonianKind kind, const PhaseState& s, const FlowParams& p);

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = 0.0;   ///< 0: unbounded
  double t0 = 0.0;
  double t_end = 1.0;
  double sample_dt = 0.0;  ///< 0: one sample per accepted step
  long max_steps = 50000000;  ///< accepted plus rejected steps

  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  PhaseState state;
  double H = 0.0;
  double E = 0.0;  ///< Euler integral (two-centre runs), else 0
  double Theta = 0.0;
};

enum class Termination { kCompleted, kGuardTrip, kMaxSteps };

std::string to_string(Termination t);

struct IntegrationReport {
  Termination termination = Termination::kCompleted;
  std::string reason;
  double t_final = 0.0;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  std::size_t samples = 0;
  TrajectorySample first;
  TrajectorySample last;
  double max_rel_drift_H = 0.0;
  double max_rel_drift_E = 0.0;
};

/// Raised when the step size collapses; carries the last accepted sample.
class IntegrationError : public NumericError {
 public:
  IntegrationError(const std::string& what, TrajectorySample last)
      : NumericError(what), last_sample(last) {}
  TrajectorySample last_sample;
};

using SampleSink = std::function<void(const TrajectorySample&)>;

/// Integrates the flow of `kind` with DOP853. Samples go to `sink` (may be
/// empty) in time order, starting with the initial state.
IntegrationReport integrate(HamiltonianKind kind, const PhaseState& initial, const FlowParams& p,
                            const IntegratorConfig& cfg, const SampleSink& sink = nullptr);

/// Same, collecting the samples.
std::vector<TrajectorySample> integrate_collect(HamiltonianKind kind, const PhaseState& initial,
                                                const FlowParams& p, const IntegratorConfig& cfg,
                                                IntegrationReport* report = nullptr);

/// Cartesian two-centre flow of (y, x) with x' fixed. Samples carry J, the
/// Euler integral and Theta = (x × y)·x'/|x'|.
struct CartesianSample {
  double t = 0.0;
  Vec3 y = Vec3::Zero();
  Vec3 x = Vec3::Zero();
  double J = 0.0;
  double E = 0.0;
  double Theta = 0.0;
};

IntegrationReport integrate_two_centre_cartesian(const CartesianState& initial,
                                                 const MassParams& masses,
                                                 const IntegratorConfig& cfg,
                                                 const std::function<void(const CartesianSample&)>& sink);

/// Planar (Θ = 0) E0 flow in the chart q = -sqrt(2(L - G)) sin ḡ,
/// p = sqrt(2(L - G)) cos ḡ, which stays regular through the circular orbit
/// G = L where (G, ḡ) break down. With k = m² M r,
///   E0 = (L - I)² + (k/L) (p/√2) sqrt(2L - I),  I = (q² + p²)/2,
/// and q̇ = ∂E0/∂p, ṗ = -∂E0/∂q. Valid for I < 2L (G > -L).
struct RegularPoint {
  double q = 0.0;
  double p = 0.0;
};
RegularPoint to_regular(double L, double G, double gbar);
/// Inverse map; returns (G, ḡ) with ḡ in (-π, π] (ḡ = 0 at the origin).
std::pair<double, double> from_regular(double L, const RegularPoint& z);
double e0_regular(double L, double k, const RegularPoint& z);
RegularPoint e0_regular_rhs(double L, double k, const RegularPoint& z);

struct RegularSample {
  double t = 0.0;
  RegularPoint z;
  double G = 0.0;
  double gbar = 0.0;
  double E0 = 0.0;
};

/// Integrates the regular-chart E0 flow for L, r and masses (Θ = 0), with
/// samples as in integrate(). Throws DomainError if I leaves [0, 2L) and
/// IntegrationError on step underflow.
IntegrationReport integrate_e0_regular(double L, double r, const MassParams& masses,
                                       const RegularPoint& initial, const IntegratorConfig& cfg,
                                       const std::function<void(const RegularSample&)>& sink = nullptr);

/// Keplerian period 2π L³ / (m³ M²).
double inner_period(double L, const MassParams& masses);

/// The planar three-body experiment: initial datum, masses and C.
struct ReferenceExperiment {
  PhaseState initial{7.071067e-5, 100.0, 2.236067e-2, 0.751906, 1.596860e-2,
                     3.14159265358979323846};
  double C = 7.087036;
  double m0 = 1.0;
  CouplingConvention coupling = CouplingConvention::kConsistent;
  IntegratorConfig cfg{1e-13, 1e-15, 0.0, 0.0, 10.0, 1e-2};

  /// m = m' = m0/2, M = M' = 2 m0.
  FlowParams params() const;
};

struct ExperimentSummary {
  double a = 0.0;
  double delta = 0.0;
  double r_equilibrium = 0.0;
  double H0 = 0.0;
  double max_rel_drift_H = 0.0;
  double r_min = 0.0;
  double r_mean = 0.0;
  double r_max = 0.0;
  double gbar_min = 0.0;  ///< continuous branch through the initial value
  double gbar_max = 0.0;
  double G_min = 0.0;
  double G_max = 0.0;
  IntegrationReport report;
};

ExperimentSummary run_reference_experiment(const ReferenceExperiment& exp, const SampleSink& sink = nullptr);

}  // namespace euler2c
