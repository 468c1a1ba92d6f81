#include "euler2c/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "dual.hpp"
#include "euler2c/dop853.hpp"
#include "euler2c/hamiltonians.hpp"

namespace euler2c {
namespace {

using detail::Dual;
using detail::value_of;
using D6 = Dual<6>;
using std::cos;
using std::sin;
using std::sqrt;

constexpr double kGuard = 1e-9;
constexpr double kCollisionFraction = 1e-14;

double eccentric_anomaly(double e, double ell) { return solve_kepler(e, ell); }

// ξ(e, ℓ) with ∂ξ/∂ℓ = 1/ρ and ∂ξ/∂e = sin ξ / ρ.
D6 eccentric_anomaly(const D6& e, const D6& ell) {
  const double xi = solve_kepler(e.v, ell.v);
  const double s = std::sin(xi);
  const double rho = 1.0 - e.v * std::cos(xi);
  D6 out(xi);
  for (int i = 0; i < 6; ++i) out.d[i] = (ell.d[i] + s * e.d[i]) / rho;
  return out;
}

template <class T>
struct Ellipse {
  T a, e, xi, rho, c, s, eta;
};

// Keplerian ellipse of (L, G, ell) with the guard bands of the flows.
template <class T>
Ellipse<T> ellipse(const T& L, const T& G, const T& ell, const MassParams& ms) {
  const double Lv = value_of(L);
  const double Gv = value_of(G);
  if (!(Lv > 0.0)) throw DomainError("guard: L must be positive");
  if (!(Gv > 0.0)) throw DomainError("guard: G reached 0");
  const double ratio = Gv / Lv;
  if (!(ratio < 1.0 - kGuard)) throw DomainError("guard: G/L reached 1 (near-circular orbit)");
  Ellipse<T> el;
  el.eta = G / L;
  el.e = sqrt((1.0 - el.eta) * (1.0 + el.eta));
  if (!(value_of(el.e) > kGuard)) throw DomainError("guard: eccentricity below 1e-9");
  el.a = L * L / (ms.m * ms.m * ms.M);
  el.xi = eccentric_anomaly(el.e, ell);
  el.c = cos(el.xi);
  el.s = sin(el.xi);
  el.rho = 1.0 - el.e * el.c;
  return el;
}

template <class T>
T tilt(const T& G, double Theta) {
  if (Theta == 0.0) return T(1.0);
  const T q = Theta / G;
  if (!(std::abs(value_of(q)) < 1.0 - kGuard)) throw DomainError("guard: |Theta| reached G");
  return sqrt((1.0 - q) * (1.0 + q));
}

template <class T>
T distance(const T& r, const Ellipse<T>& el, const T& tilt_f, const T& gbar) {
  const T p = (el.c - el.e) * cos(gbar) - el.eta * el.s * sin(gbar);
  const T d2 = r * r + 2.0 * r * el.a * tilt_f * p + el.a * el.a * el.rho * el.rho;
  const double floor = kCollisionFraction * (value_of(r) + value_of(el.a));
  if (!(value_of(d2) > floor * floor)) throw CollisionError("collision: |x - x'| vanishes");
  return sqrt(d2);
}

template <class T>
T two_centre(const T& L, const T& G, const T& r, const T& ell, const T& gbar,
             const FlowParams& p) {
  const MassParams& ms = p.masses;
  const Ellipse<T> el = ellipse(L, G, ell, ms);
  const T D = distance(r, el, tilt(G, p.Theta), gbar);
  return -(ms.m * ms.m * ms.m * ms.M * ms.M) / (2.0 * L * L) - ms.m * ms.Mprime / D;
}

template <class T>
T e0_flow(const T& L, const T& G, const T& r, const T& gbar, const FlowParams& p) {
  const MassParams& ms = p.masses;
  const double Lv = value_of(L);
  if (!(Lv > 0.0)) throw DomainError("guard: L must be positive");
  if (!(std::abs(value_of(G)) / Lv < 1.0 - kGuard)) throw DomainError("guard: |G|/L reached 1");
  const T eta = G / L;
  const T e = sqrt((1.0 - eta) * (1.0 + eta));
  T t = T(1.0);
  if (p.Theta != 0.0) {
    if (!(std::abs(value_of(G)) > 0.0)) throw DomainError("guard: G reached 0 with Theta != 0");
    const T q = p.Theta / G;
    if (!(std::abs(value_of(q)) < 1.0 - kGuard)) throw DomainError("guard: |Theta| reached G");
    t = sqrt((1.0 - q) * (1.0 + q));
  }
  return G * G + ms.m * ms.m * ms.M * r * t * e * cos(gbar);
}

template <class T>
struct TBParts {
  T J, K, f;
};

template <class T>
TBParts<T> three_body(const T& R, const T& r, const T& L, const T& ell, const T& G,
                      const T& gbar, const FlowParams& p) {
  const MassParams& ms = p.masses;
  if (!(value_of(r) > 0.0)) throw CollisionError("collision: r reached 0");
  const Ellipse<T> el = ellipse(L, G, ell, ms);
  const T D = distance(r, el, T(1.0), gbar);
  const double mp = p.mprime;
  const double kappa = p.coupling == CouplingConvention::kConsistent ? -1.0 : 1.0;

  const T k = (ms.m * ms.m * ms.M) / (L * el.rho);
  const T cg = cos(gbar);
  const T sg = sin(gbar);
  const T y1 = k * (-sg * el.s + el.eta * cg * el.c);
  const T y2 = k * (cg * el.s + el.eta * sg * el.c);

  TBParts<T> out;
  out.J = -(ms.m * ms.m * ms.m * ms.M * ms.M) / (2.0 * L * L) - ms.m * ms.M / D;
  out.K = R * R / (2.0 * mp) + (p.C * p.C) / (2.0 * mp * r * r) - mp * ms.Mprime / r;
  out.f = (G * G - 2.0 * p.C * G) / (2.0 * mp * r * r) +
          (kappa / ms.m0) * ((p.C - G) / r * y1 - R * y2);
  return out;
}

template <class T>
T evaluate(HamiltonianKind kind, const T& R, const T& r, const T& L, const T& ell, const T& G,
           const T& gbar, const FlowParams& p) {
  switch (kind) {
    case HamiltonianKind::kTwoCentre: return two_centre(L, G, r, ell, gbar, p);
    case HamiltonianKind::kE0: return e0_flow(L, G, r, gbar, p);
    case HamiltonianKind::kThreeBody: {
      const TBParts<T> parts = three_body(R, r, L, ell, G, gbar, p);
      return parts.J + parts.K + parts.f;
    }
  }
  throw DomainError("unknown Hamiltonian kind");
}

void validate_params(HamiltonianKind kind, const FlowParams& p) {
  p.masses.validate();
  if (kind == HamiltonianKind::kThreeBody && !(p.mprime > 0.0)) {
    throw DomainError("three-body flow needs m' > 0");
  }
}

}  // namespace

ThreeBodyParts threebody_parts(const ThreeBodyState& s, const FlowParams& p) {
  FlowParams q = p;
  q.C = s.C;
  validate_params(HamiltonianKind::kThreeBody, q);
  const TBParts<double> t = three_body(s.R, s.r, s.L, s.ell, s.G, s.gbar, q);
  return {t.J, t.K, t.f};
}

double threebody_hamiltonian(const ThreeBodyState& s, const FlowParams& p) {
  return threebody_parts(s, p).total();
}

std::array<double, 2> kepler_velocity_components(double L, double G, double ell, double gbar,
                                                 const MassParams& masses) {
  masses.validate();
  const OrbitalElements el = elements_from_actions(L, G, ell, gbar, masses);
  const double k = masses.m * masses.m * masses.M / (L * el.rho);
  const double eta = G / L;
  const double s = std::sin(el.xi);
  const double c = std::cos(el.xi);
  return {k * (-std::sin(gbar) * s + eta * std::cos(gbar) * c),
          k * (std::cos(gbar) * s + eta * std::sin(gbar) * c)};
}

double radial_equilibrium(double C, double mprime, double Mprime) {
  if (!(mprime > 0.0) || !(Mprime > 0.0)) throw DomainError("radial_equilibrium: masses must be positive");
  return C * C / (mprime * mprime * Mprime);
}

double hamiltonian_value(HamiltonianKind kind, const PhaseState& s, const FlowParams& p) {
  validate_params(kind, p);
  return evaluate<double>(kind, s.R, s.r, s.L, s.ell, s.G, s.gbar, p);
}

std::array<double, 6> hamiltonian_gradient(HamiltonianKind kind, const PhaseState& s,
                                           const FlowParams& p) {
  validate_params(kind, p);
  const D6 R = D6::variable(s.R, 0);
  const D6 r = D6::variable(s.r, 1);
  const D6 L = D6::variable(s.L, 2);
  const D6 ell = D6::variable(s.ell, 3);
  const D6 G = D6::variable(s.G, 4);
  const D6 g = D6::variable(s.gbar, 5);
  return evaluate<D6>(kind, R, r, L, ell, G, g, p).d;
}

PhaseState hamiltonian_rhs(HamiltonianKind kind, const PhaseState& s, const FlowParams& p) {
  const std::array<double, 6> d = hamiltonian_gradient(kind, s, p);
  return {-d[1], d[0], -d[3], d[2], -d[5], d[4]};
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("integrator tolerances must be positive");
  if (!(t_end > t0)) throw DomainError("integrator horizon must satisfy t_end > t0");
  if (!(sample_dt >= 0.0)) throw DomainError("sample_dt must be non-negative");
  if (!(max_step >= 0.0)) throw DomainError("max_step must be non-negative");
  if (max_steps < 1) throw DomainError("max_steps must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kGuardTrip: return "guard_trip";
    case Termination::kMaxSteps: return "max_steps";
  }
  return "?";
}

namespace {

double rel_drift(double v, double v0) {
  return std::abs(v - v0) / std::max(std::abs(v0), 1e-300);
}

Dop853Options dop_options(const IntegratorConfig& cfg) {
  Dop853Options opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  if (cfg.max_step > 0.0) opt.max_step = cfg.max_step;
  opt.max_steps = cfg.max_steps;
  return opt;
}

// Step-clipping schedule for uniform output.
struct SampleClock {
  double t0 = 0.0;
  double dt = 0.0;
  long next = 1;

  double stop_after(double t) {
    while (t0 + next * dt <= t) ++next;
    return t0 + next * dt;
  }
  bool is_sample_time(double t) const { return dt == 0.0 || t == t0 + next * dt; }
};

template <std::size_t N>
void finish_report(IntegrationReport& rep, const Dop853Result& res) {
  rep.t_final = res.t;
  rep.accepted = res.accepted;
  rep.rejected = res.rejected;
  rep.evaluations = res.evaluations;
  switch (res.status) {
    case Dop853Status::kCompleted:
    case Dop853Status::kStopped: rep.termination = Termination::kCompleted; break;
    case Dop853Status::kGuardTrip:
      rep.termination = Termination::kGuardTrip;
      rep.reason = res.reason;
      break;
    case Dop853Status::kMaxSteps:
      rep.termination = Termination::kMaxSteps;
      rep.reason = res.reason;
      break;
    case Dop853Status::kStepUnderflow: break;
  }
}

}  // namespace

IntegrationReport integrate(HamiltonianKind kind, const PhaseState& initial, const FlowParams& p,
                            const IntegratorConfig& cfg, const SampleSink& sink) {
  cfg.validate();
  validate_params(kind, p);
  using Integrator = Dop853<6>;

  auto rhs = [&](double, const Integrator::State& y, Integrator::State& dy) {
    const PhaseState d = hamiltonian_rhs(kind, PhaseState::from_array(y), p);
    dy = d.to_array();
  };
  auto make_sample = [&](double t, const Integrator::State& y) {
    TrajectorySample smp;
    smp.t = t;
    smp.state = PhaseState::from_array(y);
    smp.H = hamiltonian_value(kind, smp.state, p);
    smp.Theta = p.Theta;
    if (kind == HamiltonianKind::kTwoCentre) {
      KCoords k;
      k.Theta = p.Theta;
      k.G = smp.state.G;
      k.L = smp.state.L;
      k.r = smp.state.r;
      k.ell = smp.state.ell;
      k.gbar = smp.state.gbar;
      smp.E = e_in_k(k, p.masses);
    }
    return smp;
  };

  IntegrationReport rep;
  Integrator ode(rhs, dop_options(cfg));
  ode.set_periodic(3);
  Integrator::State y = initial.to_array();
  rep.first = make_sample(cfg.t0, y);
  rep.last = rep.first;
  auto emit = [&](const TrajectorySample& smp) {
    rep.max_rel_drift_H = std::max(rep.max_rel_drift_H, rel_drift(smp.H, rep.first.H));
    if (kind == HamiltonianKind::kTwoCentre) {
      rep.max_rel_drift_E = std::max(rep.max_rel_drift_E, rel_drift(smp.E, rep.first.E));
    }
    rep.last = smp;
    ++rep.samples;
    if (sink) sink(smp);
  };
  emit(rep.first);

  SampleClock clock{cfg.t0, cfg.sample_dt, 1};
  auto observer = [&](double, const Integrator::State&, const Integrator::State&, double t,
                      const Integrator::State& y1) {
    if (clock.is_sample_time(t) || t == cfg.t_end) emit(make_sample(t, y1));
    return true;
  };
  std::function<double(double)> next_stop;
  if (cfg.sample_dt > 0.0) next_stop = [&](double t) { return clock.stop_after(t); };
  const Dop853Result res = ode.integrate(cfg.t0, y, cfg.t_end, observer, next_stop);
  if (res.status == Dop853Status::kStepUnderflow) {
    throw IntegrationError("integration stopped at t=" + std::to_string(res.t) + ": " + res.reason,
                           rep.last);
  }
  finish_report<6>(rep, res);
  return rep;
}

std::vector<TrajectorySample> integrate_collect(HamiltonianKind kind, const PhaseState& initial,
                                                const FlowParams& p, const IntegratorConfig& cfg,
                                                IntegrationReport* report) {
  std::vector<TrajectorySample> out;
  IntegrationReport rep =
      integrate(kind, initial, p, cfg, [&](const TrajectorySample& s) { out.push_back(s); });
  if (report) *report = rep;
  return out;
}

RegularPoint to_regular(double L, double G, double gbar) {
  if (!(L > 0.0) || !(std::abs(G) <= L)) throw DomainError("to_regular: need |G| <= L");
  const double rho = std::sqrt(2.0 * (L - G));
  return {-rho * std::sin(gbar), rho * std::cos(gbar)};
}

std::pair<double, double> from_regular(double L, const RegularPoint& z) {
  const double I = 0.5 * (z.q * z.q + z.p * z.p);
  if (!(L > 0.0) || !(I < 2.0 * L)) throw DomainError("from_regular: need I < 2L");
  const double g = (z.q == 0.0 && z.p == 0.0) ? 0.0 : std::atan2(-z.q, z.p);
  return {L - I, g};
}

namespace {

void check_regular(double L, double I) {
  if (!(L > 0.0)) throw DomainError("regular E0 flow: L must be positive");
  if (!(I < 2.0 * L * (1.0 - kGuard))) throw DomainError("guard: regular chart reached G = -L");
}

}  // namespace

double e0_regular(double L, double k, const RegularPoint& z) {
  const double I = 0.5 * (z.q * z.q + z.p * z.p);
  check_regular(L, I);
  return (L - I) * (L - I) + (k / L) * (z.p / std::numbers::sqrt2) * std::sqrt(2.0 * L - I);
}

RegularPoint e0_regular_rhs(double L, double k, const RegularPoint& z) {
  const double I = 0.5 * (z.q * z.q + z.p * z.p);
  check_regular(L, I);
  const double w = std::sqrt(2.0 * L - I);
  const double dI = -2.0 * (L - I) - (k / L) * (z.p / std::numbers::sqrt2) / (2.0 * w);
  const double dE_dp = dI * z.p + (k / L) * w / std::numbers::sqrt2;
  const double dE_dq = dI * z.q;
  return {dE_dp, -dE_dq};
}

IntegrationReport integrate_e0_regular(double L, double r, const MassParams& masses,
                                       const RegularPoint& initial, const IntegratorConfig& cfg,
                                       const std::function<void(const RegularSample&)>& sink) {
  cfg.validate();
  masses.validate();
  if (!(r > 0.0)) throw DomainError("regular E0 flow: r must be positive");
  const double k = masses.m * masses.m * masses.M * r;
  using Integrator = Dop853<2>;
  auto rhs = [&](double, const Integrator::State& y, Integrator::State& dy) {
    const RegularPoint d = e0_regular_rhs(L, k, {y[0], y[1]});
    dy = {d.q, d.p};
  };
  auto make_sample = [&](double t, const Integrator::State& y) {
    RegularSample smp;
    smp.t = t;
    smp.z = {y[0], y[1]};
    std::tie(smp.G, smp.gbar) = from_regular(L, smp.z);
    smp.E0 = e0_regular(L, k, smp.z);
    return smp;
  };

  IntegrationReport rep;
  Integrator ode(rhs, dop_options(cfg));
  Integrator::State y{initial.q, initial.p};
  RegularSample first = make_sample(cfg.t0, y);
  auto emit = [&](const RegularSample& smp) {
    rep.max_rel_drift_H = std::max(rep.max_rel_drift_H, rel_drift(smp.E0, first.E0));
    ++rep.samples;
    if (sink) sink(smp);
  };
  emit(first);
  SampleClock clock{cfg.t0, cfg.sample_dt, 1};
  auto observer = [&](double, const Integrator::State&, const Integrator::State&, double t,
                      const Integrator::State& y1) {
    if (clock.is_sample_time(t) || t == cfg.t_end) emit(make_sample(t, y1));
    return true;
  };
  std::function<double(double)> next_stop;
  if (cfg.sample_dt > 0.0) next_stop = [&](double t) { return clock.stop_after(t); };
  const Dop853Result res = ode.integrate(cfg.t0, y, cfg.t_end, observer, next_stop);
  if (res.status == Dop853Status::kStepUnderflow) {
    throw IntegrationError("integration stopped at t=" + std::to_string(res.t) + ": " + res.reason,
                           rep.last);
  }
  finish_report<2>(rep, res);
  return rep;
}

IntegrationReport integrate_two_centre_cartesian(
    const CartesianState& initial, const MassParams& masses, const IntegratorConfig& cfg,
    const std::function<void(const CartesianSample&)>& sink) {
  cfg.validate();
  masses.validate();
  using Integrator = Dop853<6>;
  const Vec3 xp = initial.xprime;
  if (!(xp.norm() > 0.0)) throw DomainError("two-centre flow needs x' != 0");
  const Vec3 axis = xp.normalized();

  auto rhs = [&](double, const Integrator::State& s, Integrator::State& ds) {
    const Vec3 y(s[0], s[1], s[2]);
    const Vec3 x(s[3], s[4], s[5]);
    const Vec3 rel = x - xp;
    const double rx = x.norm();
    const double rr = rel.norm();
    if (!(rx > 0.0) || !(rr > 0.0)) throw CollisionError("collision in the Cartesian flow");
    const Vec3 force = -masses.m * masses.M * x / (rx * rx * rx) -
                       masses.m * masses.Mprime * rel / (rr * rr * rr);
    for (int i = 0; i < 3; ++i) {
      ds[i] = force[i];
      ds[3 + i] = y[i] / masses.m;
    }
  };
  auto make_sample = [&](double t, const Integrator::State& s) {
    CartesianSample smp;
    smp.t = t;
    smp.y = Vec3(s[0], s[1], s[2]);
    smp.x = Vec3(s[3], s[4], s[5]);
    CartesianState cs{initial.yprime, smp.y, xp, smp.x};
    smp.J = two_centre_energy_cartesian(cs, masses);
    smp.E = euler_integral_cartesian(cs, masses);
    smp.Theta = smp.x.cross(smp.y).dot(axis);
    return smp;
  };

  IntegrationReport rep;
  Integrator ode(rhs, dop_options(cfg));
  Integrator::State s = {initial.y[0], initial.y[1], initial.y[2],
                         initial.x[0], initial.x[1], initial.x[2]};
  const CartesianSample first = make_sample(cfg.t0, s);
  double max_e = 0.0;
  double max_h = 0.0;
  auto emit = [&](const CartesianSample& smp) {
    max_h = std::max(max_h, rel_drift(smp.J, first.J));
    max_e = std::max(max_e, rel_drift(smp.E, first.E));
    ++rep.samples;
    if (sink) sink(smp);
  };
  emit(first);
  SampleClock clock{cfg.t0, cfg.sample_dt, 1};
  auto observer = [&](double, const Integrator::State&, const Integrator::State&, double t,
                      const Integrator::State& y1) {
    if (clock.is_sample_time(t) || t == cfg.t_end) emit(make_sample(t, y1));
    return true;
  };
  std::function<double(double)> next_stop;
  if (cfg.sample_dt > 0.0) next_stop = [&](double t) { return clock.stop_after(t); };
  const Dop853Result res = ode.integrate(cfg.t0, s, cfg.t_end, observer, next_stop);
  if (res.status == Dop853Status::kStepUnderflow) {
    throw NumericError("Cartesian two-centre flow: " + res.reason);
  }
  finish_report<6>(rep, res);
  rep.max_rel_drift_H = max_h;
  rep.max_rel_drift_E = max_e;
  return rep;
}

double inner_period(double L, const MassParams& masses) {
  masses.validate();
  const double m = masses.m;
  return kTwoPi * L * L * L / (m * m * m * masses.M * masses.M);
}

FlowParams ReferenceExperiment::params() const {
  FlowParams p;
  p.masses = {0.5 * m0, 2.0 * m0, 2.0 * m0, m0};
  p.mprime = 0.5 * m0;
  p.C = C;
  p.Theta = 0.0;
  p.coupling = coupling;
  return p;
}

ExperimentSummary run_reference_experiment(const ReferenceExperiment& exp, const SampleSink& sink) {
  const FlowParams p = exp.params();
  ExperimentSummary sum;
  sum.a = semi_major_axis(exp.initial.L, p.masses);
  sum.delta = exp.initial.r / sum.a;
  sum.r_equilibrium = radial_equilibrium(exp.C, p.mprime, p.masses.Mprime);

  double r_sum = 0.0;
  long n = 0;
  double prev_g = exp.initial.gbar;
  double g_cont = exp.initial.gbar;
  sum.r_min = sum.r_max = exp.initial.r;
  sum.gbar_min = sum.gbar_max = exp.initial.gbar;
  sum.G_min = sum.G_max = exp.initial.G;
  auto track = [&](const TrajectorySample& s) {
    r_sum += s.state.r;
    ++n;
    sum.r_min = std::min(sum.r_min, s.state.r);
    sum.r_max = std::max(sum.r_max, s.state.r);
    g_cont += wrap_pi(s.state.gbar - prev_g);
    prev_g = s.state.gbar;
    sum.gbar_min = std::min(sum.gbar_min, g_cont);
    sum.gbar_max = std::max(sum.gbar_max, g_cont);
    sum.G_min = std::min(sum.G_min, s.state.G);
    sum.G_max = std::max(sum.G_max, s.state.G);
    if (sink) sink(s);
  };
  sum.report = integrate(HamiltonianKind::kThreeBody, exp.initial, p, exp.cfg, track);
  sum.H0 = sum.report.first.H;
  sum.max_rel_drift_H = sum.report.max_rel_drift_H;
  sum.r_mean = n > 0 ? r_sum / n : exp.initial.r;
  return sum;
}

}  // namespace euler2c
