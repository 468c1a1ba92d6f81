#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "euler2c/dynamics.hpp"
#include "euler2c/errors.hpp"
#include "euler2c/hamiltonians.hpp"
#include "euler2c/kepler.hpp"
#include "euler2c/portrait.hpp"
#include "euler2c/secular.hpp"
#include "output.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace euler2c::cli {
namespace {

constexpr int kExitFailure = 1;
constexpr int kExitError = 3;

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
  } else {
    write_atomic(path, text);
  }
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw CLI::ValidationError("not a number: '" + s + "'");
  }
  return v;
}

// ---- config files -------------------------------------------------------

std::string config_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number()) return v.dump();
  throw CLI::ValidationError("config: unsupported value " + v.dump());
}

std::string normalise_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

// Values from the config file fill every option not given on the command line.
// A top-level object keyed by the subcommand name takes precedence over the
// flat top level.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot read config file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("config " + path + ": " + e.what());
  }
  if (!root.is_object()) throw CLI::ValidationError("config " + path + ": top level must be an object");
  const json& cfg = root.contains(sub->get_name()) && root[sub->get_name()].is_object()
                        ? root[sub->get_name()]
                        : root;

  std::map<std::string, CLI::Option*> by_name;
  for (CLI::Option* opt : sub->get_options()) {
    if (!opt->get_lnames().empty()) by_name[opt->get_lnames().front()] = opt;
  }
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_object()) continue;  // section for another subcommand
    const std::string name = normalise_key(key);
    const auto it = by_name.find(name);
    if (it == by_name.end() || name == "config" || name == "help") {
      throw CLI::ValidationError("config " + path + ": unknown key '" + key + "' for " + sub->get_name());
    }
    CLI::Option* opt = it->second;
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      std::vector<std::string> items;
      for (const auto& v : value) items.push_back(config_scalar(v));
      opt->add_result(items);
    } else {
      opt->add_result(config_scalar(value));
    }
    opt->run_callback();
  }
}

// ---- shared option groups ---------------------------------------------

void add_masses(CLI::App* app, MassParams& m) {
  app->add_option("--m", m.m, "mass of the moving body")->capture_default_str();
  app->add_option("--M", m.M, "mass of the centre at the origin")->capture_default_str();
  app->add_option("--Mprime", m.Mprime, "mass of the second centre")->capture_default_str();
}

json masses_json(const MassParams& m) {
  return {{"m", m.m}, {"M", m.M}, {"Mprime", m.Mprime}, {"m0", m.m0}};
}

json report_json(const IntegrationReport& r) {
  return {{"termination", to_string(r.termination)},
          {"reason", r.reason},
          {"t_final", r.t_final},
          {"accepted_steps", r.accepted},
          {"rejected_steps", r.rejected},
          {"evaluations", r.evaluations},
          {"samples", r.samples},
          {"max_rel_drift_H", r.max_rel_drift_H},
          {"max_rel_drift_E", r.max_rel_drift_E}};
}

json config_json(const IntegratorConfig& c) {
  return {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}, {"max_step", c.max_step},
          {"t0", c.t0},           {"t_end", c.t_end},     {"sample_dt", c.sample_dt},
          {"max_steps", c.max_steps}};
}

json state_json(const PhaseState& s) {
  return {{"R", s.R}, {"r", s.r}, {"L", s.L}, {"ell", s.ell}, {"G", s.G}, {"gbar", s.gbar}};
}

void add_integrator(CLI::App* app, IntegratorConfig& c) {
  app->add_option("--rel-tol", c.rel_tol, "relative local error tolerance")->capture_default_str();
  app->add_option("--abs-tol", c.abs_tol, "absolute local error tolerance")->capture_default_str();
  app->add_option("--max-step", c.max_step, "step bound, 0 for none")->capture_default_str();
  app->add_option("--t-end", c.t_end, "final time")->capture_default_str();
  app->add_option("--sample-dt", c.sample_dt, "output cadence, 0 for every step")->capture_default_str();
  app->add_option("--max-steps", c.max_steps, "step budget")->capture_default_str();
}

void add_state(CLI::App* app, PhaseState& s) {
  app->add_option("--R", s.R, "radial impulse")->capture_default_str();
  app->add_option("--r", s.r, "distance of the second centre")->capture_default_str();
  app->add_option("--L", s.L, "Delaunay action")->capture_default_str();
  app->add_option("--ell", s.ell, "mean anomaly")->capture_default_str();
  app->add_option("--G", s.G, "modulus of the inner angular momentum")->capture_default_str();
  app->add_option("--gbar", s.gbar, "perihelion angle")->capture_default_str();
}

void write_curve(const std::string& path, const std::vector<CurvePoint>& pts, const std::string& regime) {
  CsvTable t({"gbar", "Ghat", "branch", "regime"});
  for (const auto& p : pts) {
    t.row_cells({format_double(p.gbar), format_double(p.Ghat), std::to_string(p.branch), regime});
  }
  write_atomic(path, t.text());
}

json critical_json(double delta) {
  json arr = json::array();
  for (const auto& c : critical_points(delta)) {
    arr.push_back({{"gbar", c.gbar}, {"Ghat", c.Ghat}, {"value", c.value}, {"kind", to_string(c.kind)}});
  }
  return arr;
}

// Writes S0.csv (when it exists) and S1.csv; returns the manifest fragment.
json write_separatrices(const fs::path& dir, double delta, int samples) {
  const Separatrices s = separatrices(delta, samples);
  json j{{"has_s0", s.has_s0}, {"s1_file", "S1.csv"}};
  if (s.has_s0) {
    write_curve((dir / "S0.csv").string(), s.s0, classify_regime(delta, delta).tag());
    j["s0_file"] = "S0.csv";
  } else {
    j["s0_file"] = nullptr;
    j["s0_note"] = "no saddle for delta >= 2";
  }
  write_curve((dir / "S1.csv").string(), s.s1, "S1");
  return j;
}

// Critical values and the midpoints between them, in increasing order.
std::vector<double> auto_levels(double delta) {
  const auto [lo, hi] = level_range(delta);
  std::set<double> marks{lo, hi};
  for (double v : {delta, 1.0}) {
    if (v > lo && v < hi) marks.insert(v);
  }
  std::vector<double> out;
  double prev = 0.0;
  bool first = true;
  for (double v : marks) {
    if (!first) out.push_back(0.5 * (prev + v));
    out.push_back(v);
    prev = v;
    first = false;
  }
  return out;
}

// ---- portrait ----------------------------------------------------------

struct PortraitOpts {
  std::string config;
  double delta = 0.5;
  std::vector<std::string> levels{"auto"};
  int samples = 200;
  std::string out_dir = "portrait";
};

int run_portrait(const PortraitOpts& o) {
  const fs::path dir(o.out_dir);
  std::vector<double> levels;
  for (const auto& s : o.levels) {
    if (s == "auto") {
      const auto a = auto_levels(o.delta);
      levels.insert(levels.end(), a.begin(), a.end());
    } else {
      levels.push_back(parse_double(s));
    }
  }

  std::vector<json> entries(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    json e{{"index", i}, {"ehat", levels[i]}};
    try {
      const RegimeLabel lab = classify_regime(o.delta, levels[i]);
      const auto pts = sample_level(levels[i], o.delta, o.samples);
      const std::string file = "level_" + std::to_string(i) + ".csv";
      write_curve((dir / file).string(), pts, lab.tag());
      e["file"] = file;
      e["regime"] = lab.tag();
      e["curve"] = to_string(lab.curve);
      if (!lab.note.empty()) e["note"] = lab.note;
      e["points"] = pts.size();
    } catch (const DomainError& err) {
      e["error"] = err.what();
    }
    entries[i] = std::move(e);
  });

  const auto [lo, hi] = level_range(o.delta);
  json manifest{{"delta", o.delta}, {"level_range", {lo, hi}}, {"samples_per_branch", o.samples}};
  manifest.update(write_separatrices(dir, o.delta, o.samples));
  write_json(dir / "critical_points.json", {{"delta", o.delta}, {"points", critical_json(o.delta)}});
  manifest["critical_points_file"] = "critical_points.json";
  manifest["levels"] = entries;
  write_json(dir / "manifest.json", manifest);

  int failed = 0;
  for (const auto& e : entries) {
    if (e.contains("error")) {
      std::cerr << "level " << e["ehat"].get<double>() << ": " << e["error"].get<std::string>() << "\n";
      ++failed;
    }
  }
  return failed > 0 ? kExitFailure : 0;
}

// ---- separatrix --------------------------------------------------------

struct SeparatrixOpts {
  std::string config;
  double delta = 0.5;
  int samples = 200;
  std::string out_dir = "separatrix";
};

int run_separatrix(const SeparatrixOpts& o) {
  const fs::path dir(o.out_dir);
  json manifest{{"delta", o.delta}, {"samples", o.samples}};
  manifest.update(write_separatrices(dir, o.delta, o.samples));
  write_json(dir / "manifest.json", manifest);
  return 0;
}

// ---- collision-orbit ---------------------------------------------------

struct CollisionOpts {
  std::string config;
  double delta = 0.5;
  double L = 1.0;
  double t0 = 0.0;
  double span = 5.0;
  int samples = 401;
  int branch = 1;
  std::string out = "-";
};

int run_collision(const CollisionOpts& o) {
  if (!(o.delta > 0.0 && o.delta < 2.0)) throw DomainError("collision-orbit needs 0 < delta < 2");
  if (o.samples < 2) throw DomainError("collision-orbit needs at least two samples");
  const double sigma = std::sqrt(o.delta * (2.0 - o.delta));
  const double half = o.span / (sigma * o.L);
  CsvTable t({"t", "G", "gbar", "Ghat", "E0hat"});
  for (int k = 0; k < o.samples; ++k) {
    const double tt = o.t0 - half + 2.0 * half * k / (o.samples - 1);
    const auto [G, g] = collision_orbit(o.delta, o.L, tt, o.t0, o.branch);
    t.row({tt, G, g, G / o.L, ehat0(g, G / o.L, o.delta)});
  }
  emit(o.out, t.text());
  return 0;
}

// ---- action-angle ------------------------------------------------------

struct ActionAngleOpts {
  std::string config;
  double Lcal = 1.0;
  std::vector<double> Ecal{-0.7, -0.2, 0.2, 0.7};
  double lambda = 0.0;
  int samples = 64;
  double period_tol = 1e-12;
  std::string out = "-";
  std::string summary;
};

int run_action_angle(const ActionAngleOpts& o) {
  if (o.samples < 1) throw DomainError("action-angle needs at least one sample");
  CsvTable t({"Ecal", "gamma", "L", "G", "ell", "gbar", "Echeck"});
  json periods = json::array();
  for (double E : o.Ecal) {
    const double Gcal = aa_action(o.Lcal, E);
    for (int k = 0; k < o.samples; ++k) {
      const double gamma = kTwoPi * k / o.samples;
      const AAImage img = aa_transform(o.Lcal, Gcal, o.lambda, gamma);
      const double check = std::sqrt(std::max(0.0, 1.0 - img.G * img.G / (img.L * img.L))) * std::cos(img.gbar);
      t.row({E, gamma, img.L, img.G, img.ell, img.gbar, check});
    }
    if (!o.summary.empty()) {
      const double T = leading_flow_period(o.Lcal, E, o.period_tol);
      periods.push_back({{"Ecal", E}, {"period", T}, {"expected", kTwoPi * o.Lcal},
                         {"relative_error", std::abs(T - kTwoPi * o.Lcal) / (kTwoPi * o.Lcal)}});
    }
  }
  emit(o.out, t.text());
  if (!o.summary.empty()) emit(o.summary, json{{"Lcal", o.Lcal}, {"periods", periods}}.dump(2) + "\n");
  return 0;
}

// ---- average -----------------------------------------------------------

struct AverageOpts {
  std::string config;
  MassParams masses;
  double r = 0.5;
  double L = 1.0;
  double Theta = 0.0;
  double G = 0.6;
  double gbar = 1.0;
  QuadratureSpec quad;
  int grid = 0;
  std::string out = "-";
};

int run_average(const AverageOpts& o) {
  o.masses.validate();
  o.quad.validate();
  if (o.grid > 0) {
    // U and E0 on a (G, gbar) grid with G in the open interval (|Theta|, L).
    const std::size_t n = static_cast<std::size_t>(o.grid);
    std::vector<std::array<double, 4>> rows(n * n);
    std::vector<std::string> errors(n * n);
    const double g_lo = std::abs(o.Theta);
    parallel_for(rows.size(), [&](std::size_t idx) {
      const std::size_t i = idx / n, j = idx % n;
      const double G = g_lo + (o.L - g_lo) * (i + 0.5) / n;
      const double g = kTwoPi * j / n;
      double U = std::nan("");
      try {
        U = average_potential(o.r, o.L, o.Theta, G, g, o.masses, o.quad);
      } catch (const CollisionError&) {
        // left as NaN: the orbit meets the centre
      }
      rows[idx] = {G, g, U, e0_in_k(o.L, G, o.Theta, o.r, g, o.masses)};
    });
    CsvTable t({"G", "gbar", "U", "E0"});
    for (const auto& r : rows) t.row({r[0], r[1], r[2], r[3]});
    emit(o.out, t.text());
    return 0;
  }

  const QuadratureResult q = average_potential_detail(o.r, o.L, o.Theta, o.G, o.gbar, o.masses, o.quad);
  const double E0 = e0_in_k(o.L, o.G, o.Theta, o.r, o.gbar, o.masses);
  const double a = semi_major_axis(o.L, o.masses);
  json j{{"r", o.r},
         {"L", o.L},
         {"Theta", o.Theta},
         {"G", o.G},
         {"gbar", o.gbar},
         {"masses", masses_json(o.masses)},
         {"a", a},
         {"U", q.value},
         {"nodes", q.nodes},
         {"last_change", q.last_change},
         {"min_radicand", q.min_radicand},
         {"E0", E0}};
  // The normal form is only defined for Theta² <= E0 <= L².
  if (E0 >= o.Theta * o.Theta && E0 <= o.L * o.L) {
    const EIParams ei = ei_params(o.L, o.Theta, E0);
    const double F = f_tilde(o.r, a, ei.Ecal, ei.Ical, o.quad);
    j["Ecal"] = ei.Ecal;
    j["Ical"] = ei.Ical;
    j["Ftilde"] = F;
    j["normal_form_residual"] = std::abs(o.masses.m * o.masses.Mprime * F + q.value);
  } else {
    j["Ftilde"] = nullptr;
    j["note"] = "E0 outside [Theta^2, L^2]: no normal form";
  }
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

// ---- verify ------------------------------------------------------------

struct VerifyCliOpts {
  std::string config;
  VerifyOptions v;
  std::string json_out;
};

int run_verify_cmd(const VerifyCliOpts& o) {
  const auto results = run_verify(o.v);
  bool ok = true;
  json suites = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    suites.push_back(to_json(r));
  }
  const json report{{"seed", o.v.seed}, {"passed", ok}, {"suites", suites}};
  if (!o.json_out.empty()) emit(o.json_out, report.dump(2) + "\n");
  if (o.json_out != "-") {
    for (const auto& r : results) {
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.points << " points)";
      if (!r.error.empty()) std::cout << " error: " << r.error;
      std::cout << "\n";
      for (const auto& [k, v] : r.residuals.items()) {
        std::cout << "  " << k << " = " << v.get<double>() << " < " << r.thresholds[k].get<double>() << "\n";
      }
    }
  }
  return ok ? 0 : kExitFailure;
}

// ---- integrate-2c ------------------------------------------------------

struct Integrate2cOpts {
  std::string config;
  std::string kind = "two-centre";
  MassParams masses;
  PhaseState state{0.0, 5.0, 1.0, 0.0, 0.6, 1.0};
  double Theta = 0.0;
  IntegratorConfig cfg{1e-12, 1e-12, 0.0, 0.0, 10.0, 0.01};
  std::string out_dir = "integrate";
};

int run_integrate_2c(const Integrate2cOpts& o) {
  const HamiltonianKind kind = o.kind == "e0" ? HamiltonianKind::kE0 : HamiltonianKind::kTwoCentre;
  FlowParams p;
  p.masses = o.masses;
  p.Theta = o.Theta;
  const fs::path dir(o.out_dir);
  CsvTable t({"t", "R", "r", "L", "ell", "G", "gbar", "H", "E", "Theta"});
  auto sink = [&](const TrajectorySample& s) {
    const PhaseState& x = s.state;
    t.row({s.t, x.R, x.r, x.L, x.ell, x.G, x.gbar, s.H, s.E, s.Theta});
  };
  json summary{{"kind", o.kind},
               {"masses", masses_json(o.masses)},
               {"Theta", o.Theta},
               {"initial", state_json(o.state)},
               {"integrator", config_json(o.cfg)}};
  int code = 0;
  try {
    const IntegrationReport rep = integrate(kind, o.state, p, o.cfg, sink);
    summary["report"] = report_json(rep);
    if (rep.termination != Termination::kCompleted) code = kExitFailure;
  } catch (const IntegrationError& e) {
    summary["report"] = {{"termination", "step_underflow"}, {"reason", e.what()}, {"t_final", e.last_sample.t}};
    code = kExitFailure;
  }
  write_atomic(dir / "trajectory.csv", t.text());
  write_json(dir / "summary.json", summary);
  if (code != 0) std::cerr << "integration stopped early: " << summary["report"]["reason"].get<std::string>() << "\n";
  return code;
}

// ---- experiment --------------------------------------------------------

struct ExperimentOpts {
  std::string config;
  ReferenceExperiment exp;
  std::string coupling = "consistent";
  std::string project;
  std::string out_dir = "experiment";
};

int run_experiment(ExperimentOpts o) {
  o.exp.coupling = o.coupling == "printed" ? CouplingConvention::kPrinted : CouplingConvention::kConsistent;
  const FlowParams p = o.exp.params();
  const fs::path dir(o.out_dir);

  CsvTable traj({"t", "R", "r", "L", "ell", "G", "gbar", "H", "E0hat"});
  std::vector<std::string> proj_cols;
  if (o.project == "g-G") proj_cols = {"gbar", "G"};
  if (o.project == "l-L") proj_cols = {"ell", "L"};
  if (o.project == "r-R") proj_cols = {"r", "R"};
  CsvTable proj(proj_cols.empty() ? std::vector<std::string>{"unused"} : proj_cols);

  auto sink = [&](const TrajectorySample& s) {
    const PhaseState& x = s.state;
    if (o.project == "g-G") {
      proj.row({x.gbar, x.G});
    } else if (o.project == "l-L") {
      proj.row({x.ell, x.L});
    } else if (o.project == "r-R") {
      proj.row({x.r, x.R});
    } else {
      const double delta = delta_parameter(x.r, x.L, p.masses);
      traj.row({s.t, x.R, x.r, x.L, x.ell, x.G, x.gbar, s.H, ehat0(x.gbar, x.G / x.L, delta)});
    }
  };

  json summary{{"initial", state_json(o.exp.initial)},
               {"C", o.exp.C},
               {"m0", o.exp.m0},
               {"masses", masses_json(p.masses)},
               {"mprime", p.mprime},
               {"coupling", o.coupling},
               {"integrator", config_json(o.exp.cfg)}};
  int code = 0;
  try {
    const ExperimentSummary s = run_reference_experiment(o.exp, sink);
    const double lo = std::numbers::pi / 2, hi = 3 * std::numbers::pi / 2;
    summary["a"] = s.a;
    summary["delta"] = s.delta;
    summary["r_equilibrium"] = s.r_equilibrium;
    summary["H0"] = s.H0;
    summary["max_rel_drift_H"] = s.max_rel_drift_H;
    summary["r"] = {{"min", s.r_min}, {"mean", s.r_mean}, {"max", s.r_max}};
    summary["gbar_range"] = {s.gbar_min, s.gbar_max};
    summary["gbar_within_half_plane"] = s.gbar_min > lo && s.gbar_max < hi;
    summary["G_range"] = {s.G_min, s.G_max};
    summary["report"] = report_json(s.report);
    if (s.report.termination != Termination::kCompleted) code = kExitFailure;
  } catch (const IntegrationError& e) {
    summary["report"] = {{"termination", "step_underflow"}, {"reason", e.what()}, {"t_final", e.last_sample.t}};
    code = kExitFailure;
  }
  if (proj_cols.empty()) {
    write_atomic(dir / "trajectory.csv", traj.text());
  } else {
    write_atomic(dir / ("projection_" + o.project + ".csv"), proj.text());
  }
  write_json(dir / "summary.json", summary);
  if (code != 0) std::cerr << "integration stopped early: " << summary["report"]["reason"].get<std::string>() << "\n";
  return code;
}

}  // namespace
}  // namespace euler2c::cli

int main(int argc, char** argv) {
  using namespace euler2c;
  using namespace euler2c::cli;

  CLI::App app{"Two-centre problem in K-coordinates: portraits, checks and flows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "euler2c 1.0.0");

  std::map<CLI::App*, std::string*> configs;
  auto with_config = [&](CLI::App* sub, std::string& path) {
    sub->add_option("--config", path, "JSON file with option values; flags win");
    configs[sub] = &path;
  };

  PortraitOpts po;
  auto* portrait = app.add_subcommand("portrait", "level curves of the normalised secular energy");
  with_config(portrait, po.config);
  portrait->add_option("--delta", po.delta, "r/a")->capture_default_str();
  portrait->add_option("--levels", po.levels, "levels, or 'auto'")->delimiter(',')->capture_default_str();
  portrait->add_option("--samples", po.samples, "points per branch")->capture_default_str();
  portrait->add_option("--out-dir", po.out_dir, "output directory")->capture_default_str();

  SeparatrixOpts so;
  auto* separatrix = app.add_subcommand("separatrix", "the separatrices S0 and S1");
  with_config(separatrix, so.config);
  separatrix->add_option("--delta", so.delta, "r/a")->capture_default_str();
  separatrix->add_option("--samples", so.samples, "points per branch")->capture_default_str();
  separatrix->add_option("--out-dir", so.out_dir, "output directory")->capture_default_str();

  CollisionOpts co;
  auto* collision = app.add_subcommand("collision-orbit", "closed-form motion on S0");
  with_config(collision, co.config);
  collision->add_option("--delta", co.delta, "r/a, in (0, 2)")->capture_default_str();
  collision->add_option("--L", co.L, "Delaunay action")->capture_default_str();
  collision->add_option("--t0", co.t0, "time of closest approach to G = L")->capture_default_str();
  collision->add_option("--span", co.span, "half width in units of 1/(sigma L)")->capture_default_str();
  collision->add_option("--samples", co.samples, "number of rows")->capture_default_str();
  collision->add_option("--branch", co.branch, "+1 or -1")->check(CLI::IsMember({-1, 1}))->capture_default_str();
  collision->add_option("--out", co.out, "CSV path, '-' for stdout")->capture_default_str();

  ActionAngleOpts ao;
  auto* aa = app.add_subcommand("action-angle", "large-r action-angle map");
  with_config(aa, ao.config);
  aa->add_option("--Lcal", ao.Lcal, "action L")->capture_default_str();
  aa->add_option("--Ecal", ao.Ecal, "levels of the leading Hamiltonian")->delimiter(',')->capture_default_str();
  aa->add_option("--lambda", ao.lambda, "angle conjugate to L")->capture_default_str();
  aa->add_option("--samples", ao.samples, "gamma samples per level")->capture_default_str();
  aa->add_option("--period-tol", ao.period_tol, "integrator tolerance for the period")->capture_default_str();
  aa->add_option("--out", ao.out, "CSV path, '-' for stdout")->capture_default_str();
  aa->add_option("--summary", ao.summary, "JSON with measured periods ('-' for stdout)");

  AverageOpts av;
  auto* average = app.add_subcommand("average", "mean-anomaly average of the interaction");
  with_config(average, av.config);
  add_masses(average, av.masses);
  average->add_option("--r", av.r, "distance of the second centre")->capture_default_str();
  average->add_option("--L", av.L, "Delaunay action")->capture_default_str();
  average->add_option("--Theta", av.Theta, "projection of M on x'")->capture_default_str();
  average->add_option("--G", av.G, "|M|")->capture_default_str();
  average->add_option("--gbar", av.gbar, "perihelion angle")->capture_default_str();
  average->add_option("--tol", av.quad.tol, "quadrature tolerance")->capture_default_str();
  average->add_option("--nodes", av.quad.nodes, "initial quadrature nodes")->capture_default_str();
  average->add_option("--grid", av.grid, "tabulate on an N x N (G, gbar) grid")->capture_default_str();
  average->add_option("--out", av.out, "output path, '-' for stdout")->capture_default_str();

  VerifyCliOpts vo;
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  with_config(verify, vo.config);
  std::vector<std::string> suites = suite_names();
  suites.insert(suites.begin(), "all");
  verify->add_option("--suite", vo.v.suite, "suite to run")->check(CLI::IsMember(suites))->capture_default_str();
  verify->add_option("--points", vo.v.points, "points per suite, 0 for the default")->capture_default_str();
  verify->add_option("--seed", vo.v.seed, "random seed")->capture_default_str();
  verify->add_option("--json", vo.json_out, "write the JSON report, '-' for stdout");

  Integrate2cOpts io;
  auto* integ = app.add_subcommand("integrate-2c", "two-centre or secular flow in K-coordinates");
  with_config(integ, io.config);
  integ->add_option("--kind", io.kind, "flow")->check(CLI::IsMember({"two-centre", "e0"}))->capture_default_str();
  add_masses(integ, io.masses);
  add_state(integ, io.state);
  integ->add_option("--Theta", io.Theta, "projection of M on x'")->capture_default_str();
  add_integrator(integ, io.cfg);
  integ->add_option("--out-dir", io.out_dir, "output directory")->capture_default_str();

  ExperimentOpts eo;
  auto* experiment = app.add_subcommand("experiment", "planar three-body run");
  with_config(experiment, eo.config);
  add_state(experiment, eo.exp.initial);
  experiment->add_option("--C", eo.exp.C, "total angular momentum")->capture_default_str();
  experiment->add_option("--m0", eo.exp.m0, "mass scale")->capture_default_str();
  experiment->add_option("--coupling", eo.coupling, "sign of the kinetic coupling")
      ->check(CLI::IsMember({"consistent", "printed"}))
      ->capture_default_str();
  add_integrator(experiment, eo.exp.cfg);
  experiment->add_option("--project", eo.project, "write only a projection")
      ->check(CLI::IsMember({"g-G", "l-L", "r-R"}));
  experiment->add_option("--out-dir", eo.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
    for (auto& [sub, path] : configs) {
      if (sub->parsed() && !path->empty()) apply_config(sub, *path);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (portrait->parsed()) return run_portrait(po);
    if (separatrix->parsed()) return run_separatrix(so);
    if (collision->parsed()) return run_collision(co);
    if (aa->parsed()) return run_action_angle(ao);
    if (average->parsed()) return run_average(av);
    if (verify->parsed()) return run_verify_cmd(vo);
    if (integ->parsed()) return run_integrate_2c(io);
    if (experiment->parsed()) return run_experiment(eo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
