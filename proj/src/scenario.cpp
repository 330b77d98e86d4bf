#include "cranelab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "cranelab/errors.hpp"

namespace cranelab {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Unit swing-chain terms of the coupled counterexample pair: the degenerate
// two-link arm's unactuated chain (f2 = 0, b2 = -1).
constexpr PlantTerms kUnitPairTerms{0.0, 0.0, 0.0, -1.0};

PlantTerms coupled_terms(double k) {
  // f1 = k*f2, b1 = k*b2 seen by a controller driving the coupled pair.
  return {k * kUnitPairTerms.f2, k * kUnitPairTerms.b2, kUnitPairTerms.f2,
          kUnitPairTerms.b2};
}

double profile_value(UProfile p, double t) {
  switch (p) {
    case UProfile::Zero: return 0.0;
    case UProfile::SinT: return std::sin(t);
    case UProfile::CosT: return std::cos(t);
  }
  return 0.0;
}

bool metric_requested(const Scenario& sc, const char* name) {
  return std::find(sc.metrics.begin(), sc.metrics.end(), name) != sc.metrics.end();
}

void validate_scenario(const Scenario& sc) {
  sc.crane.validate();
  sc.integrator.validate();
  for (const auto& m : sc.metrics) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), m) == kMetricNames.end())
      throw ConfigError("unknown metric '" + m + "'");
  }
  switch (sc.controller) {
    case ControllerKind::Ihssmc:
      sc.ihssmc.validate();
      if (sc.plant == PlantKind::ReducedPendulum)
        throw ConfigError("the reduced pendulum takes no controller");
      break;
    case ControllerKind::Ahssmc:
      sc.ahssmc.validate();
      if (sc.plant != PlantKind::Crane)
        throw ConfigError("the aggregated law is defined for the crane only");
      break;
    case ControllerKind::Linear:
      if (sc.plant != PlantKind::Crane)
        throw ConfigError("linear feedback is defined for the crane only");
      break;
    case ControllerKind::None:
      break;
  }
  if (sc.plant == PlantKind::CoupledPair && sc.coupling_k == 0.0)
    throw ZeroCouplingError("coupled pair requires a nonzero coupling constant");
}

// Control input at one state; singular states yield NaN in the recorded
// column (the run itself ends with status SingularGain at that point).
double control_at(const Scenario& sc, double t, const StateVec& s) {
  try {
    switch (sc.controller) {
      case ControllerKind::None:
        return profile_value(sc.profile, t);
      case ControllerKind::Ihssmc: {
        PlantTerms terms;
        if (sc.plant == PlantKind::Crane) terms = crane_terms(s, sc.crane);
        else if (sc.plant == PlantKind::CoupledPair) terms = coupled_terms(sc.coupling_k);
        else terms = PlantTerms{0.0, 1.0, 0.0, -1.0};  // degenerate arm
        return ihssmc_control(s, sc.ihssmc, terms);
      }
      case ControllerKind::Ahssmc:
        return ahssmc_control(s, sc.ahssmc, crane_terms(s, sc.crane));
      case ControllerKind::Linear:
        return linear_feedback(s, sc.gain, sc.crane.target);
    }
  } catch (const SingularGainError&) {
    return kNan;
  }
  return 0.0;
}

RhsFn make_rhs(const Scenario& sc) {
  switch (sc.plant) {
    case PlantKind::Crane:
      return [sc](double t, std::span<const double> y, std::span<double> d) {
        const StateVec s{y[0], y[1], y[2], y[3]};
        const PlantTerms terms = crane_terms(s, sc.crane);
        double u = 0.0;
        switch (sc.controller) {
          case ControllerKind::None: u = profile_value(sc.profile, t); break;
          case ControllerKind::Ihssmc: u = ihssmc_control(s, sc.ihssmc, terms); break;
          case ControllerKind::Ahssmc: u = ahssmc_control(s, sc.ahssmc, terms); break;
          case ControllerKind::Linear: u = linear_feedback(s, sc.gain, sc.crane.target); break;
        }
        d[0] = s.x2;
        d[1] = terms.f1 + terms.b1 * u;
        d[2] = s.x4;
        d[3] = terms.f2 + terms.b2 * u;
      };
    case PlantKind::DegeneratePendubot:
      return [sc](double t, std::span<const double> y, std::span<double> d) {
        const StateVec s{y[0], y[1], y[2], y[3]};
        const double u = (sc.controller == ControllerKind::Ihssmc)
                             ? ihssmc_control(s, sc.ihssmc, PlantTerms{0.0, 1.0, 0.0, -1.0})
                             : profile_value(sc.profile, t);
        const StateVec r = degenerate_pendubot_derivative(s, u);
        d[0] = r.x1; d[1] = r.x2; d[2] = r.x3; d[3] = r.x4;
      };
    case PlantKind::CoupledPair:
      return [sc](double t, std::span<const double> y, std::span<double> d) {
        const StateVec s{y[0], y[1], y[2], y[3]};
        const double u = (sc.controller == ControllerKind::Ihssmc)
                             ? ihssmc_control(s, sc.ihssmc, coupled_terms(sc.coupling_k))
                             : profile_value(sc.profile, t);
        const StateVec r = coupled_pair_derivative(s, u, sc.coupling_k, kUnitPairTerms);
        d[0] = r.x1; d[1] = r.x2; d[2] = r.x3; d[3] = r.x4;
      };
    case PlantKind::ReducedPendulum:
      return [sc](double, std::span<const double> y, std::span<double> d) {
        const auto [x3dot, x4dot] = asymptotic_pendulum_derivative(y[2], y[3], sc.crane);
        d[0] = 0.0;
        d[1] = 0.0;
        d[2] = x3dot;
        d[3] = x4dot;
      };
  }
  throw ConfigError("unknown plant kind");
}

void fill_columns(const Scenario& sc, Trajectory& traj) {
  const std::size_t n = traj.size();
  traj.controls.resize(n);
  const bool sliding = sc.controller == ControllerKind::Ihssmc ||
                       sc.controller == ControllerKind::Ahssmc;
  if (sliding) traj.surfaces.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const StateVec s{traj.states[i][0], traj.states[i][1], traj.states[i][2],
                     traj.states[i][3]};
    traj.controls[i] = control_at(sc, traj.times[i], s);
    if (sc.controller == ControllerKind::Ihssmc)
      traj.surfaces[i] = ihssmc_surfaces(s, sc.ihssmc);
    else if (sc.controller == ControllerKind::Ahssmc)
      traj.surfaces[i] = ahssmc_surfaces(s, sc.ahssmc);
  }
}

MetricsReport compute_metrics(const Scenario& sc, const Trajectory& traj) {
  MetricsReport r;
  if (traj.empty()) return r;
  const double horizon = sc.integrator.t_end;
  const double target = (sc.plant == PlantKind::Crane) ? sc.crane.target : 0.0;

  if (metric_requested(sc, "final_error")) {
    const auto& last = traj.states.back();
    r.final_error = std::max({std::abs(last[0] - target), std::abs(last[1]),
                              std::abs(last[2]), std::abs(last[3])});
  }
  if (metric_requested(sc, "s1_settle_time") && !traj.surfaces.empty()) {
    std::ptrdiff_t last_violation = -1;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (std::abs(traj.surfaces[i].s1) > kSettleBand)
        last_violation = static_cast<std::ptrdiff_t>(i);
    }
    if (last_violation < 0) {
      r.s1_settle_time = traj.times.front();
    } else if (last_violation + 1 < static_cast<std::ptrdiff_t>(traj.size())) {
      r.s1_settle_time = traj.times[static_cast<std::size_t>(last_violation + 1)];
    }
  }
  auto window_max_swing = [&](double t0, double t1) -> std::optional<double> {
    std::optional<double> best;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      if (traj.times[i] >= t0 && traj.times[i] <= t1) {
        const double v = std::abs(traj.states[i][2]);
        best = best ? std::max(*best, v) : v;
      }
    }
    return best;
  };
  if (metric_requested(sc, "swing_amplitude_tail")) {
    r.swing_amplitude_tail = window_max_swing(0.8 * horizon, horizon);
  }
  if (metric_requested(sc, "swing_nondecay_ratio")) {
    const auto early = window_max_swing(0.2 * horizon, 0.4 * horizon);
    const auto tail = window_max_swing(0.8 * horizon, horizon);
    if (early && tail && *early > 0.0) r.swing_nondecay_ratio = *tail / *early;
  }
  if (metric_requested(sc, "divergence_time") && traj.status == RunStatus::Diverged) {
    r.divergence_time = traj.status_time;
  }
  if (metric_requested(sc, "energy_drift") && sc.plant == PlantKind::ReducedPendulum) {
    const double v0 = pendulum_energy(traj.states.front()[2], traj.states.front()[3], sc.crane);
    double drift = 0.0;
    for (const auto& st : traj.states)
      drift = std::max(drift, std::abs(pendulum_energy(st[2], st[3], sc.crane) - v0));
    r.energy_drift = drift;
  }
  return r;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : v) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::exchange(cur, {}));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse number from '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(PlantKind k) {
  switch (k) {
    case PlantKind::Crane: return "crane";
    case PlantKind::DegeneratePendubot: return "degenerate_pendubot";
    case PlantKind::CoupledPair: return "coupled_pair";
    case PlantKind::ReducedPendulum: return "reduced_pendulum";
  }
  return "unknown";
}

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::None: return "none";
    case ControllerKind::Ihssmc: return "ihssmc";
    case ControllerKind::Ahssmc: return "ahssmc";
    case ControllerKind::Linear: return "linear";
  }
  return "unknown";
}

const char* to_string(UProfile p) {
  switch (p) {
    case UProfile::Zero: return "zero";
    case UProfile::SinT: return "sin";
    case UProfile::CosT: return "cos";
  }
  return "unknown";
}

RunResult run_scenario(const Scenario& s) {
  RunResult result;
  result.scenario = s;
  validate_scenario(result.scenario);
  if (result.scenario.controller == ControllerKind::Linear &&
      result.scenario.gain.k.empty()) {
    std::vector<std::complex<double>> poles(kDefaultPoles.begin(), kDefaultPoles.end());
    result.scenario.gain =
        ackermann_gain(crane_linearization(result.scenario.crane), poles);
  }
  const RhsFn rhs = make_rhs(result.scenario);
  result.trajectory = integrate(rhs, result.scenario.y0, result.scenario.integrator);
  fill_columns(result.scenario, result.trajectory);
  result.metrics = compute_metrics(result.scenario, result.trajectory);
  return result;
}

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> scenarios = [] {
    std::vector<Scenario> v;

    Scenario fig_b;
    fig_b.name = "fig_b";
    fig_b.description =
        "crane under the incremental hierarchical law: cart reaches the target, "
        "swing settles into a persistent oscillation";
    fig_b.plant = PlantKind::Crane;
    fig_b.controller = ControllerKind::Ihssmc;
    fig_b.metrics = {"final_error", "s1_settle_time", "swing_amplitude_tail",
                     "swing_nondecay_ratio"};
    v.push_back(fig_b);

    Scenario fig_c;
    fig_c.name = "fig_c";
    fig_c.description =
        "crane under linear pole-placement feedback: cart and swing both settle";
    fig_c.plant = PlantKind::Crane;
    fig_c.controller = ControllerKind::Linear;
    fig_c.metrics = {"final_error", "swing_amplitude_tail"};
    v.push_back(fig_c);

    Scenario fig_d;
    fig_d.name = "fig_d";
    fig_d.description =
        "crane under the aggregated law with its published gains: the surface "
        "reaches zero but the state diverges";
    fig_d.plant = PlantKind::Crane;
    fig_d.controller = ControllerKind::Ahssmc;
    fig_d.integrator.rtol = 1e-7;
    fig_d.integrator.atol = 1e-9;
    fig_d.integrator.h_init = 1e-4;
    fig_d.integrator.h_max = 1e-3;
    fig_d.integrator.diverge_norm = 1e3;
    fig_d.metrics = {"divergence_time"};
    v.push_back(fig_d);

    Scenario fig_e;
    fig_e.name = "fig_e";
    fig_e.description =
        "crane under the aggregated law with surface parameters solved for "
        "characteristic coefficients (12, 47, 60): every state settles";
    fig_e.plant = PlantKind::Crane;
    fig_e.controller = ControllerKind::Ahssmc;
    {
      const auto lc = crane_linearization_constants(fig_e.crane);
      const auto design = solve_surface_params(lc, 12.0, 47.0, 60.0);
      fig_e.ahssmc.c1 = design.c1;
      fig_e.ahssmc.c2 = design.c2;
      fig_e.ahssmc.alpha1 = design.alpha1;
      fig_e.ahssmc.alpha2 = 1.0;
    }
    fig_e.metrics = {"final_error"};
    v.push_back(fig_e);

    Scenario pendulum;
    pendulum.name = "pendulum";
    pendulum.description =
        "undamped swing dynamics left after the cart error decays; checks "
        "energy conservation at tight tolerance";
    pendulum.plant = PlantKind::ReducedPendulum;
    pendulum.y0 = {0.0, 0.0, 0.5, 0.0};
    pendulum.integrator.rtol = 1e-9;
    pendulum.integrator.atol = 1e-12;
    pendulum.metrics = {"energy_drift"};
    v.push_back(pendulum);

    return v;
  }();
  return scenarios;
}

Scenario builtin_scenario(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return s;
  std::ostringstream msg;
  msg << "unknown scenario '" << name << "'; builtins:";
  for (const auto& s : builtin_scenarios()) msg << ' ' << s.name;
  throw ConfigError(msg.str());
}

FigEResult run_fig_e() {
  FigEResult out;
  const Scenario sc = builtin_scenario("fig_e");
  const auto lc = crane_linearization_constants(sc.crane);
  out.design = solve_surface_params(lc, 12.0, 47.0, 60.0);
  out.sliding_eigenvalues = eigenvalues(
      sliding_linearization(lc, out.design.c1, out.design.c2, out.design.alpha1));
  out.run = run_scenario(sc);
  return out;
}

CounterexampleReport run_counterexample(double k, const std::array<double, 4>& y0,
                                        const std::string& profile,
                                        const IntegratorConfig& cfg) {
  if (k == 0.0)
    throw ZeroCouplingError("coupled pair requires a nonzero coupling constant");

  Scenario sc;
  sc.name = "counterexample";
  sc.description = "conserved-offset demonstration on the coupled pair";
  sc.plant = PlantKind::CoupledPair;
  sc.coupling_k = k;
  sc.y0 = y0;
  sc.integrator = cfg;
  if (profile == "ihssmc") {
    sc.controller = ControllerKind::Ihssmc;
    sc.ihssmc.target = 0.0;  // the law tries to bring x1 itself to zero
  } else if (profile == "zero") {
    sc.profile = UProfile::Zero;
  } else if (profile == "sin") {
    sc.profile = UProfile::SinT;
  } else if (profile == "cos") {
    sc.profile = UProfile::CosT;
  } else {
    throw ConfigError("unknown control profile '" + profile +
                      "' (expected zero, sin, cos, or ihssmc)");
  }

  CounterexampleReport rep;
  rep.run = run_scenario(sc);
  const double offset0 = y0[0] - k * y0[2];
  rep.min_peak_component = std::max(std::abs(y0[0]), std::abs(y0[2]));
  for (const auto& st : rep.run.trajectory.states) {
    rep.max_offset_drift =
        std::max(rep.max_offset_drift, std::abs((st[0] - k * st[2]) - offset0));
    rep.min_peak_component =
        std::min(rep.min_peak_component, std::max(std::abs(st[0]), std::abs(st[2])));
  }
  return rep;
}

Scenario parse_scenario_config(std::istream& in) {
  Scenario sc;
  sc.name = "custom";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << lineno << ": expected key = value, got '" << line << "'";
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream msg;
      msg << "line " << lineno << ": empty key or value";
      throw ConfigError(msg.str());
    }

    if (key == "name") {
      sc.name = value;
    } else if (key == "description") {
      sc.description = value;
    } else if (key == "plant") {
      if (value == "crane") sc.plant = PlantKind::Crane;
      else if (value == "degenerate_pendubot") sc.plant = PlantKind::DegeneratePendubot;
      else if (value == "coupled_pair") sc.plant = PlantKind::CoupledPair;
      else if (value == "reduced_pendulum") sc.plant = PlantKind::ReducedPendulum;
      else throw ConfigError("unknown plant '" + value + "'");
    } else if (key == "controller") {
      if (value == "none") sc.controller = ControllerKind::None;
      else if (value == "ihssmc") sc.controller = ControllerKind::Ihssmc;
      else if (value == "ahssmc") sc.controller = ControllerKind::Ahssmc;
      else if (value == "linear") sc.controller = ControllerKind::Linear;
      else throw ConfigError("unknown controller '" + value + "'");
    } else if (key == "u_profile") {
      if (value == "zero") sc.profile = UProfile::Zero;
      else if (value == "sin") sc.profile = UProfile::SinT;
      else if (value == "cos") sc.profile = UProfile::CosT;
      else throw ConfigError("unknown u_profile '" + value + "' (zero, sin, cos)");
    } else if (key == "y0" || key == "gain") {
      const auto parts = split_list(value);
      if (parts.size() != 4)
        throw ConfigError("key '" + key + "' needs exactly 4 numbers");
      std::array<double, 4> vals{};
      for (std::size_t i = 0; i < 4; ++i) vals[i] = parse_double(key, parts[i]);
      if (key == "y0") sc.y0 = vals;
      else sc.gain.k.assign(vals.begin(), vals.end());
    } else if (key == "metrics") {
      sc.metrics = split_list(value);
    } else if (key == "cart_mass") {
      sc.crane.cart_mass = parse_double(key, value);
    } else if (key == "payload_mass") {
      sc.crane.payload_mass = parse_double(key, value);
    } else if (key == "rope_length") {
      sc.crane.rope_length = parse_double(key, value);
    } else if (key == "gravity") {
      sc.crane.gravity = parse_double(key, value);
    } else if (key == "target") {
      const double t = parse_double(key, value);
      sc.crane.target = t;
      sc.ihssmc.target = t;
      sc.ahssmc.target = t;
    } else if (key == "coupling_k") {
      sc.coupling_k = parse_double(key, value);
    } else if (key == "c1") {
      const double x = parse_double(key, value);
      sc.ihssmc.C1 = x;
      sc.ahssmc.c1 = x;
    } else if (key == "c2") {
      const double x = parse_double(key, value);
      sc.ihssmc.C2 = x;
      sc.ahssmc.c2 = x;
    } else if (key == "c3") {
      sc.ihssmc.C3 = parse_double(key, value);
    } else if (key == "alpha1") {
      sc.ahssmc.alpha1 = parse_double(key, value);
    } else if (key == "alpha2") {
      sc.ahssmc.alpha2 = parse_double(key, value);
    } else if (key == "eta") {
      const double x = parse_double(key, value);
      sc.ihssmc.eta = x;
      sc.ahssmc.eta = x;
    } else if (key == "k") {
      const double x = parse_double(key, value);
      sc.ihssmc.k = x;
      sc.ahssmc.k = x;
    } else if (key == "boundary_layer") {
      const double x = parse_double(key, value);
      sc.ihssmc.boundary_layer = x;
      sc.ahssmc.boundary_layer = x;
    } else if (key == "rtol") {
      sc.integrator.rtol = parse_double(key, value);
    } else if (key == "atol") {
      sc.integrator.atol = parse_double(key, value);
    } else if (key == "h_init") {
      sc.integrator.h_init = parse_double(key, value);
    } else if (key == "h_min") {
      sc.integrator.h_min = parse_double(key, value);
    } else if (key == "h_max") {
      sc.integrator.h_max = parse_double(key, value);
    } else if (key == "t_end") {
      sc.integrator.t_end = parse_double(key, value);
    } else if (key == "diverge_norm") {
      sc.integrator.diverge_norm = parse_double(key, value);
    } else {
      std::ostringstream msg;
      msg << "line " << lineno << ": unknown key '" << key << "'";
      throw ConfigError(msg.str());
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  return parse_scenario_config(in);
}

}  // namespace cranelab
