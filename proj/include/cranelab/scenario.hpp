#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cranelab/controllers.hpp"
#include "cranelab/linalg.hpp"
#include "cranelab/ode.hpp"
#include "cranelab/plants.hpp"

namespace cranelab {

enum class PlantKind { Crane, DegeneratePendubot, CoupledPair, ReducedPendulum };
enum class ControllerKind { None, Ihssmc, Ahssmc, Linear };
// Open-loop drive for controller-less runs.
enum class UProfile { Zero, SinT, CosT };

const char* to_string(PlantKind k);
const char* to_string(ControllerKind k);
const char* to_string(UProfile p);

// Poles used when a linear-feedback scenario does not carry an explicit gain.
inline constexpr std::array<double, 4> kDefaultPoles = {-3.0, -2.8, -2.6, -2.4};

struct Scenario {
  std::string name;
  std::string description;
  PlantKind plant = PlantKind::Crane;
  CraneParams crane{};        // also supplies g/L for the reduced pendulum
  double coupling_k = -1.0;   // CoupledPair only
  ControllerKind controller = ControllerKind::None;
  UProfile profile = UProfile::Zero;
  IhssmcParams ihssmc{};
  AhssmcParams ahssmc{};
  LinearGain gain{};          // empty: place kDefaultPoles on this crane
  std::array<double, 4> y0{0.0, 0.0, 0.0, 0.0};
  IntegratorConfig integrator{};
  std::vector<std::string> metrics;  // names from kMetricNames
};

inline constexpr std::array<const char*, 6> kMetricNames = {
    "final_error",       "s1_settle_time", "swing_amplitude_tail",
    "swing_nondecay_ratio", "divergence_time", "energy_drift"};

// Each field is present iff its name was requested and it is computable for
// the run (e.g. s1 never settles -> s1_settle_time stays empty).
struct MetricsReport {
  std::optional<double> final_error;           // max-norm of error state at the last sample
  std::optional<double> s1_settle_time;        // first t after which |s1| stays <= 1e-2
  std::optional<double> swing_amplitude_tail;  // max |x3| over the last 20% of the horizon
  std::optional<double> swing_nondecay_ratio;  // tail swing vs early swing, [0.8,1]T over [0.2,0.4]T
  std::optional<double> divergence_time;       // guard-trigger time, if the run diverged
  std::optional<double> energy_drift;          // max |V - V(0)| (reduced pendulum only)
};

inline constexpr double kSettleBand = 1e-2;

struct RunResult {
  Scenario scenario;
  Trajectory trajectory;
  MetricsReport metrics;
};

// Assembles the closed-loop (or driven) vector field, integrates it, fills
// per-sample control and surface columns, and computes requested metrics.
// Invalid plant/controller combinations raise ConfigError.
RunResult run_scenario(const Scenario& s);

const std::vector<Scenario>& builtin_scenarios();
Scenario builtin_scenario(const std::string& name);  // ConfigError on unknown name

// Corrected-surface run: solves the surface parameters for the desired
// characteristic coefficients (12, 47, 60), prechecks the sliding-dynamics
// eigenvalues, then runs the aggregated law with the solved parameters.
struct FigEResult {
  SurfaceDesign design;
  std::vector<std::complex<double>> sliding_eigenvalues;
  RunResult run;
};

FigEResult run_fig_e();

// Conserved-offset demonstration on the coupled pair with unit swing gain
// (f2 = 0, b2 = -1). Profiles: "zero", "sin", "cos", or "ihssmc" (the
// incremental law pointed at the origin). Reports how far x1 - k*x3 drifts
// from its initial value and the smallest over time of max(|x1|, |x3|).
struct CounterexampleReport {
  double max_offset_drift = 0.0;
  double min_peak_component = 0.0;
  RunResult run;
};

CounterexampleReport run_counterexample(double k, const std::array<double, 4>& y0,
                                        const std::string& profile,
                                        const IntegratorConfig& cfg);

// Flat key=value scenario files; '#' starts a comment. Unknown keys are
// rejected. See the README for the full key list.
Scenario parse_scenario_config(std::istream& in);
Scenario load_scenario_file(const std::string& path);

}  // namespace cranelab
