#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cranelab/controllers.hpp"

namespace cranelab {

struct IntegratorConfig {
  double rtol = 1e-3;
  double atol = 1e-4;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 1.0;
  double t_end = 10.0;
  double diverge_norm = 1e6;  // max-norm guard on the state

  void validate() const;  // throws ConfigError
};

enum class RunStatus { Completed, Diverged, SingularGain, StepUnderflow };

const char* to_string(RunStatus s);

// One recorded run: a sample per accepted step. controls/surfaces are
// optional columns filled by the scenario layer; when present they have the
// same length as times. Non-finite states are never stored.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<double> controls;
  std::vector<SurfaceValues> surfaces;
  RunStatus status = RunStatus::Completed;
  double status_time = 0.0;  // abort time for non-Completed runs
  std::string detail;        // e.g. offending denominator for SingularGain

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

// dydt must be filled for the given (t, y); may throw SingularGainError,
// which ends the run with status SingularGain.
using RhsFn = std::function<void(double t, std::span<const double> y,
                                 std::span<double> dydt)>;

// Adaptive Dormand-Prince 5(4) from t = 0 to cfg.t_end. Error control is
// per step against atol + rtol*|y|; a step is Diverged when the max-norm of
// the accepted state exceeds diverge_norm, and StepUnderflow when the error
// test cannot be met at h_min. t_end <= 0 yields an empty trajectory.
Trajectory integrate(const RhsFn& rhs, std::span<const double> y0,
                     const IntegratorConfig& cfg);

// Fixed-step driver over [t0, t1] (last step clipped); returns the final
// state. No error control or guards; used for convergence studies and for
// comparing runs on a common grid.
std::vector<double> integrate_fixed(const RhsFn& rhs, std::span<const double> y0,
                                    double t0, double t1, double h);

// Observed convergence order from a step-halving study on a smooth
// oscillator with a known solution. Healthy output is near 5.
double step_order_check();

}  // namespace cranelab
