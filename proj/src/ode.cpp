#include "cranelab/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cranelab {
namespace {

// Dormand-Prince 5(4) tableau. Exact rational values; decimal equivalents
// to 16 significant digits:
//   a21 = 0.2
//   a31 = 0.075                 a32 = 0.225
//   a41 = 0.9777777777777777    a42 = -3.733333333333333    a43 = 3.555555555555556
//   a51 = 2.952598689224204     a52 = -11.59579332418839    a53 = 9.822892851699436
//   a54 = -0.2908093278463649
//   a61 = 2.846275252525253     a62 = -10.75757575757576    a63 = 8.906422717743473
//   a64 = 0.2784090909090909    a65 = -0.2735313036020583
//   b1  = 0.09114583333333333   b3  = 0.4492362982929021    b4  = 0.6510416666666666
//   b5  = -0.3223761792452830   b6  = 0.1309523809523810
//   e1  = 0.001232638888888889  e3  = -0.004252770290506136 e4  = 0.03697916666666667
//   e5  = -0.05086379716981132  e6  = 0.04190476190476190   e7  = -0.025
// e = b - bhat is the difference against the embedded 4th-order weights;
// the 7th stage sits at the step end (first-same-as-last).
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kShrinkFloor = 0.2;
constexpr double kGrowCeil = 5.0;

struct StepWorkspace {
  std::array<std::vector<double>, 7> k;
  std::vector<double> y_stage;

  explicit StepWorkspace(std::size_t n) : y_stage(n) {
    for (auto& ki : k) ki.assign(n, 0.0);
  }
};

// One embedded step from (t, y) with k[0] = rhs(t, y) already filled.
// Fills y_new, the per-component error estimate err, and k[6] = rhs at the
// step end (reusable as the next step's k[0]).
void dp5_step(const RhsFn& rhs, double t, const std::vector<double>& y, double h,
              StepWorkspace& w, std::vector<double>& y_new,
              std::vector<double>& err) {
  const std::size_t n = y.size();
  auto& k = w.k;
  auto& ys = w.y_stage;

  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * a21 * k[0][i];
  rhs(t + c2 * h, ys, k[1]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
  rhs(t + c3 * h, ys, k[2]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
  rhs(t + c4 * h, ys, k[3]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] +
                        a54 * k[3][i]);
  rhs(t + c5 * h, ys, k[4]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] +
                        a64 * k[3][i] + a65 * k[4][i]);
  rhs(t + h, ys, k[5]);
  for (std::size_t i = 0; i < n; ++i)
    y_new[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] +
                           b5 * k[4][i] + b6 * k[5][i]);
  rhs(t + h, y_new, k[6]);
  for (std::size_t i = 0; i < n; ++i)
    err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                  e6 * k[5][i] + e7 * k[6][i]);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
    throw ConfigError("step bounds must satisfy 0 < h_min <= h_init <= h_max");
  if (!(diverge_norm > 0.0)) throw ConfigError("diverge_norm must be positive");
  if (!std::isfinite(t_end)) throw ConfigError("t_end must be finite");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::SingularGain: return "singular_gain";
    case RunStatus::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

Trajectory integrate(const RhsFn& rhs, std::span<const double> y0,
                     const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  if (cfg.t_end <= 0.0) return traj;

  const std::size_t n = y0.size();
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> y_new(n), err(n);
  StepWorkspace w(n);

  double t = 0.0;
  traj.times.push_back(t);
  traj.states.push_back(y);

  try {
    rhs(t, y, w.k[0]);
  } catch (const SingularGainError& e) {
    traj.status = RunStatus::SingularGain;
    traj.status_time = t;
    traj.detail = e.denominator();
    return traj;
  }

  double h = std::clamp(cfg.h_init, cfg.h_min, cfg.h_max);
  bool just_rejected = false;

  while (cfg.t_end - t > cfg.h_min) {
    h = std::min(h, cfg.t_end - t);

    try {
      dp5_step(rhs, t, y, h, w, y_new, err);
    } catch (const SingularGainError& e) {
      traj.status = RunStatus::SingularGain;
      traj.status_time = t;
      traj.detail = e.denominator();
      return traj;
    }

    double err_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = err[i] / sc;
      err_norm += r * r;
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(n));

    if (!(err_norm <= 1.0)) {  // also catches NaN
      if (h <= cfg.h_min * (1.0 + 1e-12)) {
        traj.status = RunStatus::StepUnderflow;
        traj.status_time = t;
        return traj;
      }
      const double fac = std::isfinite(err_norm)
                             ? std::max(kShrinkFloor, kSafety * std::pow(err_norm, -0.2))
                             : kShrinkFloor;
      h = std::max(cfg.h_min, h * fac);
      just_rejected = true;
      continue;
    }

    t += h;
    y.swap(y_new);
    w.k[0].swap(w.k[6]);
    traj.times.push_back(t);
    traj.states.push_back(y);

    if (max_abs(y) > cfg.diverge_norm) {
      traj.status = RunStatus::Diverged;
      traj.status_time = t;
      return traj;
    }

    double fac = (err_norm == 0.0) ? kGrowCeil : kSafety * std::pow(err_norm, -0.2);
    fac = std::clamp(fac, kShrinkFloor, just_rejected ? 1.0 : kGrowCeil);
    h = std::clamp(h * fac, cfg.h_min, cfg.h_max);
    just_rejected = false;
  }
  return traj;  // status defaults to Completed
}

std::vector<double> integrate_fixed(const RhsFn& rhs, std::span<const double> y0,
                                    double t0, double t1, double h) {
  if (!(h > 0.0) || !(t1 > t0)) throw ConfigError("fixed-step run needs h > 0, t1 > t0");
  const std::size_t n = y0.size();
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> y_new(n), err(n);
  StepWorkspace w(n);

  double t = t0;
  rhs(t, y, w.k[0]);
  while (t1 - t > 1e-14 * std::max(1.0, std::abs(t1))) {
    const double step = std::min(h, t1 - t);
    dp5_step(rhs, t, y, step, w, y_new, err);
    t += step;
    y.swap(y_new);
    w.k[0].swap(w.k[6]);
  }
  return y;
}

double step_order_check() {
  // Harmonic oscillator with unit frequency; exact solution (cos t, -sin t).
  const RhsFn rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const std::array<double, 2> y0 = {1.0, 0.0};
  const double t1 = 2.0 * std::acos(-1.0);  // one full period

  auto error_at = [&](double h) {
    const std::vector<double> y = integrate_fixed(rhs, y0, 0.0, t1, h);
    const double ex = 1.0, ev = 0.0;
    return std::hypot(y[0] - ex, y[1] - ev);
  };
  // Step sizes chosen so truncation error (~h^5 per step) stays far above the
  // 1e-13 roundoff floor of a full-period run; smaller steps would measure
  // accumulated rounding, not the method order.
  const double err_coarse = error_at(0.1);
  const double err_fine = error_at(0.05);
  return std::log2(err_coarse / err_fine);
}

}  // namespace cranelab
