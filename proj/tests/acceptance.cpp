// Acceptance gate: ten end-to-end checks, one printed line each, nonzero
// exit when any of them fails. Tolerances are pinned here on purpose.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cranelab/controllers.hpp"
#include "cranelab/linalg.hpp"
#include "cranelab/ode.hpp"
#include "cranelab/plants.hpp"
#include "cranelab/scenario.hpp"
#include "test_util.hpp"

using namespace cranelab;

namespace {

int g_failures = 0;

void report(int number, bool pass, const std::string& description,
            const std::string& detail = "") {
  std::printf("criterion %d: %s — %s", number, pass ? "PASS" : "FAIL",
              description.c_str());
  if (!pass && !detail.empty()) std::printf(" [%s]", detail.c_str());
  std::printf("\n");
  if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int number, const std::string& description, Fn&& fn) {
  bool pass = false;
  std::string detail;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(number, pass, description, detail);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

int main() {
  const CraneParams crane{};
  const auto lc = crane_linearization_constants(crane);

  // 1. The sliding dynamics of the published aggregated design has the
  //    published eigenvalues, two of them unstable.
  criterion(1, "published aggregated design has eigenvalues {-0.6527, 5.1438, 11.3918}",
            [&](std::string& detail) {
              const auto ev = eigenvalues(sliding_linearization(lc, 0.8, 35.0, 10.0));
              if (ev.size() != 3) return false;
              const double want[3] = {-0.6527, 5.1438, 11.3918};
              for (int i = 0; i < 3; ++i) {
                if (std::abs(ev[static_cast<std::size_t>(i)].real() - want[i]) > 1e-3 ||
                    std::abs(ev[static_cast<std::size_t>(i)].imag()) > 1e-6) {
                  detail = "eigenvalue " + std::to_string(i) + " = " +
                           fmt(ev[static_cast<std::size_t>(i)].real());
                  return false;
                }
              }
              return true;
            });

  // 2. The inverse design for characteristic coefficients (12, 47, 60)
  //    reproduces the corrected parameter set and round-trips.
  criterion(2, "surface solver yields (c1, c2, alpha1) = (1.2766, -21.8964, 10.3638)",
            [&](std::string& detail) {
              const auto d = solve_surface_params(lc, 12.0, 47.0, 60.0);
              const bool values = std::abs(d.c1 - 1.2766) <= 1e-3 &&
                                  std::abs(d.c2 - (-21.8964)) <= 1e-3 &&
                                  std::abs(d.alpha1 - 10.3638) <= 1e-3;
              const bool roundtrip = d.roundtrip_residual <= 1e-9;
              if (!values || !roundtrip)
                detail = "c1=" + fmt(d.c1) + " c2=" + fmt(d.c2) +
                         " alpha1=" + fmt(d.alpha1) +
                         " residual=" + fmt(d.roundtrip_residual);
              return values && roundtrip;
            });

  // 3. Pole placement at (-3, -2.8, -2.6, -2.4): the published gain table
  //    (computed for the 0.244 m rope) is reproduced on that plant, and the
  //    closed loop lands on the requested poles on both plants.
  criterion(3, "pole placement reproduces the published gain set and closes both loops",
            [&](std::string& detail) {
              std::vector<std::complex<double>> poles{
                  {-3.0, 0.0}, {-2.8, 0.0}, {-2.6, 0.0}, {-2.4, 0.0}};
              CraneParams shorter = crane;
              shorter.rope_length = 0.244;
              const auto plant_s = crane_linearization(shorter);
              const auto gain_s = ackermann_gain(plant_s, poles);
              const double printed[4] = {1.3051, 1.9468, 7.3103, -2.1602};
              for (int i = 0; i < 4; ++i) {
                if (std::abs(gain_s.k[static_cast<std::size_t>(i)] - printed[i]) > 1e-3) {
                  detail = "k" + std::to_string(i + 1) + " = " +
                           fmt(gain_s.k[static_cast<std::size_t>(i)]);
                  return false;
                }
              }
              const auto check_closure = [&](const LinearPlant& plant,
                                             const LinearGain& gain) {
                const auto ev = eigenvalues(subtract_outer(plant.A, plant.B, gain.k));
                for (std::size_t i = 0; i < 4; ++i) {
                  if (std::abs(ev[i].real() - poles[i].real()) > 1e-3 ||
                      std::abs(ev[i].imag()) > 1e-3)
                    return false;
                }
                return true;
              };
              if (!check_closure(plant_s, gain_s)) {
                detail = "short-rope closed loop misses the poles";
                return false;
              }
              const auto plant_d = crane_linearization(crane);
              const auto gain_d = ackermann_gain(plant_d, poles);
              if (!check_closure(plant_d, gain_d)) {
                detail = "default-plant closed loop misses the poles";
                return false;
              }
              return true;
            });

  // 4. Incremental law on the crane: cart error and velocity inside 0.05 at
  //    t = 10, |s1| inside 1e-2 for all t >= 6, tail swing at least half the
  //    early swing, all inside a 10 s wall-clock budget.
  criterion(4, "incremental-law run converges in cart, rings in swing, on budget",
            [&](std::string& detail) {
              const auto t0 = std::chrono::steady_clock::now();
              const auto res = run_scenario(builtin_scenario("fig_b"));
              const double elapsed = seconds_since(t0);
              if (res.trajectory.status != RunStatus::Completed) {
                detail = std::string("status ") + to_string(res.trajectory.status);
                return false;
              }
              const auto& last = res.trajectory.states.back();
              const double cart_err = std::abs(last[0] - 2.0);
              const double cart_vel = std::abs(last[1]);
              double worst_s1 = 0.0;
              for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
                if (res.trajectory.times[i] >= 6.0)
                  worst_s1 = std::max(worst_s1,
                                      std::abs(res.trajectory.surfaces[i].s1));
              }
              const double ratio = res.metrics.swing_nondecay_ratio.value_or(0.0);
              const bool pass = cart_err <= 0.05 && cart_vel <= 0.05 &&
                                worst_s1 <= 1e-2 && ratio >= 0.5 && elapsed <= 10.0;
              if (!pass)
                detail = "cart_err=" + fmt(cart_err) + " cart_vel=" + fmt(cart_vel) +
                         " max|s1|(t>=6)=" + fmt(worst_s1) + " ratio=" + fmt(ratio) +
                         " elapsed=" + fmt(elapsed) + "s";
              return pass;
            });

  // 5. Linear feedback run: every error component inside 0.02 at t = 10,
  //    inside a 5 s budget.
  criterion(5, "pole-placement run settles every state inside 0.02",
            [&](std::string& detail) {
              const auto t0 = std::chrono::steady_clock::now();
              const auto res = run_scenario(builtin_scenario("fig_c"));
              const double elapsed = seconds_since(t0);
              if (res.trajectory.status != RunStatus::Completed) {
                detail = std::string("status ") + to_string(res.trajectory.status);
                return false;
              }
              const auto& last = res.trajectory.states.back();
              const double errs[4] = {std::abs(last[0] - 2.0), std::abs(last[1]),
                                      std::abs(last[2]), std::abs(last[3])};
              bool pass = elapsed <= 5.0;
              double worst = 0.0;
              for (double e : errs) {
                worst = std::max(worst, e);
                if (e > 0.02) pass = false;
              }
              if (!pass)
                detail = "max error component=" + fmt(worst) + " elapsed=" +
                         fmt(elapsed) + "s";
              return pass;
            });

  // 6. Published aggregated gains: the run must end with the divergence
  //    guard (norm 1e3) before t = 10 while the aggregated surface stays
  //    inside 1e-2 from its first zero crossing to the abort.
  criterion(6, "published aggregated gains diverge while the surface stays on zero",
            [&](std::string& detail) {
              const auto res = run_scenario(builtin_scenario("fig_d"));
              if (res.trajectory.status != RunStatus::Diverged ||
                  res.trajectory.status_time >= 10.0) {
                detail = std::string("status ") + to_string(res.trajectory.status) +
                         " at t=" + fmt(res.trajectory.status_time);
                return false;
              }
              std::size_t crossing = res.trajectory.size();
              for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
                if (res.trajectory.surfaces[i].s_top >= 0.0) {  // S starts below zero
                  crossing = i;
                  break;
                }
              }
              if (crossing == res.trajectory.size()) {
                detail = "surface never crossed zero";
                return false;
              }
              double worst = 0.0;
              for (std::size_t i = crossing; i < res.trajectory.size(); ++i)
                worst = std::max(worst, std::abs(res.trajectory.surfaces[i].s_top));
              if (worst > 1e-2) {
                detail = "max|S| after crossing = " + fmt(worst);
                return false;
              }
              return true;
            });

  // 7. Corrected aggregated design: the same plant now settles; final error
  //    max-norm inside 0.05.
  criterion(7, "corrected aggregated design settles the crane",
            [&](std::string& detail) {
              const auto fig_e = run_fig_e();
              if (fig_e.run.trajectory.status != RunStatus::Completed) {
                detail = std::string("status ") +
                         to_string(fig_e.run.trajectory.status);
                return false;
              }
              const double err = fig_e.run.metrics.final_error.value_or(1e300);
              if (err > 0.05) {
                detail = "final error = " + fmt(err);
                return false;
              }
              return true;
            });

  // 8. Conserved-offset counterexample (k = -1, sine drive from (1,0,0,0)):
  //    x1 - k*x3 moves less than 1e-6 over 10 s, and max(|x1|, |x3|) never
  //    drops below 0.5.
  criterion(8, "coupled-pair offset is conserved and blocks convergence",
            [&](std::string& detail) {
              const IntegratorConfig cfg{};
              const auto rep = run_counterexample(-1.0, {1, 0, 0, 0}, "sin", cfg);
              const bool pass = rep.run.trajectory.status == RunStatus::Completed &&
                                rep.max_offset_drift <= 1e-6 &&
                                rep.min_peak_component >= 0.5;
              if (!pass)
                detail = "drift=" + fmt(rep.max_offset_drift) +
                         " min_peak=" + fmt(rep.min_peak_component);
              return pass;
            });

  // 9. Structural identity of the incremental surface stack on 10000 random
  //    states: s3 equals sign(s1)*(|s1| + C2|x3| + C3|x4|) bit for bit, so
  //    s3 = 0 exactly when s1 = 0.
  criterion(9, "outer incremental surface collapses onto s1 (bitwise, 10000 states)",
            [&](std::string& detail) {
              const IhssmcParams p{};
              std::mt19937 rng(777);
              std::uniform_real_distribution<double> dist(-3.0, 3.0);
              for (int i = 0; i < 10000; ++i) {
                const StateVec st{dist(rng), dist(rng), dist(rng), dist(rng)};
                const auto s = ihssmc_surfaces(st, p);
                const double collapsed =
                    signum(s.s1) *
                    (std::abs(s.s1) + p.C2 * std::abs(st.x3) + p.C3 * std::abs(st.x4));
                if (s.s_top != collapsed || ((s.s_top == 0.0) != (s.s1 == 0.0))) {
                  detail = "mismatch at draw " + std::to_string(i) + ": s3=" +
                           fmt(s.s_top) + " collapsed=" + fmt(collapsed);
                  return false;
                }
              }
              return true;
            });

  // 10. Cross-cutting health checks: energy conservation, linearization
  //     against finite differences, the coefficient identity l3 = c1*l2,
  //     tableau-vs-roots agreement, and the integrator's convergence order.
  criterion(10, "energy, linearization, coefficient identity, tableau, and order checks",
            [&](std::string& detail) {
              const auto pend = run_scenario(builtin_scenario("pendulum"));
              const double drift = pend.metrics.energy_drift.value_or(1e300);
              if (drift > 1e-6) {
                detail = "energy drift = " + fmt(drift);
                return false;
              }

              auto field = [&](const std::vector<double>& y) {
                const auto rates = reduced_S_dynamics(y[0], y[1], y[2], crane, 0.8, 35.0, 10.0);
                return std::vector<double>(rates.begin(), rates.end());
              };
              const auto jac = testutil::fd_jacobian(field, std::vector<double>(3, 0.0));
              const double gap =
                  testutil::max_entry_gap(jac, sliding_linearization(lc, 0.8, 35.0, 10.0));
              if (gap > 1e-4) {
                detail = "linearization gap = " + fmt(gap);
                return false;
              }

              std::mt19937 rng(6021);
              std::uniform_real_distribution<double> dist(0.2, 5.0);
              for (int i = 0; i < 500; ++i) {
                const double c1 = dist(rng), c2 = dist(rng) * 10.0 - 25.0, a1 = dist(rng);
                if (std::abs(lc.b20 + a1 * lc.b10) < 1e-3) continue;
                const auto cc = sliding_char_coeffs(lc, c1, c2, a1);
                if (std::abs(cc.l3 - c1 * cc.l2) >
                    1e-12 * std::max(1.0, std::abs(cc.l3))) {
                  detail = "l3 != c1*l2 at draw " + std::to_string(i);
                  return false;
                }
              }

              std::mt19937 rng2(90125);
              std::uniform_real_distribution<double> coeff(-5.0, 5.0);
              int checked = 0;
              for (int i = 0; i < 1000; ++i) {
                const int deg = 3 + (i % 2);
                std::vector<double> poly(static_cast<std::size_t>(deg) + 1, 1.0);
                for (int j = 1; j <= deg; ++j) poly[static_cast<std::size_t>(j)] = coeff(rng2);
                const auto verdict = hurwitz_check(poly);
                if (verdict == StabilityVerdict::Degenerate) continue;
                const auto roots = poly_roots(poly);
                double max_re = -1e300;
                bool near_axis = false;
                for (const auto& z : roots) {
                  max_re = std::max(max_re, z.real());
                  if (std::abs(z.real()) <= 1e-3 * std::max(1.0, std::abs(z)))
                    near_axis = true;
                }
                if (near_axis) continue;
                ++checked;
                const auto expected = max_re < 0.0 ? StabilityVerdict::Stable
                                                   : StabilityVerdict::Unstable;
                if (verdict != expected) {
                  detail = "tableau disagrees with roots at draw " + std::to_string(i);
                  return false;
                }
              }
              if (checked < 800) {
                detail = "only " + std::to_string(checked) + " tableau draws checked";
                return false;
              }

              const double order = step_order_check();
              if (order < 4.5 || order > 5.5) {
                detail = "observed order = " + fmt(order);
                return false;
              }
              return true;
            });

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
