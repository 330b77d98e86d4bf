#include "cranelab/plants.hpp"

#include <cmath>

namespace cranelab {

void CraneParams::validate() const {
  if (!(cart_mass > 0.0) || !(payload_mass > 0.0))
    throw ConfigError("crane masses must be positive");
  if (!(rope_length > 0.0)) throw ConfigError("rope length must be positive");
  if (!(gravity > 0.0)) throw ConfigError("gravity must be positive");
  if (!std::isfinite(target)) throw ConfigError("target position must be finite");
}

PlantTerms crane_terms(const StateVec& s, const CraneParams& p) {
  const double M = p.cart_mass, m = p.payload_mass, L = p.rope_length, g = p.gravity;
  const double sin3 = std::sin(s.x3), cos3 = std::cos(s.x3);
  const double den = M + m * sin3 * sin3;  // >= M > 0, never singular
  PlantTerms t;
  t.f1 = (m * L * s.x4 * s.x4 * sin3 + m * g * sin3 * cos3) / den;
  t.b1 = 1.0 / den;
  t.f2 = -((m + M) * g * sin3 + m * L * s.x4 * s.x4 * sin3 * cos3) / (den * L);
  t.b2 = -cos3 / (den * L);
  return t;
}

StateVec crane_derivative(const StateVec& s, double u, const CraneParams& p) {
  const PlantTerms t = crane_terms(s, p);
  return {s.x2, t.f1 + t.b1 * u, s.x4, t.f2 + t.b2 * u};
}

void PendubotParams::validate() const {
  if (m1 < 0.0 || m2 < 0.0 || l1 < 0.0 || lc1 < 0.0 || lc2 < 0.0 || I1 < 0.0 || I2 < 0.0)
    throw ConfigError("arm masses, lengths and inertias must be nonnegative");
  if (!(gravity > 0.0)) throw ConfigError("gravity must be positive");
}

std::array<double, 4> pendubot_derivative(const std::array<double, 2>& theta,
                                          const std::array<double, 2>& theta_dot,
                                          double tau1, const PendubotParams& p) {
  const double q1 = p.q1(), q2 = p.q2(), q3 = p.q3(), q4 = p.q4(), q5 = p.q5();
  const double c2 = std::cos(theta[1]), s2 = std::sin(theta[1]);

  // D(theta) * thddot + C(theta, thdot) * thdot + G(theta) = (tau1, 0)
  const double d11 = q1 + q2 + 2.0 * q3 * c2;
  const double d12 = q2 + q3 * c2;
  const double d22 = q2;
  const double det = d11 * d22 - d12 * d12;  // = q1*q2 - q3^2 cos^2(th2)
  if (std::abs(det) < 1e-12 * std::max(1.0, q1 * q2)) throw SingularInertiaError();

  const double h = -q3 * s2;  // Coriolis/centrifugal coefficient
  const double c_vec1 = h * theta_dot[1] * theta_dot[1] +
                        2.0 * h * theta_dot[0] * theta_dot[1];
  const double c_vec2 = -h * theta_dot[0] * theta_dot[0];
  const double g1 = q4 * p.gravity * std::cos(theta[0]) +
                    q5 * p.gravity * std::cos(theta[0] + theta[1]);
  const double g2 = q5 * p.gravity * std::cos(theta[0] + theta[1]);

  const double r1 = tau1 - c_vec1 - g1;
  const double r2 = -c_vec2 - g2;
  const double a1 = (d22 * r1 - d12 * r2) / det;
  const double a2 = (-d12 * r1 + d11 * r2) / det;
  return {theta_dot[0], theta_dot[1], a1, a2};
}

StateVec degenerate_pendubot_derivative(const StateVec& s, double u) {
  // lc2 = 0 collapses the arm to x2dot = u, x4dot = -u (u is the
  // gravity-compensated, inertia-normalized joint torque).
  return {s.x2, u, s.x4, -u};
}

StateVec coupled_pair_derivative(const StateVec& s, double u, double k,
                                 const PlantTerms& base) {
  if (k == 0.0) throw ZeroCouplingError();
  const double accel2 = base.f2 + base.b2 * u;
  return {s.x2, k * accel2, s.x4, accel2};
}

std::pair<double, double> reduced_s1_dynamics(double x1, double x3, double x4,
                                              double c1, const CraneParams& p) {
  const double L = p.rope_length, g = p.gravity;
  return {x4, -(g / L) * std::sin(x3) - (c1 * c1 / L) * x1 * std::cos(x3)};
}

std::pair<double, double> asymptotic_pendulum_derivative(double x3, double x4,
                                                         const CraneParams& p) {
  return {x4, -(p.gravity / p.rope_length) * std::sin(x3)};
}

double pendulum_energy(double x3, double x4, const CraneParams& p) {
  return 0.5 * x4 * x4 + (p.gravity / p.rope_length) * (1.0 - std::cos(x3));
}

std::array<double, 3> reduced_S_dynamics(double x1, double x2, double x3,
                                         const CraneParams& p, double c1,
                                         double c2, double alpha1) {
  // On the surface the swing rate is slaved to the other coordinates.
  const double x4 = -c2 * x3 - alpha1 * (x2 + c1 * x1);
  const PlantTerms t = crane_terms({x1, x2, x3, x4}, p);
  const double den = t.b2 + alpha1 * t.b1;
  if (std::abs(den) < kSingularGainTol)
    throw SingularGainError("b2 + alpha1*b1");
  const double ueq = -(alpha1 * t.f1 + t.f2 - c1 * c2 * alpha1 * x1 +
                       alpha1 * (c1 - c2) * x2 - c2 * c2 * x3) /
                     den;
  return {x2, t.f1 + t.b1 * ueq, x4};
}

}  // namespace cranelab
