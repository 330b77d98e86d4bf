#pragma once

#include <array>
#include <utility>

#include "cranelab/errors.hpp"

namespace cranelab {

// Four-state underactuated chain. For the overhead crane: x1 cart position
// (m), x2 cart velocity, x3 payload swing angle (rad, unwrapped), x4 swing
// rate. For the degenerate two-link arm the same slots hold (th1, th1dot,
// th2, th2dot).
struct StateVec {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
  double x4 = 0.0;

  std::array<double, 4> to_array() const { return {x1, x2, x3, x4}; }
  static StateVec from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }
};

struct CraneParams {
  double cart_mass = 1.0;      // M (kg)
  double payload_mass = 0.8;   // m (kg)
  double rope_length = 0.305;  // L (m)
  double gravity = 9.8;        // g (m/s^2)
  double target = 2.0;         // desired cart position x_d (m)

  void validate() const;  // throws ConfigError on nonphysical values
};

// Drift/gain decomposition of one actuated + one unactuated second-order
// chain: x2dot = f1 + b1*u, x4dot = f2 + b2*u.
struct PlantTerms {
  double f1 = 0.0;
  double b1 = 0.0;
  double f2 = 0.0;
  double b2 = 0.0;
};

// Closed-form crane terms. b1 is always positive (bounded by 1/M); b2
// vanishes when the rope swings through +-pi/2.
PlantTerms crane_terms(const StateVec& s, const CraneParams& p);

// Full nonlinear crane vector field under input force u.
StateVec crane_derivative(const StateVec& s, double u, const CraneParams& p);

// Two-link planar arm, torque on the first joint only.
struct PendubotParams {
  double m1 = 1.0;   // link masses (kg)
  double m2 = 1.0;
  double l1 = 1.0;   // link-1 length (m)
  double lc1 = 0.5;  // center-of-mass distances (m)
  double lc2 = 0.5;
  double I1 = 0.1;   // link inertias about their centers (kg m^2)
  double I2 = 0.1;
  double gravity = 9.8;

  // Lumped inertia/gravity coefficients of the standard two-link model.
  double q1() const { return m1 * lc1 * lc1 + m2 * l1 * l1 + I1; }
  double q2() const { return m2 * lc2 * lc2 + I2; }
  double q3() const { return m2 * l1 * lc2; }
  double q4() const { return m1 * lc1 + m2 * l1; }
  double q5() const { return m2 * lc2; }

  void validate() const;
};

// Returns (th1dot, th2dot, th1ddot, th2ddot). Throws SingularInertiaError
// when the mass matrix determinant q1*q2 - q3^2*cos^2(th2) is below
// tolerance, which only happens for invalid parameters.
std::array<double, 4> pendubot_derivative(const std::array<double, 2>& theta,
                                          const std::array<double, 2>& theta_dot,
                                          double tau1, const PendubotParams& p);

// lc2 = 0 limit of the arm after input normalization: both joint
// accelerations collapse onto one input channel with opposite signs.
StateVec degenerate_pendubot_derivative(const StateVec& s, double u);

// Two chains sharing one input with proportional terms f1 = k*f2,
// b1 = k*b2. `base` supplies (f2, b2) at the current state. The quantities
// x1 - k*x3 and x2 - k*x4 are conserved offsets no input can change.
StateVec coupled_pair_derivative(const StateVec& s, double u, double k,
                                 const PlantTerms& base);

// Swing dynamics of the crane restricted to the actuated surface
// x2 + c1*x1 = 0 (x1 here is the cart error, decaying as exp(-c1 t)):
// x3dot = x4, x4dot = -(g/L) sin x3 - (c1^2/L) x1 cos x3.
std::pair<double, double> reduced_s1_dynamics(double x1, double x3, double x4,
                                              double c1, const CraneParams& p);

// x1 -> 0 limit of the above: an undamped pendulum.
std::pair<double, double> asymptotic_pendulum_derivative(double x3, double x4,
                                                         const CraneParams& p);

// First integral of the asymptotic pendulum: V = x4^2/2 + (g/L)(1 - cos x3).
double pendulum_energy(double x3, double x4, const CraneParams& p);

// Crane dynamics restricted to the aggregated surface
// alpha1*(x2 + c1*x1) + (x4 + c2*x3) = 0, with x4 eliminated and the input
// replaced by the equivalent control that keeps the surface invariant.
// State is (x1, x2, x3) in error coordinates; returns their rates.
std::array<double, 3> reduced_S_dynamics(double x1, double x2, double x3,
                                         const CraneParams& p, double c1,
                                         double c2, double alpha1);

}  // namespace cranelab
