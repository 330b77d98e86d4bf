#pragma once

#include <vector>

#include "cranelab/plants.hpp"

namespace cranelab {

// Strict sign with sign(0) = 0. All switching logic in the control laws
// depends on this convention.
inline double signum(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

// Switching function of the reaching term: raw sign, or a linear saturation
// of half-width `boundary_layer` when that is positive.
double switch_term(double s, double boundary_layer);

// Incremental hierarchical sliding-mode law: surfaces built stage by stage,
// each stage adding a sign-switched increment of the next coordinate.
struct IhssmcParams {
  double C1 = 1.4;
  double C2 = 0.2;
  double C3 = 0.1;
  double eta = 1.0;  // reaching-law switching gain
  double k = 0.1;    // reaching-law linear gain
  double target = 2.0;
  double boundary_layer = 0.0;  // 0 = raw sign switching

  void validate() const;
};

// Aggregated hierarchical sliding-mode law: one weighted surface
// S = alpha1*s1 + alpha2*s2 over the two chain surfaces.
struct AhssmcParams {
  double c1 = 0.8;
  double c2 = 35.0;
  double alpha1 = 10.0;
  double alpha2 = 1.0;
  double eta = 3.5;
  double k = 6.0;
  double target = 2.0;
  double boundary_layer = 0.0;

  void validate() const;
};

// Surface stack at one state. s_top is the outermost surface: s3 for the
// incremental law, S for the aggregated law. c2_eff/c3_eff are the
// sign-switched incremental gains (zero for the aggregated law).
struct SurfaceValues {
  double s1 = 0.0;
  double s2 = 0.0;
  double s_top = 0.0;
  double c2_eff = 0.0;
  double c3_eff = 0.0;
};

// The incoming state carries the raw cart position; both surface stacks
// subtract the target internally (s1 = x2 + c1*(x1 - target)).
SurfaceValues ihssmc_surfaces(const StateVec& s, const IhssmcParams& p);
SurfaceValues ahssmc_surfaces(const StateVec& s, const AhssmcParams& p);

struct IhssmcControl {
  double u = 0.0;
  double u_eq = 0.0;
  double u_sw = 0.0;
  SurfaceValues surfaces;
};

struct AhssmcControl {
  double u = 0.0;
  double u_eq1 = 0.0;
  double u_eq2 = 0.0;
  double u_sw = 0.0;
  SurfaceValues surfaces;
};

// Both laws throw SingularGainError when a guarded denominator magnitude
// drops below kSingularGainTol; the error names the denominator.
IhssmcControl ihssmc_control_parts(const StateVec& s, const IhssmcParams& p,
                                   const PlantTerms& t);
double ihssmc_control(const StateVec& s, const IhssmcParams& p, const PlantTerms& t);

AhssmcControl ahssmc_control_parts(const StateVec& s, const AhssmcParams& p,
                                   const PlantTerms& t);
double ahssmc_control(const StateVec& s, const AhssmcParams& p, const PlantTerms& t);

// Equivalent control holding the crane on s1 = x2 + c1*x1 = 0. Analysis
// coordinates: state.x1 is the cart error (no target subtraction).
double equivalent_control_s1(const StateVec& s, double c1, const CraneParams& p);

// Equivalent control holding the crane on the aggregated surface, with the
// swing rate eliminated through the surface constraint. Analysis
// coordinates; state.x4 is ignored.
double equivalent_control_S(const StateVec& s, const AhssmcParams& p,
                            const CraneParams& cp);

// Static full-state feedback u = -K * (x1 - target, x2, x3, x4).
struct LinearGain {
  std::vector<double> k;
};

double linear_feedback(const StateVec& s, const LinearGain& gain, double target);

}  // namespace cranelab
