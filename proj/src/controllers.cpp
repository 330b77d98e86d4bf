#include "cranelab/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace cranelab {

double switch_term(double s, double boundary_layer) {
  if (boundary_layer <= 0.0) return signum(s);
  return std::clamp(s / boundary_layer, -1.0, 1.0);
}

void IhssmcParams::validate() const {
  if (!(C1 > 0.0) || !(C2 > 0.0) || !(C3 > 0.0))
    throw ConfigError("incremental surface gains C1, C2, C3 must be positive");
  if (!(eta > 0.0) || !(k > 0.0))
    throw ConfigError("reaching gains eta, k must be positive");
  if (boundary_layer < 0.0) throw ConfigError("boundary layer must be >= 0");
  if (!std::isfinite(target)) throw ConfigError("target must be finite");
}

void AhssmcParams::validate() const {
  if (!(alpha1 != 0.0) || !(alpha2 != 0.0))
    throw ConfigError("surface weights alpha1, alpha2 must be nonzero");
  if (!(eta > 0.0) || !(k > 0.0))
    throw ConfigError("reaching gains eta, k must be positive");
  if (boundary_layer < 0.0) throw ConfigError("boundary layer must be >= 0");
  if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(target))
    throw ConfigError("surface parameters must be finite");
}

SurfaceValues ihssmc_surfaces(const StateVec& s, const IhssmcParams& p) {
  SurfaceValues v;
  const double x1_err = s.x1 - p.target;
  v.s1 = s.x2 + p.C1 * x1_err;
  v.c2_eff = p.C2 * signum(s.x3 * v.s1);
  v.s2 = v.s1 + v.c2_eff * s.x3;
  v.c3_eff = p.C3 * signum(s.x4 * v.s2);
  v.s_top = v.s2 + v.c3_eff * s.x4;
  return v;
}

SurfaceValues ahssmc_surfaces(const StateVec& s, const AhssmcParams& p) {
  SurfaceValues v;
  v.s1 = s.x2 + p.c1 * (s.x1 - p.target);
  v.s2 = s.x4 + p.c2 * s.x3;
  v.s_top = p.alpha1 * v.s1 + p.alpha2 * v.s2;
  return v;
}

IhssmcControl ihssmc_control_parts(const StateVec& s, const IhssmcParams& p,
                                   const PlantTerms& t) {
  IhssmcControl out;
  out.surfaces = ihssmc_surfaces(s, p);
  const SurfaceValues& v = out.surfaces;
  const double den = v.c3_eff * t.b2 + t.b1;
  if (std::abs(den) < kSingularGainTol) throw SingularGainError("c3*b2 + b1");
  out.u_eq = -(v.c3_eff * t.f2 + v.c2_eff * s.x4 + t.f1 + p.C1 * s.x2) / den;
  out.u_sw = -(p.eta * switch_term(v.s_top, p.boundary_layer) + p.k * v.s_top) / den;
  out.u = out.u_eq + out.u_sw;
  return out;
}

double ihssmc_control(const StateVec& s, const IhssmcParams& p, const PlantTerms& t) {
  return ihssmc_control_parts(s, p, t).u;
}

AhssmcControl ahssmc_control_parts(const StateVec& s, const AhssmcParams& p,
                                   const PlantTerms& t) {
  AhssmcControl out;
  out.surfaces = ahssmc_surfaces(s, p);
  if (std::abs(t.b1) < kSingularGainTol) throw SingularGainError("b1");
  if (std::abs(t.b2) < kSingularGainTol) throw SingularGainError("b2");
  const double den = p.alpha1 * t.b1 + p.alpha2 * t.b2;
  if (std::abs(den) < kSingularGainTol)
    throw SingularGainError("alpha1*b1 + alpha2*b2");
  out.u_eq1 = -(t.f1 + p.c1 * s.x2) / t.b1;
  out.u_eq2 = -(t.f2 + p.c2 * s.x4) / t.b2;
  out.u_sw = -(p.alpha1 * t.b1 * out.u_eq2 + p.alpha2 * t.b2 * out.u_eq1 +
               p.eta * switch_term(out.surfaces.s_top, p.boundary_layer) +
               p.k * out.surfaces.s_top) /
             den;
  out.u = out.u_eq1 + out.u_eq2 + out.u_sw;
  return out;
}

double ahssmc_control(const StateVec& s, const AhssmcParams& p, const PlantTerms& t) {
  return ahssmc_control_parts(s, p, t).u;
}

double equivalent_control_s1(const StateVec& s, double c1, const CraneParams& p) {
  const PlantTerms t = crane_terms(s, p);
  if (std::abs(t.b1) < kSingularGainTol) throw SingularGainError("b1");
  return (c1 * c1 * s.x1 - t.f1) / t.b1;
}

double equivalent_control_S(const StateVec& s, const AhssmcParams& p,
                            const CraneParams& cp) {
  // Normalize the aggregate weight: only the ratio alpha1/alpha2 matters for
  // the surface and its equivalent control.
  const double ar = p.alpha1 / p.alpha2;
  const double x4 = -p.c2 * s.x3 - ar * (s.x2 + p.c1 * s.x1);
  const PlantTerms t = crane_terms({s.x1, s.x2, s.x3, x4}, cp);
  const double den = t.b2 + ar * t.b1;
  if (std::abs(den) < kSingularGainTol) throw SingularGainError("b2 + (alpha1/alpha2)*b1");
  return -(ar * t.f1 + t.f2 - p.c1 * p.c2 * ar * s.x1 +
           ar * (p.c1 - p.c2) * s.x2 - p.c2 * p.c2 * s.x3) /
         den;
}

double linear_feedback(const StateVec& s, const LinearGain& gain, double target) {
  if (gain.k.size() != 4) throw ConfigError("state feedback gain must have 4 entries");
  return -(gain.k[0] * (s.x1 - target) + gain.k[1] * s.x2 + gain.k[2] * s.x3 +
           gain.k[3] * s.x4);
}

}  // namespace cranelab
