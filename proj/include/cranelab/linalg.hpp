#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cranelab/controllers.hpp"
#include "cranelab/plants.hpp"

namespace cranelab {

// Small dense row-major matrix; everything in this module is n <= 4.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}
  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double trace() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
std::vector<double> mat_vec(const Mat& a, std::span<const double> x);
// Rank-1 update a - b*k^T (b column, k row).
Mat subtract_outer(const Mat& a, std::span<const double> b, std::span<const double> k);

struct LinearPlant {
  Mat A;
  std::vector<double> B;
  std::vector<std::string> labels;
};

// Monic characteristic polynomial of A as coefficients
// [1, c1, ..., cn] of s^n + c1 s^{n-1} + ... + cn (Faddeev-LeVerrier).
std::vector<double> char_poly(const Mat& A);

// Roots of a monic real polynomial, degree 1..4, by closed forms
// (quadratic formula, trigonometric/Cardano cubic, resolvent quartic), each
// polished with complex Newton steps on the original polynomial. Roots with
// negligible imaginary part are snapped onto the real axis.
std::vector<std::complex<double>> poly_roots(std::span<const double> monic);

std::vector<std::complex<double>> eigenvalues(const Mat& A);

enum class StabilityVerdict { Stable, Unstable, Degenerate };
const char* to_string(StabilityVerdict v);

// Routh-Hurwitz test on a monic polynomial. Degenerate means a zero pivot
// made the tableau inconclusive; no verdict is guessed.
StabilityVerdict hurwitz_check(std::span<const double> monic);

struct ControllabilityResult {
  Mat matrix;  // [B, AB, A^2B, ...]
  int rank = 0;
  bool full_rank = false;
};

ControllabilityResult controllability_matrix(const LinearPlant& plant);

// Gain K placing the closed-loop eigenvalues of A - B*K at `poles`
// (conjugate-closed set, one per state). Throws UncontrollableError on a
// rank-deficient controllability matrix; warns on stderr when that matrix
// is ill-conditioned (estimate above 1e8) but still computes.
LinearGain ackermann_gain(const LinearPlant& plant,
                          std::span<const std::complex<double>> poles);

// Crane model linearized about the hanging equilibrium at the target.
struct LinearizationConstants {
  double a1 = 0.0;   // swing-to-cart coupling, m*g/M
  double a2 = 0.0;   // swing restoring rate, -(m+M)*g/(M*L)
  double b10 = 0.0;  // cart input gain, 1/M
  double b20 = 0.0;  // swing input gain, -1/(M*L)
};

LinearizationConstants crane_linearization_constants(const CraneParams& p);
LinearPlant crane_linearization(const CraneParams& p);

// 3x3 state matrix of the aggregated-surface sliding dynamics linearized at
// the origin, in coordinates (x1, x2, x3).
Mat sliding_linearization(const LinearizationConstants& lc, double c1, double c2,
                          double alpha1);

// Coefficients of its characteristic polynomial s^3 + l1 s^2 + l2 s + l3 in
// closed form; l3 = c1*l2 identically.
struct SlidingCharCoeffs {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

SlidingCharCoeffs sliding_char_coeffs(const LinearizationConstants& lc, double c1,
                                      double c2, double alpha1);

// Inverse problem: surface parameters (c1, c2, alpha1) whose sliding
// dynamics has characteristic polynomial s^3 + d1 s^2 + d2 s + d3.
struct SurfaceDesign {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  double c1 = 0.0, c2 = 0.0, alpha1 = 0.0;
  double roundtrip_residual = 0.0;  // max relative error of the re-derived coefficients
};

// Throws SingularDesignError (with no partial output) when d2, the alpha1
// denominator, b20, or the resulting b20 + alpha1*b10 vanishes.
SurfaceDesign solve_surface_params(const LinearizationConstants& lc, double d1,
                                   double d2, double d3);

}  // namespace cranelab
