#include "cranelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cranelab/errors.hpp"

namespace cranelab {
namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kRankTol = 1e-10;
constexpr double kImagSnapTol = 1e-8;
constexpr double kCondWarn = 1e8;

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ConfigError(std::string(what) + " requires a nonempty square matrix");
  }
}

std::complex<double> horner(std::span<const double> monic, std::complex<double> z) {
  std::complex<double> p = monic[0];
  for (std::size_t i = 1; i < monic.size(); ++i) p = p * z + monic[i];
  return p;
}

std::complex<double> horner_deriv(std::span<const double> monic, std::complex<double> z) {
  const std::size_t n = monic.size() - 1;
  std::complex<double> d = 0.0;
  std::complex<double> p = monic[0];
  for (std::size_t i = 1; i <= n; ++i) {
    d = d * z + p;
    p = p * z + monic[i];
  }
  return d;
}

void polish_and_snap(std::span<const double> monic, std::vector<std::complex<double>>& roots) {
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      const auto dp = horner_deriv(monic, z);
      if (std::abs(dp) < 1e-300) break;
      const auto step = horner(monic, z) / dp;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    if (std::abs(z.imag()) <= kImagSnapTol * std::max(1.0, std::abs(z))) {
      z = {z.real(), 0.0};
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// s^2 + b s + c, cancellation-safe.
std::array<std::complex<double>, 2> quadratic_roots(double b, double c) {
  const double d = b * b - 4.0 * c;
  if (d < 0.0) {
    const double re = -b / 2.0;
    const double im = std::sqrt(-d) / 2.0;
    return {std::complex<double>{re, im}, std::complex<double>{re, -im}};
  }
  const double sd = std::sqrt(d);
  const double q = -(b + std::copysign(sd, b)) / 2.0;
  if (q == 0.0) return {std::complex<double>{0.0, 0.0}, std::complex<double>{0.0, 0.0}};
  return {std::complex<double>{q, 0.0}, std::complex<double>{c / q, 0.0}};
}

// Depressed cubic t^3 + p t + q = 0.
std::array<std::complex<double>, 3> depressed_cubic_roots(double p, double q) {
  if (p == 0.0 && q == 0.0) return {0.0, 0.0, 0.0};
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    // Three distinct real roots (p < 0 here): trigonometric form.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg);
    std::array<std::complex<double>, 3> out;
    for (int k = 0; k < 3; ++k) {
      out[k] = m * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0);
    }
    return out;
  }
  // One real root: Cardano, picking the branch that avoids cancellation.
  const double delta = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
  const double big = (q <= 0.0) ? (-q / 2.0 + delta) : (-q / 2.0 - delta);
  const double u = std::cbrt(big);
  const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
  const double t1 = u + v;
  const double re = -t1 / 2.0;
  const double im = std::numbers::sqrt3 / 2.0 * (u - v);
  return {std::complex<double>{t1, 0.0}, std::complex<double>{re, im},
          std::complex<double>{re, -im}};
}

std::vector<std::complex<double>> cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const auto t = depressed_cubic_roots(p, q);
  std::vector<std::complex<double>> out(t.begin(), t.end());
  for (auto& z : out) z -= a / 3.0;
  return out;
}

std::vector<std::complex<double>> quartic_roots(double a, double b, double c, double d) {
  // Depress with s = t - a/4.
  const double p = b - 3.0 * a * a / 8.0;
  const double q = c - a * b / 2.0 + a * a * a / 8.0;
  const double r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;

  std::vector<std::complex<double>> t;
  const double qscale = std::max({1.0, std::abs(p), std::abs(r)});
  if (std::abs(q) <= 1e-13 * qscale) {
    // Biquadratic: z^2 + p z + r = 0 in z = t^2.
    for (const auto& z : quadratic_roots(p, r)) {
      const auto s = std::sqrt(z);
      t.push_back(s);
      t.push_back(-s);
    }
  } else {
    // Resolvent cubic m^3 + 2p m^2 + (p^2 - 4r) m - q^2 = 0 always has a
    // positive real root; the largest gives the stablest factorization.
    const auto ms = cubic_roots(2.0 * p, p * p - 4.0 * r, -q * q);
    double m = -1.0;
    for (const auto& z : ms) {
      if (std::abs(z.imag()) <= kImagSnapTol * std::max(1.0, std::abs(z))) {
        m = std::max(m, z.real());
      }
    }
    if (m <= 0.0) {
      throw ConfigError("quartic resolvent produced no positive root");
    }
    const double w = std::sqrt(m);
    const double half = (p + m) / 2.0;
    const double shift = q / (2.0 * w);
    for (const auto& z : quadratic_roots(w, half - shift)) t.push_back(z);
    for (const auto& z : quadratic_roots(-w, half + shift)) t.push_back(z);
  }
  for (auto& z : t) z -= a / 4.0;
  return t;
}

struct Lu {
  Mat lu;
  std::vector<int> perm;
  bool ok = false;
};

Lu lu_factor(const Mat& a) {
  const int n = a.rows();
  Lu f{a, std::vector<int>(n), false};
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(piv, k))) piv = i;
    if (std::abs(f.lu(piv, k)) <= kPivotTol * std::max(1.0, scale)) return f;
    if (piv != k) {
      std::swap(f.perm[piv], f.perm[k]);
      for (int j = 0; j < n; ++j) std::swap(f.lu(piv, j), f.lu(k, j));
    }
    for (int i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= f.lu(i, k) * f.lu(k, j);
    }
  }
  f.ok = true;
  return f;
}

std::vector<double> lu_solve(const Lu& f, std::span<const double> rhs) {
  const int n = f.lu.rows();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

double one_norm(const Mat& a) {
  double best = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Mat::trace() const {
  double t = 0.0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ConfigError("matrix product dimension mismatch");
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("matrix sum dimension mismatch");
  Mat c = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("matrix difference dimension mismatch");
  Mat c = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Mat operator*(double s, const Mat& a) {
  Mat c = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

std::vector<double> mat_vec(const Mat& a, std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.cols())
    throw ConfigError("matrix-vector dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Mat subtract_outer(const Mat& a, std::span<const double> b, std::span<const double> k) {
  if (static_cast<int>(b.size()) != a.rows() || static_cast<int>(k.size()) != a.cols())
    throw ConfigError("outer-product update dimension mismatch");
  Mat c = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) -= b[i] * k[j];
  return c;
}

std::vector<double> char_poly(const Mat& A) {
  require_square(A, "char_poly");
  const int n = A.rows();
  std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  coeffs[0] = 1.0;
  Mat M = A;
  for (int k = 1; k <= n; ++k) {
    const double ck = -M.trace() / k;
    coeffs[static_cast<std::size_t>(k)] = ck;
    if (k < n) {
      Mat shifted = M;
      for (int i = 0; i < n; ++i) shifted(i, i) += ck;
      M = A * shifted;
    }
  }
  return coeffs;
}

std::vector<std::complex<double>> poly_roots(std::span<const double> monic) {
  if (monic.size() < 2) throw ConfigError("polynomial must have degree at least 1");
  if (monic[0] == 0.0) throw ConfigError("leading polynomial coefficient is zero");
  std::vector<double> c(monic.begin(), monic.end());
  if (c[0] != 1.0)
    for (auto& v : c) v /= monic[0];

  const std::size_t deg = c.size() - 1;
  std::vector<std::complex<double>> roots;
  switch (deg) {
    case 1:
      roots = {std::complex<double>{-c[1], 0.0}};
      break;
    case 2: {
      const auto r = quadratic_roots(c[1], c[2]);
      roots.assign(r.begin(), r.end());
      break;
    }
    case 3:
      roots = cubic_roots(c[1], c[2], c[3]);
      break;
    case 4:
      roots = quartic_roots(c[1], c[2], c[3], c[4]);
      break;
    default:
      throw ConfigError("closed-form root solver supports degree 1 through 4");
  }
  polish_and_snap(c, roots);
  return roots;
}

std::vector<std::complex<double>> eigenvalues(const Mat& A) {
  return poly_roots(char_poly(A));
}

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Degenerate: return "degenerate";
  }
  return "unknown";
}

StabilityVerdict hurwitz_check(std::span<const double> monic) {
  if (monic.size() < 2 || monic[0] == 0.0)
    throw ConfigError("hurwitz_check needs a monic polynomial of degree >= 1");
  std::vector<double> c(monic.begin(), monic.end());
  if (c[0] != 1.0)
    for (auto& v : c) v /= monic[0];

  const int n = static_cast<int>(c.size()) - 1;
  double scale = 0.0;
  for (const double v : c) scale = std::max(scale, std::abs(v));
  const double tol = kPivotTol * std::max(1.0, scale);

  const int width = n / 2 + 1;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) + 1,
                                        std::vector<double>(static_cast<std::size_t>(width) + 1, 0.0));
  for (int j = 0; j <= n; j += 2) rows[0][static_cast<std::size_t>(j / 2)] = c[static_cast<std::size_t>(j)];
  for (int j = 1; j <= n; j += 2) rows[1][static_cast<std::size_t>(j / 2)] = c[static_cast<std::size_t>(j)];

  for (int i = 2; i <= n; ++i) {
    const double pivot = rows[static_cast<std::size_t>(i - 1)][0];
    if (std::abs(pivot) <= tol) return StabilityVerdict::Degenerate;
    for (int j = 0; j < width; ++j) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (pivot * rows[static_cast<std::size_t>(i - 2)][static_cast<std::size_t>(j + 1)] -
           rows[static_cast<std::size_t>(i - 2)][0] *
               rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j + 1)]) /
          pivot;
    }
  }

  int sign_changes = 0;
  double prev = rows[0][0];
  for (int i = 1; i <= n; ++i) {
    const double cur = rows[static_cast<std::size_t>(i)][0];
    if (std::abs(cur) <= tol) return StabilityVerdict::Degenerate;
    if ((prev > 0.0) != (cur > 0.0)) ++sign_changes;
    prev = cur;
  }
  return sign_changes == 0 ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
}

ControllabilityResult controllability_matrix(const LinearPlant& plant) {
  require_square(plant.A, "controllability_matrix");
  const int n = plant.A.rows();
  if (static_cast<int>(plant.B.size()) != n)
    throw ConfigError("input vector length must match the state dimension");

  ControllabilityResult out;
  out.matrix = Mat(n, n);
  std::vector<double> col = plant.B;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out.matrix(i, j) = col[i];
    if (j + 1 < n) col = mat_vec(plant.A, col);
  }

  // Rank by Gaussian elimination with partial pivoting.
  Mat work = out.matrix;
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(work(i, j)));
  const double tol = kRankTol * std::max(1.0, scale);

  int rank = 0;
  for (int col_k = 0; col_k < n && rank < n; ++col_k) {
    int piv = rank;
    for (int i = rank + 1; i < n; ++i)
      if (std::abs(work(i, col_k)) > std::abs(work(piv, col_k))) piv = i;
    if (std::abs(work(piv, col_k)) <= tol) continue;
    if (piv != rank)
      for (int j = 0; j < n; ++j) std::swap(work(piv, j), work(rank, j));
    for (int i = rank + 1; i < n; ++i) {
      const double f = work(i, col_k) / work(rank, col_k);
      for (int j = col_k; j < n; ++j) work(i, j) -= f * work(rank, j);
    }
    ++rank;
  }
  out.rank = rank;
  out.full_rank = (rank == n);
  return out;
}

LinearGain ackermann_gain(const LinearPlant& plant,
                          std::span<const std::complex<double>> poles) {
  require_square(plant.A, "ackermann_gain");
  const int n = plant.A.rows();
  if (static_cast<int>(poles.size()) != n)
    throw ConfigError("need exactly one closed-loop pole per state");

  const auto ctrb = controllability_matrix(plant);
  if (!ctrb.full_rank) {
    std::ostringstream msg;
    msg << "pair (A, B) is uncontrollable: controllability rank " << ctrb.rank
        << " of " << n;
    throw UncontrollableError(msg.str());
  }

  // Desired characteristic polynomial from the pole set.
  std::vector<std::complex<double>> cc = {1.0};
  for (const auto& p : poles) {
    std::vector<std::complex<double>> next(cc.size() + 1, 0.0);
    for (std::size_t i = 0; i < cc.size(); ++i) {
      next[i] += cc[i];
      next[i + 1] -= cc[i] * p;
    }
    cc = std::move(next);
  }
  std::vector<double> phi(cc.size());
  for (std::size_t i = 0; i < cc.size(); ++i) {
    if (std::abs(cc[i].imag()) > 1e-9 * std::max(1.0, std::abs(cc[i].real())))
      throw ConfigError("closed-loop poles must form a conjugate-closed set");
    phi[i] = cc[i].real();
  }

  // phi(A) by Horner.
  Mat phiA = Mat::identity(n);
  for (std::size_t i = 1; i < phi.size(); ++i) {
    phiA = phiA * plant.A;
    for (int d = 0; d < n; ++d) phiA(d, d) += phi[i];
  }

  // K = e_n^T C^{-1} phi(A): solve C^T w = e_n, then K = phi(A)^T w.
  Mat ct(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ct(i, j) = ctrb.matrix(j, i);
  const Lu fac_t = lu_factor(ct);
  if (!fac_t.ok)
    throw UncontrollableError("controllability matrix is numerically singular");
  std::vector<double> en(static_cast<std::size_t>(n), 0.0);
  en.back() = 1.0;
  const auto w = lu_solve(fac_t, en);

  LinearGain gain;
  gain.k.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gain.k[static_cast<std::size_t>(j)] += w[static_cast<std::size_t>(i)] * phiA(i, j);

  // 1-norm condition estimate of C; a huge value means the gain is fragile.
  const Lu fac = lu_factor(ctrb.matrix);
  if (fac.ok) {
    Mat inv(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      const auto x = lu_solve(fac, e);
      for (int i = 0; i < n; ++i) inv(i, j) = x[static_cast<std::size_t>(i)];
    }
    const double cond = one_norm(ctrb.matrix) * one_norm(inv);
    if (cond > kCondWarn) {
      std::cerr << "warning: controllability matrix condition estimate " << cond
                << " exceeds " << kCondWarn << "; pole-placement gain may be inaccurate\n";
    }
  }
  return gain;
}

LinearizationConstants crane_linearization_constants(const CraneParams& p) {
  p.validate();
  LinearizationConstants lc;
  lc.a1 = p.payload_mass * p.gravity / p.cart_mass;
  lc.a2 = -(p.payload_mass + p.cart_mass) * p.gravity / (p.cart_mass * p.rope_length);
  lc.b10 = 1.0 / p.cart_mass;
  lc.b20 = -1.0 / (p.cart_mass * p.rope_length);
  return lc;
}

LinearPlant crane_linearization(const CraneParams& p) {
  const auto lc = crane_linearization_constants(p);
  LinearPlant plant;
  plant.A = Mat(4, 4);
  plant.A(0, 1) = 1.0;
  plant.A(1, 2) = lc.a1;
  plant.A(2, 3) = 1.0;
  plant.A(3, 2) = lc.a2;
  plant.B = {0.0, lc.b10, 0.0, lc.b20};
  plant.labels = {"x1", "x2", "x3", "x4"};
  return plant;
}

Mat sliding_linearization(const LinearizationConstants& lc, double c1, double c2,
                          double alpha1) {
  const double den = lc.b20 + alpha1 * lc.b10;
  if (std::abs(den) < kSingularGainTol)
    throw SingularGainError("b20 + alpha1*b10");
  Mat A(3, 3);
  A(0, 1) = 1.0;
  A(1, 0) = lc.b10 * c1 * c2 * alpha1 / den;
  A(1, 1) = -lc.b10 * alpha1 * (c1 - c2) / den;
  A(1, 2) = lc.a1 - lc.b10 * (alpha1 * lc.a1 + lc.a2 - c2 * c2) / den;
  A(2, 0) = -alpha1 * c1;
  A(2, 1) = -alpha1;
  A(2, 2) = -c2;
  return A;
}

SlidingCharCoeffs sliding_char_coeffs(const LinearizationConstants& lc, double c1,
                                      double c2, double alpha1) {
  const double den = lc.b20 + alpha1 * lc.b10;
  if (std::abs(den) < kSingularGainTol)
    throw SingularGainError("b20 + alpha1*b10");
  SlidingCharCoeffs l;
  l.l1 = c2 + lc.b10 * alpha1 * (c1 - c2) / den;
  l.l2 = alpha1 * (lc.b20 * lc.a1 - lc.b10 * lc.a2) / den;
  l.l3 = c1 * l.l2;
  return l;
}

SurfaceDesign solve_surface_params(const LinearizationConstants& lc, double d1,
                                   double d2, double d3) {
  if (std::abs(d2) < 1e-12)
    throw SingularDesignError("d2 must be nonzero to recover c1 = d3/d2");
  if (std::abs(lc.b20) < 1e-12)
    throw SingularDesignError("swing input gain b20 must be nonzero");

  SurfaceDesign out;
  out.d1 = d1;
  out.d2 = d2;
  out.d3 = d3;
  out.c1 = d3 / d2;

  const double alpha_den = lc.b20 * lc.a1 - lc.b10 * lc.a2 - d2 * lc.b10;
  const double alpha_scale =
      std::abs(lc.b20 * lc.a1) + std::abs(lc.b10 * lc.a2) + std::abs(d2 * lc.b10);
  if (std::abs(alpha_den) < 1e-12 * std::max(1.0, alpha_scale))
    throw SingularDesignError("alpha1 denominator b20*a1 - b10*a2 - d2*b10 vanishes");
  out.alpha1 = lc.b20 * d2 / alpha_den;

  const double den = lc.b20 + out.alpha1 * lc.b10;
  if (std::abs(den) < kSingularGainTol)
    throw SingularDesignError("recovered surface makes b20 + alpha1*b10 vanish");
  out.c2 = d1 + out.alpha1 * lc.b10 * (d1 - out.c1) / lc.b20;

  const auto l = sliding_char_coeffs(lc, out.c1, out.c2, out.alpha1);
  const double r1 = std::abs(l.l1 - d1) / std::max(1.0, std::abs(d1));
  const double r2 = std::abs(l.l2 - d2) / std::max(1.0, std::abs(d2));
  const double r3 = std::abs(l.l3 - d3) / std::max(1.0, std::abs(d3));
  out.roundtrip_residual = std::max({r1, r2, r3});
  return out;
}

}  // namespace cranelab
