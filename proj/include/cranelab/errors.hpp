#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cranelab {

// Absolute floor for every guarded control-law denominator.
inline constexpr double kSingularGainTol = 1e-9;

// A guarded denominator (b1, b2, a weighted gain sum, ...) fell below its
// singularity floor while evaluating a control law or reduced model.
class SingularGainError : public std::runtime_error {
 public:
  explicit SingularGainError(std::string denominator)
      : std::runtime_error("singular gain: |" + denominator + "| below tolerance"),
        denominator_(std::move(denominator)) {}
  const std::string& denominator() const noexcept { return denominator_; }

 private:
  std::string denominator_;
};

// The surface-parameter solver hit a vanishing denominator; no partial
// output is produced.
class SingularDesignError : public std::runtime_error {
 public:
  explicit SingularDesignError(const std::string& what_failed)
      : std::runtime_error("singular design: " + what_failed) {}
};

// Pole placement requested on a rank-deficient controllability matrix.
class UncontrollableError : public std::runtime_error {
 public:
  UncontrollableError() : std::runtime_error("pair (A, B) is not controllable") {}
  explicit UncontrollableError(const std::string& msg) : std::runtime_error(msg) {}
};

// The coupled-pair plant needs a nonzero coupling constant.
class ZeroCouplingError : public std::runtime_error {
 public:
  ZeroCouplingError() : std::runtime_error("coupling constant k must be nonzero") {}
  explicit ZeroCouplingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mass matrix determinant below tolerance: invalid physical parameters.
class SingularInertiaError : public std::runtime_error {
 public:
  SingularInertiaError() : std::runtime_error("inertia matrix is singular") {}
};

// Invalid scenario/integrator configuration or parameter set.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure while writing reports or data files.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cranelab
