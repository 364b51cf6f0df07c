#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsmon {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Numerical thresholds shared by every decision made in the library.
///
/// A single instance is passed (by const reference) through all modules so
/// that a caller can tighten or relax the whole pipeline in one place.
struct NumericPolicy {
  /// Relative singular-value cutoff used for rank decisions. A value of zero
  /// selects the classical max(rows, cols) * machine-epsilon rule.
  double rank_rtol = 1e-10;
  /// Subspaces are equal when their largest principal angle is below this.
  double angle_tol = 1e-7;
  /// Max-abs bound for zero blocks and invariance residuals.
  double containment_tol = 1e-8;
  /// Relative bound for A2 consistency checks.
  double consistency_tol = 1e-9;
  /// Finite eigenvalues must satisfy Re(lambda) < -hurwitz_margin.
  double hurwitz_margin = 1e-9;
  /// Residual verdict threshold: factor * (1 + max_t |y(t)|_inf).
  double residual_factor = 1e-6;
  /// Seed for every randomized numerical test (regularity, normal rank).
  std::uint64_t seed = 0x5eed2012ULL;

  double rank_threshold(double sigma_max, Index rows, Index cols) const;
};

/// Execution strategy for kernels that have both a serial and an OpenMP path.
enum class Execution { serial, parallel };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class UnsupportedIndexError : public Error {
 public:
  using Error::Error;
};

class DesignInfeasibleError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, double block_norm = 0.0)
      : Error(what), block_norm_(block_norm) {}
  double block_norm() const { return block_norm_; }

 private:
  double block_norm_;
};

class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, double count)
      : Error(what), count_(count) {}
  double count() const { return count_; }

 private:
  double count_;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ScenarioError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsmon
