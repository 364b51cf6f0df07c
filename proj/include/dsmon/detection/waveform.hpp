#pragma once

#include "dsmon/core/trajectory.hpp"
#include "dsmon/detection/partition.hpp"

#include <optional>
#include <vector>

namespace dsmon {

struct WaveformConfig {
  int max_iterations = 100;
  /// Stop once the sup-norm change between successive iterates drops below
  /// this value. Zero runs all iterations.
  double tolerance = 0.0;
  /// Keep every iterate instead of only the final one.
  bool keep_iterates = false;
  /// Run even when the small-gain certificate fails (a warning is logged).
  bool force = false;
  Execution execution = Execution::parallel;
};

/// Result of the Gauss-Jacobi waveform relaxation. Estimates are stored with
/// the full state dimension n (region i fills rows V_i).
struct WaveformRun {
  std::vector<double> times;
  Trajectory estimate;                 ///< final iterate w^(k)
  std::vector<Trajectory> residuals;   ///< per region, r_i = C_i w_i - y_i
  std::vector<Trajectory> iterates;    ///< w^(1..k) when keep_iterates is set
  std::vector<double> successive_change;  ///< max_t |w^(k) - w^(k-1)|_inf
  std::vector<double> iteration_error;    ///< max_t |w^(k) - w_ref|_inf, with a reference
  int iterations = 0;
  bool converged = false;
  bool certified = false;
  double max_rho = 0.0;
  WaveformConfig config;
};

/// E w^(k)' = (A_D + G C) w^(k) + A_C w^(k-1) - G y, solved region by region.
///
/// Each region integrates its own block and reads only the previous-round
/// iterates of its in-neighbours. The initial guess is the constant x0.
/// The small-gain certificate (sigma = 0) is checked first; when it fails the
/// call throws unless `config.force` is set.
WaveformRun run_waveform_relaxation(const Partition& partition, const Matrix& g,
                                    const Trajectory& y, const Vector& x0,
                                    const WaveformConfig& config = {},
                                    const Trajectory* reference = nullptr,
                                    const NumericPolicy& policy = {});

}  // namespace dsmon
