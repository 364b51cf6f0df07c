#pragma once

#include "dsmon/core/common.hpp"
#include "dsmon/core/signal.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dsmon {

/// A sampled vector signal; column k of `samples` is the value at times[k].
struct Trajectory {
  std::string label;
  std::vector<double> times;
  Matrix samples;

  Trajectory() = default;
  Trajectory(std::string label_, std::vector<double> times_, Matrix samples_);

  Index dim() const { return samples.rows(); }
  Index size() const { return static_cast<Index>(times.size()); }
  Vector at(Index k) const { return samples.col(k); }

  /// Throws DimensionError unless the grid is strictly increasing and matches the samples.
  void validate() const;
  /// max over samples of the infinity norm.
  double sup_norm() const;
  /// Rows `rows` only, relabelled.
  Trajectory rows(std::span<const Index> rows, const std::string& new_label) const;
};

/// t_k = k * dt for k = 0..round(horizon / dt).
std::vector<double> uniform_grid(double horizon, double dt);

/// True when both grids have the same length and agree to 1e-12 relative.
bool same_grid(const std::vector<double>& a, const std::vector<double>& b);

/// Values at the interval midpoints (t_k + t_{k+1}) / 2 by 4-point Lagrange
/// interpolation (one-sided near the ends, linear for grids shorter than 4).
Matrix midpoint_values(const std::vector<double>& times, const Matrix& samples);

/// Piecewise-cubic Lagrange interpolant of a trajectory, as a Signal.
Signal interpolate(const Trajectory& traj);

/// Zero-order hold: value samples.col(k) on [times[k], times[k+1]).
Signal zero_order_hold(const Trajectory& traj);

void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);
Trajectory read_csv(std::istream& in);
Trajectory read_csv_file(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace dsmon
