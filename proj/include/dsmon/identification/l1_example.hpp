#pragma once

#include "dsmon/core/trajectory.hpp"

#include <array>

namespace dsmon {

/// The 8-node consensus matrix A(eps) with measurements of nodes 2, 4 and 7.
Matrix consensus8_matrix(double eps);
Matrix consensus8_output();

struct L1Options {
  double horizon = 20.0;
  /// Hold interval of the reconstructed attack.
  double hold = 0.05;
  double tikhonov = 1e-10;
  /// Step of the independent verification simulation.
  double sim_dt = 0.005;
  double match_tol = 1e-4;
};

/// Equivalent attack on K_bar = {2,4,7} reproducing the output of u = 1 on K = {3}.
struct L1Report {
  double epsilon = 0.0;
  Trajectory u_bar;  ///< held values on the verification grid (3 channels)
  Trajectory y_k;    ///< output of u = 1 on node 3
  Trajectory y_kbar; ///< output of u_bar on nodes 2, 4, 7
  std::array<double, 3> max_abs{};  ///< max_t |u_bar_i(t)|
  bool bound_satisfied = false;     ///< every channel below 1/3
  double output_match = 0.0;        ///< max_t |y_k - y_kbar|_inf
  /// Pointwise |u(t)|_p > |u_bar(t)|_p on the grid for p = 1, 2, inf.
  std::array<bool, 3> norm_dominated{};
  /// max_t |u_bar(t)|_p for p = 1, 2, inf (|u(t)|_p = 1).
  std::array<double, 3> max_norm{};
};

/// Regularized zero-order-hold deconvolution followed by an independent
/// simulation check. Throws IllConditionedError when the output match exceeds
/// `match_tol`.
L1Report l1_counterexample(double epsilon, const L1Options& opts = {});

}  // namespace dsmon
