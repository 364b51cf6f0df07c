#pragma once

#include "dsmon/detection/partition.hpp"

#include <vector>

namespace dsmon {

/// Frequency grid: omega = 0 plus +-logspace(min, max, points_per_sign).
struct SweepOptions {
  double omega_min = 1e-4;
  double omega_max = 1e4;
  Index points_per_sign = 2001;
  /// Golden-section iterations around the best grid point.
  int refine_iterations = 60;
  Execution execution = Execution::parallel;
};

std::vector<double> sweep_grid(const SweepOptions& opts);

struct CertificateReport {
  double max_rho = 0.0;
  double argmax_omega = 0.0;
  double sigma = 0.0;
  bool passed = false;
  /// 1 - max_rho
  double margin = 1.0;
  Index evaluations = 0;
};

/// rho(((sigma + j omega) E - A_D - G C)^-1 A_C) at one frequency.
double coupling_spectral_radius(const Partition& partition, const Matrix& g, double sigma,
                                double omega);

/// Numerical small-gain certificate over the frequency sweep.
CertificateReport certify_small_gain(const Partition& partition, const Matrix& g, double sigma = 0.0,
                                     const SweepOptions& opts = {});

/// max(alpha, beta) with alpha the spectral abscissa of (E, A_D + G C).
double default_sigma(const Partition& partition, const Matrix& g, double beta = 0.0,
                     const NumericPolicy& policy = {});

struct DominanceReport {
  std::vector<double> max_norm;        ///< per region, over the sweep
  std::vector<double> argmax_omega;    ///< per region
  std::vector<bool> passed;            ///< per region
  bool all_passed() const;
};

/// Per region: max over the sweep of |(j omega E_i - A_i - G_i C_i)^-1 A_C(V_i, :)|_inf < 1.
/// Passing implies the small-gain condition; the converse fails in general.
DominanceReport certify_block_dominance(const Partition& partition, const Matrix& g,
                                        const SweepOptions& opts = {});

}  // namespace dsmon
