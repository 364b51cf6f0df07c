#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/core/trajectory.hpp"
#include "dsmon/detection/partition.hpp"

#include <optional>
#include <vector>

namespace dsmon {

/// Finite eigenvalues of (E, A) with Re >= -margin at which [sE - A; C] loses
/// column rank. Empty when the triple is observable in that sense.
std::vector<Complex> unobservable_modes(const Matrix& e, const Matrix& a, const Matrix& c,
                                        const NumericPolicy& policy = {});

/// Output injection G (n x p) such that (E, A + G C) is regular, index <= 1 and
/// Hurwitz.
///
/// Without targets the gain gamma * A * C^T is tried for a few scalings; if none
/// works, or when `targets` is given, the slow eigenvalues are placed by a
/// Sylvester-equation observer design on the slow subsystem. Targets must
/// contain one value per slow mode and be closed under conjugation.
Matrix design_injection(const Matrix& e, const Matrix& a, const Matrix& c,
                        const std::vector<Complex>* targets = nullptr,
                        const NumericPolicy& policy = {});

enum class FilterMode { centralized, decentralized };

/// E w' = (A + G C) w - G y,   r = C w - y.
struct DetectionFilter {
  DescriptorSystem plant;
  Matrix G;
  FilterMode mode = FilterMode::centralized;
  std::optional<Partition> partition;

  Matrix closed_loop() const { return plant.A() + G * plant.C(); }
};

/// Wraps a user-supplied centralized gain after checking the Hurwitz property.
DetectionFilter make_detection_filter(const DescriptorSystem& sys, const Matrix& g,
                                      const NumericPolicy& policy = {});

DetectionFilter design_centralized(const DescriptorSystem& sys,
                                   const std::vector<Complex>* targets = nullptr,
                                   const NumericPolicy& policy = {});

/// Per-region designs assembled into a block-diagonal G. The coupling
/// condition is not checked here.
DetectionFilter design_decentralized(const Partition& partition, const NumericPolicy& policy = {});

/// Decentralized filter with a given block-diagonal gain; checks every region.
DetectionFilter make_decentralized_filter(const Partition& partition, const Matrix& g,
                                          const NumericPolicy& policy = {});

/// Simulates the filter from w(0) = x0 driven by the sampled measurements and
/// returns the residual. The filter state is written to `w_out` when given.
Trajectory run_detector(const DetectionFilter& filter, const Trajectory& y, const Vector& x0,
                        const NumericPolicy& policy = {}, Trajectory* w_out = nullptr);

/// factor * (1 + max_t |y(t)|_inf)
double residual_threshold(const Trajectory& y, double factor);

struct DetectionVerdict {
  double max_residual = 0.0;
  double threshold = 0.0;
  bool attack = false;
};

/// Attack flagged iff max_t |r(t)|_inf > threshold. A positive `absolute`
/// overrides the relative rule (useful for noisy runs).
DetectionVerdict detection_verdict(const Trajectory& r, const Trajectory& y,
                                   const NumericPolicy& policy = {}, double absolute = 0.0);

}  // namespace dsmon
