#pragma once

#include "dsmon/core/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dsmon {

/// A vector-valued function of time.
using Signal = std::function<Vector(double)>;

enum class SignalKind { zero, constant, sinusoid, uniform_random, smooth_random, piecewise };

std::string to_string(SignalKind kind);
SignalKind signal_kind_from_string(const std::string& name);

/// Parametric description of an attack mode u_K(t). Per-channel parameters
/// given as a single value are broadcast to every channel.
///
/// - constant:       value for t >= start (optionally with a smooth ramp)
/// - sinusoid:       value * sin(2 pi frequency (t - start) + phase)
/// - uniform_random: levels drawn uniformly in [low, high], held for `hold` seconds
/// - smooth_random:  uniform levels every `hold` seconds joined by C-infinity
///                   transitions, starting from zero at `start`
/// - piecewise:      levels[j] on [breakpoints[j], breakpoints[j+1])
struct SignalSpec {
  SignalKind kind = SignalKind::zero;
  std::vector<double> value{1.0};
  std::vector<double> frequency{0.1};
  std::vector<double> phase{0.0};
  double low = 0.0;
  double high = 1.0;
  double hold = 1.0;
  double ramp = 0.0;
  std::uint64_t seed = 1;
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> levels;

  /// True when the generated signal is infinitely differentiable on [0, inf).
  bool is_smooth(double start_time) const;
};

/// Builds the signal for `channels` attack channels with onset `start_time`.
/// Non-smooth specifications are accepted with a logged warning.
Signal make_signal(const SignalSpec& spec, Index channels, double start_time);

/// C-infinity step: 0 for tau <= 0, 1 for tau >= 1.
double smooth_step(double tau);

/// Deterministic uniform number in [0, 1) from (seed, channel, knot).
double hashed_uniform(std::uint64_t seed, std::uint64_t channel, std::uint64_t knot);

}  // namespace dsmon
