#include "dsmon/core/signal.hpp"

#include "dsmon/core/log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsmon {

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::zero: return "zero";
    case SignalKind::constant: return "constant";
    case SignalKind::sinusoid: return "sinusoid";
    case SignalKind::uniform_random: return "uniform_random";
    case SignalKind::smooth_random: return "smooth_random";
    case SignalKind::piecewise: return "piecewise";
  }
  return "zero";
}

SignalKind signal_kind_from_string(const std::string& name) {
  if (name == "zero") return SignalKind::zero;
  if (name == "constant") return SignalKind::constant;
  if (name == "sinusoid") return SignalKind::sinusoid;
  if (name == "uniform_random" || name == "uniform-random") return SignalKind::uniform_random;
  if (name == "smooth_random" || name == "smooth-random") return SignalKind::smooth_random;
  if (name == "piecewise") return SignalKind::piecewise;
  throw ScenarioError("unknown signal kind '" + name + "'");
}

double smooth_step(double tau) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / tau);
  const double b = std::exp(-1.0 / (1.0 - tau));
  return a / (a + b);
}

double hashed_uniform(std::uint64_t seed, std::uint64_t channel, std::uint64_t knot) {
  // splitmix64 finalizer over a mixed key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (channel + 1) + 0xbf58476d1ce4e5b9ULL * (knot + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

bool SignalSpec::is_smooth(double start_time) const {
  switch (kind) {
    case SignalKind::zero:
    case SignalKind::smooth_random:
      return true;
    case SignalKind::constant:
    case SignalKind::sinusoid:
      return ramp > 0.0 || start_time <= 0.0;
    case SignalKind::uniform_random:
    case SignalKind::piecewise:
      return false;
  }
  return false;
}

namespace {

Vector broadcast(const std::vector<double>& values, Index channels, const char* what) {
  if (values.size() == 1) return Vector::Constant(channels, values[0]);
  if (static_cast<Index>(values.size()) != channels) {
    throw DimensionError(std::string("signal parameter '") + what + "' has " +
                         std::to_string(values.size()) + " entries for " +
                         std::to_string(channels) + " channels");
  }
  return Eigen::Map<const Vector>(values.data(), channels);
}

}  // namespace

Signal make_signal(const SignalSpec& spec, Index channels, double start_time) {
  if (!spec.is_smooth(start_time)) {
    log::warn("attack signal '" + to_string(spec.kind) +
              "' is not smooth; the simulation is accurate only between switching times");
  }
  const double t0 = start_time;
  const double ramp = spec.ramp;
  auto envelope = [t0, ramp](double t) {
    if (t < t0) return 0.0;
    if (ramp <= 0.0) return 1.0;
    return smooth_step((t - t0) / ramp);
  };

  switch (spec.kind) {
    case SignalKind::zero:
      return [channels](double) { return Vector::Zero(channels).eval(); };

    case SignalKind::constant: {
      const Vector v = broadcast(spec.value, channels, "value");
      return [v, envelope](double t) { return (envelope(t) * v).eval(); };
    }

    case SignalKind::sinusoid: {
      const Vector amp = broadcast(spec.value, channels, "value");
      const Vector freq = broadcast(spec.frequency, channels, "frequency");
      const Vector phase = broadcast(spec.phase, channels, "phase");
      return [amp, freq, phase, envelope, t0](double t) {
        const double env = envelope(t);
        Vector out = Vector::Zero(amp.size());
        if (env == 0.0) return out;
        for (Index i = 0; i < amp.size(); ++i) {
          out(i) = env * amp(i) * std::sin(2.0 * std::numbers::pi * freq(i) * (t - t0) + phase(i));
        }
        return out;
      };
    }

    case SignalKind::uniform_random: {
      if (spec.hold <= 0.0) throw ScenarioError("uniform_random needs hold > 0");
      const double lo = spec.low, hi = spec.high, hold = spec.hold;
      const std::uint64_t seed = spec.seed;
      return [=](double t) {
        Vector out = Vector::Zero(channels);
        if (t < t0) return out;
        const auto knot = static_cast<std::uint64_t>(std::floor((t - t0) / hold));
        for (Index i = 0; i < channels; ++i) {
          out(i) = lo + (hi - lo) * hashed_uniform(seed, static_cast<std::uint64_t>(i), knot);
        }
        return out;
      };
    }

    case SignalKind::smooth_random: {
      if (spec.hold <= 0.0) throw ScenarioError("smooth_random needs hold > 0");
      const double lo = spec.low, hi = spec.high, hold = spec.hold;
      const std::uint64_t seed = spec.seed;
      return [=](double t) {
        Vector out = Vector::Zero(channels);
        if (t <= t0) return out;
        const double u = (t - t0) / hold;
        const auto j = static_cast<std::uint64_t>(std::floor(u));
        const double w = smooth_step(u - static_cast<double>(j));
        for (Index i = 0; i < channels; ++i) {
          const auto ch = static_cast<std::uint64_t>(i);
          const double a = j == 0 ? 0.0 : lo + (hi - lo) * hashed_uniform(seed, ch, j);
          const double b = lo + (hi - lo) * hashed_uniform(seed, ch, j + 1);
          out(i) = a + (b - a) * w;
        }
        return out;
      };
    }

    case SignalKind::piecewise: {
      if (spec.breakpoints.size() != spec.levels.size()) {
        throw ScenarioError("piecewise signal needs one level vector per breakpoint");
      }
      if (!std::is_sorted(spec.breakpoints.begin(), spec.breakpoints.end())) {
        throw ScenarioError("piecewise breakpoints must be nondecreasing");
      }
      std::vector<Vector> levels;
      for (const auto& l : spec.levels) levels.push_back(broadcast(l, channels, "levels"));
      const std::vector<double> bps = spec.breakpoints;
      return [channels, bps, levels](double t) {
        const auto it = std::upper_bound(bps.begin(), bps.end(), t);
        if (it == bps.begin()) return Vector::Zero(channels).eval();
        return levels[static_cast<std::size_t>(it - bps.begin() - 1)];
      };
    }
  }
  throw ScenarioError("unsupported signal kind");
}

}  // namespace dsmon
