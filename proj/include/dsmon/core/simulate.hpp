#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/core/pencil.hpp"
#include "dsmon/core/signal.hpp"
#include "dsmon/core/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dsmon {

struct NoiseSpec {
  Matrix state_cov;   ///< R_eta (n x n), white process noise intensity
  Matrix output_cov;  ///< R_zeta (p x p), per-sample measurement noise covariance
  std::uint64_t seed = 7;
};

struct AttackScenario {
  AttackSet attack_set;
  SignalSpec signal;
  double start_time = 0.0;
  Vector x0;
  double horizon = 10.0;
  double dt = 1e-3;
  std::optional<NoiseSpec> noise;

  void validate(const DescriptorSystem& sys) const;
  std::vector<double> grid() const { return uniform_grid(horizon, dt); }
  Signal attack_signal() const { return make_signal(signal, attack_set.size(), start_time); }
};

/// Fixed-step integrator for E x' = A x + f(t) with an index <= 1 pencil.
///
/// The slow coordinates are advanced with the classical Runge-Kutta scheme;
/// the algebraic coordinates are recovered pointwise so the constraints hold
/// exactly at every grid point.
class DaeIntegrator {
 public:
  DaeIntegrator(const Matrix& e, const Matrix& a, const NumericPolicy& policy = {});

  Index dim() const { return n_; }
  Index slow_dim() const { return real_.slow.rows(); }
  const IndexOneRealization& realization() const { return real_; }

  /// Norm of the Ker(E^T) component of A x0 + f0.
  double inconsistency(const Vector& x0, const Vector& f0) const;
  void require_consistent(const Vector& x0, const Vector& f0) const;

  /// Forcing given at the grid points (n x N) and at interval midpoints (n x N-1).
  /// `noise_sqrt` (n x n), when non-empty, adds sqrt(dt)-scaled white noise to
  /// the slow coordinates after every step. Returns the states (n x N).
  Matrix integrate(const std::vector<double>& grid, const Vector& x0, const Matrix& f_nodes,
                   const Matrix& f_mid, const Matrix& noise_sqrt = Matrix(),
                   std::uint64_t noise_seed = 0) const;

  /// Forcing sampled on the grid; midpoint values by cubic interpolation.
  Matrix integrate_sampled(const std::vector<double>& grid, const Vector& x0,
                           const Matrix& f_nodes) const;

  /// Forcing evaluated from a continuous-time signal.
  Matrix integrate_signal(const std::vector<double>& grid, const Vector& x0,
                          const Signal& forcing) const;

 private:
  Index n_ = 0;
  Matrix e_, a_;
  IndexOneRealization real_;
  NumericPolicy policy_;
};

/// Evaluates a signal at the grid points and at the interval midpoints.
void sample_signal(const Signal& s, const std::vector<double>& grid, Index dim, Matrix& nodes,
                   Matrix& mids);

struct SimulationResult {
  Trajectory x;
  Trajectory y;
  Trajectory u;  ///< the attack mode u_K on the grid
};

SimulationResult simulate(const DescriptorSystem& sys, const AttackScenario& scenario,
                          const NumericPolicy& policy = {});

/// Simulation with an arbitrary input signal u (dimension m).
SimulationResult simulate_input(const DescriptorSystem& sys, const Signal& u,
                                const std::vector<double>& grid, const Vector& x0,
                                const NumericPolicy& policy = {});

}  // namespace dsmon
