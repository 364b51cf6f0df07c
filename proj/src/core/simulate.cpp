#include "dsmon/core/simulate.hpp"

#include "dsmon/core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dsmon {

void AttackScenario::validate(const DescriptorSystem& sys) const {
  attack_set.validate(sys.m());
  if (!(dt > 0.0)) throw DimensionError("scenario dt must be positive");
  if (!(horizon > 0.0)) throw DimensionError("scenario horizon must be positive");
  if (start_time < 0.0 || start_time > horizon) {
    throw DimensionError("attack start time must lie in [0, horizon]");
  }
  if (x0.size() != sys.n()) throw DimensionError("x0 has wrong dimension");
  if (noise) {
    if (noise->state_cov.size() != 0 &&
        (noise->state_cov.rows() != sys.n() || noise->state_cov.cols() != sys.n())) {
      throw DimensionError("state noise covariance must be n x n");
    }
    if (noise->output_cov.size() != 0 &&
        (noise->output_cov.rows() != sys.p() || noise->output_cov.cols() != sys.p())) {
      throw DimensionError("output noise covariance must be p x p");
    }
  }
}

DaeIntegrator::DaeIntegrator(const Matrix& e, const Matrix& a, const NumericPolicy& policy)
    : n_(a.rows()), e_(e), a_(a), policy_(policy) {
  const PencilDecomposition pd = decompose_pencil(e, a, policy);
  if (!pd.regular) throw UnsupportedIndexError("pencil (E, A) is not regular");
  if (pd.index > 1) throw UnsupportedIndexError("pencil (E, A) has index greater than one");
  real_ = realize_index_one(pd);
}

double DaeIntegrator::inconsistency(const Vector& x0, const Vector& f0) const {
  if (real_.constraint.rows() == 0) return 0.0;
  return (real_.constraint * (a_ * x0 + f0)).norm();
}

void DaeIntegrator::require_consistent(const Vector& x0, const Vector& f0) const {
  const double bad = inconsistency(x0, f0);
  const double scale = 1.0 + (a_ * x0 + f0).norm();
  if (bad > policy_.consistency_tol * scale) {
    throw ConsistencyError("initial state violates the algebraic constraints (residual " +
                           format_double(bad) + ")");
  }
}

Matrix DaeIntegrator::integrate(const std::vector<double>& grid, const Vector& x0,
                                const Matrix& f_nodes, const Matrix& f_mid,
                                const Matrix& noise_sqrt, std::uint64_t noise_seed) const {
  const Index steps = static_cast<Index>(grid.size());
  if (steps == 0) return Matrix(n_, 0);
  if (x0.size() != n_) throw DimensionError("initial state has wrong dimension");
  if (f_nodes.rows() != n_ || f_nodes.cols() != steps || f_mid.rows() != n_ ||
      f_mid.cols() != steps - 1) {
    throw DimensionError("forcing samples do not match the grid");
  }
  require_consistent(x0, f_nodes.col(0));

  const Matrix& m = real_.slow;
  const Matrix g_nodes = real_.forcing * f_nodes;
  const Matrix g_mid = real_.forcing * f_mid;
  const Index r = m.rows();
  Matrix z(r, steps);
  z.col(0) = real_.to_slow * x0;

  const bool noisy = noise_sqrt.size() != 0;
  Matrix noise_map;
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> gauss;
  Vector xi(n_);
  if (noisy) noise_map = real_.forcing * noise_sqrt;

  // fast modes are resolved with substeps, the forcing between grid points
  // being the quadratic through the node and midpoint values
  const double rho = r == 0 ? 0.0 : Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
  Vector k1(r), k2(r), k3(r), k4(r), zs(r);
  for (Index k = 0; k + 1 < steps; ++k) {
    const double h = grid[static_cast<std::size_t>(k + 1)] - grid[static_cast<std::size_t>(k)];
    const Index sub = rho * h > 0.25 ? static_cast<Index>(std::ceil(4.0 * rho * h)) : 1;
    if (sub == 1) {
      const auto zk = z.col(k);
      k1.noalias() = m * zk + g_nodes.col(k);
      k2.noalias() = m * (zk + 0.5 * h * k1) + g_mid.col(k);
      k3.noalias() = m * (zk + 0.5 * h * k2) + g_mid.col(k);
      k4.noalias() = m * (zk + h * k3) + g_nodes.col(k + 1);
      z.col(k + 1) = zk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      const auto forcing = [&](double tau) -> Vector {
        return 2.0 * (tau - 0.5) * (tau - 1.0) * g_nodes.col(k) - 4.0 * tau * (tau - 1.0) * g_mid.col(k) +
               2.0 * tau * (tau - 0.5) * g_nodes.col(k + 1);
      };
      const double hs = h / static_cast<double>(sub);
      zs = z.col(k);
      for (Index j = 0; j < sub; ++j) {
        const double t0 = static_cast<double>(j) / static_cast<double>(sub);
        const double dtau = 1.0 / static_cast<double>(sub);
        const Vector fm = forcing(t0 + 0.5 * dtau);
        k1.noalias() = m * zs + forcing(t0);
        k2.noalias() = m * (zs + 0.5 * hs * k1) + fm;
        k3.noalias() = m * (zs + 0.5 * hs * k2) + fm;
        k4.noalias() = m * (zs + hs * k3) + forcing(t0 + dtau);
        zs += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      z.col(k + 1) = zs;
    }
    if (noisy) {
      for (Index i = 0; i < n_; ++i) xi(i) = gauss(rng);
      z.col(k + 1) += std::sqrt(h) * (noise_map * xi);
    }
  }
  Matrix x = real_.lift_state * z;
  if (real_.lift_forcing.size() != 0 && real_.lift_state.cols() < n_) {
    x.noalias() += real_.lift_forcing * f_nodes;
  }
  return x;
}

Matrix DaeIntegrator::integrate_sampled(const std::vector<double>& grid, const Vector& x0,
                                        const Matrix& f_nodes) const {
  return integrate(grid, x0, f_nodes, midpoint_values(grid, f_nodes));
}

void sample_signal(const Signal& s, const std::vector<double>& grid, Index dim, Matrix& nodes,
                   Matrix& mids) {
  const Index steps = static_cast<Index>(grid.size());
  nodes.resize(dim, steps);
  mids.resize(dim, std::max<Index>(steps - 1, 0));
  for (Index k = 0; k < steps; ++k) {
    Vector v = s(grid[static_cast<std::size_t>(k)]);
    if (v.size() != dim) throw DimensionError("signal returned a vector of the wrong size");
    nodes.col(k) = v;
    if (k + 1 < steps) {
      const double tm =
          0.5 * (grid[static_cast<std::size_t>(k)] + grid[static_cast<std::size_t>(k + 1)]);
      mids.col(k) = s(tm);
    }
  }
}

Matrix DaeIntegrator::integrate_signal(const std::vector<double>& grid, const Vector& x0,
                                       const Signal& forcing) const {
  Matrix nodes, mids;
  sample_signal(forcing, grid, n_, nodes, mids);
  return integrate(grid, x0, nodes, mids);
}

namespace {

SimulationResult run_simulation(const DescriptorSystem& sys, const Matrix& input_map,
                                const Matrix& feed_map, const Matrix& u_nodes,
                                const Matrix& u_mid, const std::vector<double>& grid,
                                const Vector& x0, const std::optional<NoiseSpec>& noise,
                                const NumericPolicy& policy) {
  const DaeIntegrator integrator(sys.E(), sys.A(), policy);
  Matrix noise_sqrt;
  std::uint64_t seed = 0;
  if (noise && noise->state_cov.size() != 0) {
    if (!linalg::is_psd(noise->state_cov, 1e-9)) throw DimensionError("R_eta is not PSD");
    noise_sqrt = linalg::psd_sqrt(noise->state_cov);
    seed = noise->seed;
  }
  Matrix x = integrator.integrate(grid, x0, input_map * u_nodes, input_map * u_mid, noise_sqrt,
                                  seed);
  Matrix y = sys.C() * x + feed_map * u_nodes;
  if (noise && noise->output_cov.size() != 0) {
    if (!linalg::is_psd(noise->output_cov, 1e-9)) throw DimensionError("R_zeta is not PSD");
    const Matrix s = linalg::psd_sqrt(noise->output_cov);
    std::mt19937_64 rng(noise->seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    std::normal_distribution<double> gauss;
    Vector xi(sys.p());
    for (Index k = 0; k < y.cols(); ++k) {
      for (Index i = 0; i < sys.p(); ++i) xi(i) = gauss(rng);
      y.col(k) += s * xi;
    }
  }
  SimulationResult res;
  res.x = Trajectory("x", grid, std::move(x));
  res.y = Trajectory("y", grid, std::move(y));
  res.u = Trajectory("u", grid, u_nodes);
  return res;
}

}  // namespace

SimulationResult simulate(const DescriptorSystem& sys, const AttackScenario& scenario,
                          const NumericPolicy& policy) {
  scenario.validate(sys);
  const auto grid = scenario.grid();
  const Index k = scenario.attack_set.size();
  Matrix u_nodes, u_mid;
  sample_signal(scenario.attack_signal(), grid, k, u_nodes, u_mid);
  return run_simulation(sys, sys.B_of(scenario.attack_set), sys.D_of(scenario.attack_set),
                        u_nodes, u_mid, grid, scenario.x0, scenario.noise, policy);
}

SimulationResult simulate_input(const DescriptorSystem& sys, const Signal& u,
                                const std::vector<double>& grid, const Vector& x0,
                                const NumericPolicy& policy) {
  Matrix u_nodes, u_mid;
  sample_signal(u, grid, sys.m(), u_nodes, u_mid);
  return run_simulation(sys, sys.B(), sys.D(), u_nodes, u_mid, grid, x0, std::nullopt, policy);
}

}  // namespace dsmon
