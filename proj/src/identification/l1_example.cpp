#include "dsmon/identification/l1_example.hpp"

#include "dsmon/core/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace dsmon {

Matrix consensus8_matrix(double eps) {
  Matrix a(8, 8);
  a << -0.8, 0.1, 0, 0.2, 0.5, 0, 0, 0,
       0.1, -0.4 - eps, eps, 0, 0, 0.3, 0, 0,
       0, 3 * eps, -9 * eps, 0, 0, 0, 6 * eps, 0,
       0.1, 0, eps, -0.5 - eps, 0, 0, 0, 0.4,
       0.1, 0, 0, 0, -0.6, 0.2, 0, 0.3,
       0, 0.4, 0, 0, 0.1, -0.6, 0.1, 0,
       0, 0, 3 * eps, 0, 0, 0.4, -0.6 - 3 * eps, 0.2,
       0, 0, 0, 0.3, 0.2, 0, 0.2, -0.7;
  return a;
}

Matrix consensus8_output() {
  Matrix c = Matrix::Zero(3, 8);
  c(0, 1) = 1;
  c(1, 3) = 1;
  c(2, 6) = 1;
  return c;
}

namespace {

// Exact zero-order-hold discretization of x' = A x + B u over one interval.
void discretize(const Matrix& a, const Matrix& b, double h, Matrix& ad, Matrix& bd) {
  const Index n = a.rows();
  const Index m = b.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * h;
  aug.topRightCorner(n, m) = b * h;
  const Matrix ex = aug.exp();
  ad = ex.topLeftCorner(n, n);
  bd = ex.topRightCorner(n, m);
}

// RK4 on each hold interval separately so the input is constant within every step.
Trajectory integrate_held(const DescriptorSystem& sys, const Vector& values, Index channels,
                          const std::vector<double>& grid, Index ratio) {
  const DaeIntegrator integ(sys.E(), sys.A());
  const Index nsim = static_cast<Index>(grid.size());
  const Index holds = (nsim - 1) / ratio;
  Matrix x(sys.n(), nsim);
  x.col(0).setZero();
  for (Index j = 0; j < holds; ++j) {
    const std::vector<double> sub(grid.begin() + j * ratio, grid.begin() + (j + 1) * ratio + 1);
    const Vector f = sys.B() * values.segment(channels * j, channels);
    const Matrix piece = integ.integrate(sub, x.col(j * ratio), f.replicate(1, ratio + 1),
                                         f.replicate(1, ratio));
    x.middleCols(j * ratio, ratio + 1) = piece;
  }
  return Trajectory("y", grid, sys.C() * x);
}

}  // namespace

L1Report l1_counterexample(double epsilon, const L1Options& opts) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) throw DimensionError("epsilon must lie in (0, 1)");
  const Index steps = static_cast<Index>(std::llround(opts.horizon / opts.hold));
  const Index ratio = static_cast<Index>(std::llround(opts.hold / opts.sim_dt));
  if (steps < 1 || ratio < 1 || std::abs(ratio * opts.sim_dt - opts.hold) > 1e-12) {
    throw DimensionError("hold must be a positive multiple of the simulation step");
  }
  const Matrix a = consensus8_matrix(epsilon);
  const Matrix c = consensus8_output();
  Matrix bk = Matrix::Zero(8, 1);
  bk(2, 0) = 1;
  Matrix bbar = Matrix::Zero(8, 3);
  bbar(1, 0) = 1;
  bbar(3, 1) = 1;
  bbar(6, 2) = 1;

  Matrix ad, bdk, bdbar, tmp;
  discretize(a, bk, opts.hold, ad, bdk);
  discretize(a, bbar, opts.hold, tmp, bdbar);

  // samples y_1..y_N of the true output (u = 1, x0 = 0)
  const Index p = 3;
  Vector target(p * steps);
  Vector x = Vector::Zero(8);
  for (Index k = 0; k < steps; ++k) {
    x = ad * x + bdk;
    target.segment(p * k, p) = c * x;
  }
  // Markov blocks C Ad^j Bd_bar
  std::vector<Matrix> markov(steps);
  Matrix pw = bdbar;
  for (Index j = 0; j < steps; ++j) {
    markov[j] = c * pw;
    pw = ad * pw;
  }
  Matrix h = Matrix::Zero(p * steps, 3 * steps);
  for (Index k = 0; k < steps; ++k)
    for (Index j = 0; j <= k; ++j) h.block(p * k, 3 * j, p, 3) = markov[k - j];
  const Matrix normal = h.transpose() * h + opts.tikhonov * Matrix::Identity(3 * steps, 3 * steps);
  const Vector ubar = normal.ldlt().solve(h.transpose() * target);

  L1Report rep;
  rep.epsilon = epsilon;
  const std::vector<double> grid = uniform_grid(opts.horizon, opts.sim_dt);
  const Index nsim = static_cast<Index>(grid.size());
  Matrix held(3, nsim);
  for (Index k = 0; k < nsim; ++k) {
    const Index j = std::min(k / ratio, steps - 1);
    held.col(k) = ubar.segment(3 * j, 3);
  }
  rep.u_bar = Trajectory("u_bar", grid, held);

  // independent check: simulate both attacks on the continuous-time system
  const DescriptorSystem sys_k(Matrix::Identity(8, 8), a, bk, c, Matrix::Zero(3, 1));
  const DescriptorSystem sys_bar(Matrix::Identity(8, 8), a, bbar, c, Matrix::Zero(3, 3));
  const Vector x0 = Vector::Zero(8);
  const auto one = [](double) { return Vector::Ones(1); };
  rep.y_k = simulate_input(sys_k, one, grid, x0).y;
  rep.y_kbar = integrate_held(sys_bar, ubar, 3, grid, ratio);
  rep.output_match = (rep.y_k.samples - rep.y_kbar.samples).cwiseAbs().maxCoeff();

  rep.bound_satisfied = true;
  for (Index i = 0; i < 3; ++i) {
    rep.max_abs[i] = held.row(i).cwiseAbs().maxCoeff();
    if (!(rep.max_abs[i] < 1.0 / 3.0)) rep.bound_satisfied = false;
  }
  rep.norm_dominated = {true, true, true};
  rep.max_norm = {0.0, 0.0, 0.0};
  for (Index k = 0; k < nsim; ++k) {
    const Vector u = held.col(k);
    const double norms[3] = {u.lpNorm<1>(), u.norm(), u.lpNorm<Eigen::Infinity>()};
    for (int q = 0; q < 3; ++q) {
      rep.max_norm[q] = std::max(rep.max_norm[q], norms[q]);
      if (!(norms[q] < 1.0)) rep.norm_dominated[q] = false;
    }
  }
  if (!(rep.output_match <= opts.match_tol)) {
    throw IllConditionedError("equivalent attack reproduces the output only to " +
                                  format_double(rep.output_match),
                              rep.output_match);
  }
  return rep;
}

}  // namespace dsmon
