#include "dsmon/detection/certify.hpp"

#include "dsmon/core/pencil.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace dsmon {

std::vector<double> sweep_grid(const SweepOptions& opts) {
  if (opts.omega_min <= 0.0 || opts.omega_max <= opts.omega_min || opts.points_per_sign < 2) {
    throw DimensionError("sweep: need 0 < omega_min < omega_max and at least two points");
  }
  const double lo = std::log10(opts.omega_min);
  const double hi = std::log10(opts.omega_max);
  const Index k = opts.points_per_sign;
  std::vector<double> grid;
  grid.reserve(2 * k + 1);
  for (Index i = k - 1; i >= 0; --i) grid.push_back(-std::pow(10.0, lo + (hi - lo) * i / (k - 1)));
  grid.push_back(0.0);
  for (Index i = 0; i < k; ++i) grid.push_back(std::pow(10.0, lo + (hi - lo) * i / (k - 1)));
  return grid;
}

namespace {

CMatrix shifted(const Matrix& e, const Matrix& a, double sigma, double omega) {
  return Complex(sigma, omega) * e.cast<Complex>() - a.cast<Complex>();
}

CMatrix solve_checked(const CMatrix& lhs, const CMatrix& rhs, double omega) {
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  const Vector sv = Eigen::JacobiSVD<CMatrix>(lhs).singularValues();
  if (sv.size() > 0 && sv(sv.size() - 1) <= 1e-14 * std::max(1.0, sv(0))) {
    throw InternalError("frequency sweep hit a singular pencil at omega = " + std::to_string(omega));
  }
  return lu.solve(rhs);
}

template <class F>
std::vector<double> evaluate_all(const std::vector<double>& omegas, F&& f, Execution exec) {
  std::vector<double> out(omegas.size());
  const long long count = static_cast<long long>(omegas.size());
  if (exec == Execution::parallel) {
    bool failed = false;
    std::string message;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
      try {
        out[i] = f(omegas[i]);
      } catch (const std::exception& ex) {
#pragma omp critical(dsmon_sweep_error)
        {
          if (!failed) message = ex.what();
          failed = true;
        }
      }
    }
    if (failed) throw InternalError(message);
  } else {
    for (long long i = 0; i < count; ++i) out[i] = f(omegas[i]);
  }
  return out;
}

// Golden-section maximization of f on [a, b] in log|omega| when both ends share a sign.
template <class F>
std::pair<double, double> refine(F&& f, double left, double right, double best_w, double best_v,
                                 int iterations) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = left, b = right;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  if (fc > best_v) {
    best_v = fc;
    best_w = c;
  }
  if (fd > best_v) {
    best_v = fd;
    best_w = d;
  }
  return {best_w, best_v};
}

template <class F>
std::pair<double, double> sweep_max(F&& f, const SweepOptions& opts, Index* evaluations) {
  const std::vector<double> grid = sweep_grid(opts);
  const std::vector<double> vals = evaluate_all(grid, f, opts.execution);
  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  double best_w = grid[best];
  double best_v = vals[best];
  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(best + 1, grid.size() - 1);
  if (opts.refine_iterations > 0 && hi > lo) {
    auto [w, v] = refine(f, grid[lo], grid[hi], best_w, best_v, opts.refine_iterations);
    best_w = w;
    best_v = v;
  }
  if (evaluations) *evaluations = static_cast<Index>(grid.size()) + 2 * opts.refine_iterations + 2;
  return {best_w, best_v};
}

}  // namespace

double coupling_spectral_radius(const Partition& partition, const Matrix& g, double sigma,
                                double omega) {
  const DescriptorSystem& sys = partition.system();
  const Matrix ad = partition.diagonal_part(sys.A()) + g * sys.C();
  const Matrix ac = partition.coupling_part(sys.A());
  if (ac.isZero(0.0)) return 0.0;
  const CMatrix m = solve_checked(shifted(sys.E(), ad, sigma, omega), ac.cast<Complex>(), omega);
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

CertificateReport certify_small_gain(const Partition& partition, const Matrix& g, double sigma,
                                     const SweepOptions& opts) {
  const DescriptorSystem& sys = partition.system();
  if (g.rows() != sys.n() || g.cols() != sys.p()) throw DimensionError("G must be n x p");
  CertificateReport rep;
  rep.sigma = sigma;
  if (partition.coupling_part(sys.A()).isZero(0.0)) {
    rep.passed = true;
    rep.evaluations = 0;
    return rep;
  }
  auto f = [&](double w) { return coupling_spectral_radius(partition, g, sigma, w); };
  auto [w, v] = sweep_max(f, opts, &rep.evaluations);
  rep.max_rho = v;
  rep.argmax_omega = w;
  rep.margin = 1.0 - v;
  rep.passed = v < 1.0;
  return rep;
}

double default_sigma(const Partition& partition, const Matrix& g, double beta,
                     const NumericPolicy& policy) {
  const DescriptorSystem& sys = partition.system();
  const double alpha =
      spectral_abscissa(sys.E(), partition.diagonal_part(sys.A()) + g * sys.C(), policy);
  return std::max(alpha, beta);
}

bool DominanceReport::all_passed() const {
  for (bool b : passed)
    if (!b) return false;
  return true;
}

DominanceReport certify_block_dominance(const Partition& partition, const Matrix& g,
                                        const SweepOptions& opts) {
  const DescriptorSystem& sys = partition.system();
  if (g.rows() != sys.n() || g.cols() != sys.p()) throw DimensionError("G must be n x p");
  DominanceReport rep;
  for (Index r = 0; r < partition.count(); ++r) {
    const Matrix row = partition.coupling_row(sys.A(), r);
    if (row.isZero(0.0)) {
      rep.max_norm.push_back(0.0);
      rep.argmax_omega.push_back(0.0);
      rep.passed.push_back(true);
      continue;
    }
    const Matrix ei = partition.local_E(r);
    const Matrix ai = partition.local_A(r) + partition.local_gain(g, r) * partition.local_C(r);
    const CMatrix rhs = row.cast<Complex>();
    auto f = [&](double w) {
      const CMatrix m = solve_checked(shifted(ei, ai, 0.0, w), rhs, w);
      return m.cwiseAbs().rowwise().sum().maxCoeff();
    };
    auto [w, v] = sweep_max(f, opts, nullptr);
    rep.max_norm.push_back(v);
    rep.argmax_omega.push_back(w);
    rep.passed.push_back(v < 1.0);
  }
  return rep;
}

}  // namespace dsmon
