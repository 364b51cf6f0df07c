#include "dsmon/detection/waveform.hpp"

#include "dsmon/core/linalg.hpp"
#include "dsmon/core/log.hpp"
#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/certify.hpp"

#include <cmath>

namespace dsmon {

namespace {

struct RegionSolver {
  std::vector<Index> nodes;
  std::vector<Index> in;   // in-neighbour regions
  std::vector<Matrix> coupling;  // A(V_i, V_j) for j in `in`
  Matrix forcing_y;        // -G_i y_i on the grid
  std::optional<DaeIntegrator> integ;
};

double sup_diff(const Matrix& a, const Matrix& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

WaveformRun run_waveform_relaxation(const Partition& partition, const Matrix& g,
                                    const Trajectory& y, const Vector& x0,
                                    const WaveformConfig& config, const Trajectory* reference,
                                    const NumericPolicy& policy) {
  const DescriptorSystem& sys = partition.system();
  y.validate();
  if (y.dim() != sys.p()) throw DimensionError("waveform: measurement dimension mismatch");
  if (x0.size() != sys.n()) throw DimensionError("waveform: initial state has wrong dimension");
  if (g.rows() != sys.n() || g.cols() != sys.p()) throw DimensionError("waveform: G must be n x p");
  if (config.max_iterations < 1) throw DimensionError("waveform: need at least one iteration");
  if (reference && (!same_grid(reference->times, y.times) || reference->dim() != sys.n())) {
    throw DimensionError("waveform: reference does not match the grid or state dimension");
  }

  WaveformRun run;
  run.config = config;
  run.times = y.times;
  SweepOptions sweep;
  sweep.execution = config.execution;
  const CertificateReport cert = certify_small_gain(partition, g, 0.0, sweep);
  run.certified = cert.passed;
  run.max_rho = cert.max_rho;
  if (!cert.passed) {
    if (!config.force) {
      throw DesignInfeasibleError("small-gain certificate failed (max rho = " +
                                  std::to_string(cert.max_rho) + "); set force to run anyway");
    }
    log::warn("waveform relaxation forced without a small-gain certificate (max rho = " +
              std::to_string(cert.max_rho) + ")");
  }

  const Index nr = partition.count();
  const Index steps = y.size();
  std::vector<RegionSolver> solvers(nr);
  for (Index r = 0; r < nr; ++r) {
    RegionSolver& s = solvers[r];
    s.nodes = partition.nodes(r);
    s.in = partition.in_neighbors(r);
    for (Index j : s.in) s.coupling.push_back(partition.block(sys.A(), r, j));
    const Matrix gi = partition.local_gain(g, r);
    s.forcing_y = -gi * partition.restrict_output_rows(y.samples, r);
    s.integ.emplace(partition.local_E(r), partition.local_A(r) + gi * partition.local_C(r), policy);
  }

  // w^(0): x0 held constant
  std::vector<Matrix> prev(nr), next(nr);
  for (Index r = 0; r < nr; ++r) {
    prev[r] = partition.restrict_rows(x0, r).col(0).replicate(1, steps);
  }

  auto solve_region = [&](Index r) {
    const RegionSolver& s = solvers[r];
    Matrix f = s.forcing_y;
    for (std::size_t k = 0; k < s.in.size(); ++k) f += s.coupling[k] * prev[s.in[k]];
    const Vector xi = partition.restrict_rows(x0, r).col(0);
    next[r] = s.integ->integrate_sampled(y.times, xi, f);
  };

  auto assemble = [&](const std::vector<Matrix>& parts) {
    Matrix w(sys.n(), steps);
    for (Index r = 0; r < nr; ++r) {
      const auto& nodes = solvers[r].nodes;
      for (std::size_t a = 0; a < nodes.size(); ++a) w.row(nodes[a]) = parts[r].row(static_cast<Index>(a));
    }
    return w;
  };

  for (int k = 1; k <= config.max_iterations; ++k) {
    if (config.execution == Execution::parallel) {
      bool failed = false;
      std::string message;
#pragma omp parallel for schedule(dynamic)
      for (long long r = 0; r < static_cast<long long>(nr); ++r) {
        try {
          solve_region(static_cast<Index>(r));
        } catch (const std::exception& ex) {
#pragma omp critical(dsmon_waveform_error)
          {
            if (!failed) message = ex.what();
            failed = true;
          }
        }
      }
      if (failed) throw ConsistencyError("waveform round " + std::to_string(k) + ": " + message);
    } else {
      for (Index r = 0; r < nr; ++r) solve_region(r);
    }

    double change = 0.0;
    for (Index r = 0; r < nr; ++r) change = std::max(change, sup_diff(next[r], prev[r]));
    run.successive_change.push_back(change);
    std::swap(prev, next);
    run.iterations = k;

    if (reference || config.keep_iterates) {
      const Matrix w = assemble(prev);
      if (reference) run.iteration_error.push_back(sup_diff(w, reference->samples));
      if (config.keep_iterates) run.iterates.emplace_back("w", y.times, w);
    }
    if (config.tolerance > 0.0 && change < config.tolerance) {
      run.converged = true;
      break;
    }
  }
  if (config.tolerance <= 0.0) run.converged = run.certified;

  run.estimate = Trajectory("w", y.times, assemble(prev));
  for (Index r = 0; r < nr; ++r) {
    const Matrix ci = partition.local_C(r);
    run.residuals.emplace_back("r" + std::to_string(r + 1), y.times,
                               ci * prev[r] - partition.restrict_output_rows(y.samples, r));
  }
  if (!run.converged && config.tolerance > 0.0) {
    log::warn("waveform relaxation stopped at the iteration cap without meeting the tolerance");
  }
  return run;
}

}  // namespace dsmon
