// Serial versus OpenMP timings for the kernels that have both paths.
//
// Usage: bench_parallel [repeats]

#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/certify.hpp"
#include "dsmon/detection/detection_filter.hpp"
#include "dsmon/detection/waveform.hpp"
#include "dsmon/identification/identify.hpp"
#include "dsmon/regional/cooperative.hpp"
#include "dsmon/scenario/examples.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dsmon;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, double mismatch) {
  std::printf("%-22s %10.4f %10.4f %8.2fx %12.3e\n", name, serial, parallel, serial / parallel, mismatch);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled\n");
#endif
  std::printf("%-22s %10s %10s %9s %12s\n", "kernel", "serial [s]", "omp [s]", "speedup", "max diff");

  const Scenario ring = ring_scenario(5, 4, 0.05, 7);
  const Partition part = ring.make_partition();
  std::vector<Matrix> local;
  for (Index r = 0; r < part.count(); ++r) local.push_back(part.local_A(r) * part.local_C(r).transpose());
  const Matrix g = part.assemble_gain(local);

  {
    SweepOptions s, p;
    s.execution = Execution::serial;
    p.execution = Execution::parallel;
    CertificateReport a, b;
    const double ts = seconds([&] { a = certify_small_gain(part, g, 0.0, s); }, repeats);
    const double tp = seconds([&] { b = certify_small_gain(part, g, 0.0, p); }, repeats);
    row("small-gain sweep", ts, tp, std::abs(a.max_rho - b.max_rho));
  }

  {
    AttackScenario sc = ring.attack;
    sc.horizon = 20.0;
    const Trajectory y = simulate(ring.system(), sc).y;
    WaveformConfig s, p;
    s.max_iterations = p.max_iterations = 30;
    s.execution = Execution::serial;
    p.execution = Execution::parallel;
    WaveformRun a, b;
    const double ts = seconds([&] { a = run_waveform_relaxation(part, g, y, sc.x0, s); }, repeats);
    const double tp = seconds([&] { b = run_waveform_relaxation(part, g, y, sc.x0, p); }, repeats);
    row("waveform relaxation", ts, tp, (a.estimate.samples - b.estimate.samples).cwiseAbs().maxCoeff());
  }

  {
    const Scenario c8 = consensus8_scenario();
    const Trajectory y = simulate(c8.system(), c8.attack).y;
    IdentifyOptions s, p;
    s.mode = p.mode = CardinalityMode::up_to;
    s.execution = Execution::serial;
    p.execution = Execution::parallel;
    IdentificationVerdict a, b;
    const double ts = seconds([&] { a = identify(c8.system(), y, c8.attack.x0, 2, s); }, repeats);
    const double tp = seconds([&] { b = identify(c8.system(), y, c8.attack.x0, 2, p); }, repeats);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      diff = std::max(diff, std::abs(a.candidates[i].max_residual - b.candidates[i].max_residual));
    }
    row("identify (k <= 2)", ts, tp, diff);
  }

  {
    const Scenario t16 = tworegion16_scenario();
    const Partition p16 = t16.make_partition();
    const Trajectory y = simulate(t16.system(), t16.attack).y;
    RegionalOptions s, p;
    s.execution = Execution::serial;
    p.execution = Execution::parallel;
    RegionalIdentification a, b;
    const double ts = seconds([&] { a = identify_regional(p16, y, t16.attack.x0, 1, s); }, repeats);
    const double tp = seconds([&] { b = identify_regional(p16, y, t16.attack.x0, 1, p); }, repeats);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.verdict.max_residual.size(); ++i) {
      const double x = a.verdict.max_residual[i], z = b.verdict.max_residual[i];
      if (std::isfinite(x) || std::isfinite(z)) diff = std::max(diff, std::abs(x - z));
    }
    row("regional identify", ts, tp, diff);
  }
  return 0;
}
