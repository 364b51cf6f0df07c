#include <doctest.h>

#include "dsmon/core/log.hpp"
#include "dsmon/core/pencil.hpp"
#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/certify.hpp"
#include "dsmon/detection/detection_filter.hpp"
#include "dsmon/detection/waveform.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>

using namespace dsmon;

namespace {

DescriptorSystem plant(const Matrix& a, const Matrix& c) {
  return DescriptorSystem::attack_model(Matrix::Identity(a.rows(), a.rows()), a, c);
}

AttackScenario scenario(std::vector<Index> k, SignalSpec sig, double start, Vector x0,
                        double horizon, double dt) {
  AttackScenario sc;
  sc.attack_set = AttackSet(std::move(k));
  sc.signal = std::move(sig);
  sc.start_time = start;
  sc.x0 = std::move(x0);
  sc.horizon = horizon;
  sc.dt = dt;
  return sc;
}

SignalSpec ramped_constant(double value) {
  SignalSpec s;
  s.kind = SignalKind::constant;
  s.value = {value};
  s.ramp = 0.5;
  return s;
}

Partition network_partition(const fixture::Network& net) {
  return Partition(plant(net.a, net.c), net.regions);
}

double max_after(const Trajectory& r, double t0, bool after) {
  double m = 0.0;
  for (Index k = 0; k < r.size(); ++k) {
    if ((r.times[k] > t0) == after) m = std::max(m, r.samples.col(k).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST_CASE("injection for a stable, fully observed plant") {
  const Matrix a = -Matrix::Identity(2, 2);
  const DetectionFilter f = design_centralized(plant(a, Matrix::Identity(2, 2)));
  CHECK(is_hurwitz(f.plant.E(), f.closed_loop()));
  CHECK(f.mode == FilterMode::centralized);
}

TEST_CASE("pole placement matches the characteristic polynomial of the targets") {
  std::mt19937_64 rng(5);
  const std::vector<Complex> targets{{-1, 0}, {-2, 0}, {-3, 0}, {-4, 0}};
  int tested = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = oracle::random_matrix(rng, 4, 4);
    const Matrix c = oracle::random_matrix(rng, 1 + trial % 2, 4);
    const Matrix g = design_injection(Matrix::Identity(4, 4), a, c, &targets);
    const auto got = oracle::char_poly(a + g * c);
    const auto want = oracle::poly_from_roots({-1, -2, -3, -4});
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-6 * std::max(1.0, std::abs(want[i])));
    ++tested;
  }
  CHECK(tested == 10);

  // complex targets
  const std::vector<Complex> pair{{-1, 2}, {-1, -2}, {-3, 0}};
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  const Matrix c = oracle::random_matrix(rng, 1, 3);
  const Matrix g = design_injection(Matrix::Identity(3, 3), a, c, &pair);
  const auto got = oracle::char_poly(a + g * c);
  // (s^2 + 2 s + 5)(s + 3) = s^3 + 5 s^2 + 11 s + 15
  const std::vector<double> want{15, 11, 5, 1};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));
}

TEST_CASE("pole placement on the slow part of a descriptor pencil") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pen = fixture::random_index_one(rng, 5, 3, -1.0);
    const Matrix c = oracle::random_matrix(rng, 2, 5);
    const std::vector<Complex> targets{{-1, 0}, {-2, 0}, {-5, 0}};
    const Matrix g = design_injection(pen.e, pen.a, c, &targets);
    auto eig = pencil_eigenvalues(pen.e, pen.a + g * c);
    REQUIRE(eig.size() == 3);
    std::sort(eig.begin(), eig.end(), [](Complex x, Complex y) { return x.real() > y.real(); });
    CHECK(std::abs(eig[0] - Complex(-1, 0)) < 1e-6);
    CHECK(std::abs(eig[1] - Complex(-2, 0)) < 1e-6);
    CHECK(std::abs(eig[2] - Complex(-5, 0)) < 1e-6);
    CHECK(is_hurwitz(pen.e, pen.a + g * c));
  }
}

TEST_CASE("unobservable unstable modes are refused") {
  Matrix a(2, 2);
  a << 1, 0, 0, -1;
  Matrix c(1, 2);
  c << 0, 1;
  CHECK_THROWS_AS(design_centralized(plant(a, c)), DesignInfeasibleError);
  const auto bad = unobservable_modes(Matrix::Identity(2, 2), a, c);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_detection_filter(plant(a, c), Matrix::Zero(2, 1)), DesignInfeasibleError);
}

TEST_CASE("detector: silent without attack, loud with a detectable attack") {
  std::mt19937_64 rng(13);
  const Matrix a = oracle::random_matrix(rng, 3, 3) - 1.5 * Matrix::Identity(3, 3);
  const Matrix c = oracle::random_matrix(rng, 2, 3);
  const DescriptorSystem sys = plant(a, c);
  const AttackSet k({0});
  REQUIRE_FALSE(invariant_zeros(sys.E(), sys.A(), sys.B_of(k), sys.C(), sys.D_of(k)).has_zero_dynamics);
  const DetectionFilter f = design_centralized(sys);
  Vector x0(3);
  x0 << 1, -0.5, 0.25;

  const auto quiet = simulate(sys, scenario({0}, SignalSpec{}, 0.0, x0, 10.0, 1e-2));
  const Trajectory r0 = run_detector(f, quiet.y, x0);
  const auto v0 = detection_verdict(r0, quiet.y);
  CHECK(v0.max_residual <= 1e-6);
  CHECK_FALSE(v0.attack);

  const auto loud = simulate(sys, scenario({0}, ramped_constant(0.2), 2.0, x0, 10.0, 1e-2));
  const Trajectory r1 = run_detector(f, loud.y, x0);
  const auto v1 = detection_verdict(r1, loud.y);
  CHECK(v1.attack);
  CHECK(v1.max_residual > 10 * v1.threshold);
  CHECK(r1.label == "r");
  CHECK(r1.dim() == 2);
}

TEST_CASE("detector residual departs from zero only after the attack onset") {
  std::mt19937_64 rng(21);
  const auto net = fixture::block_network(rng, 2, 3, 0.1);
  const DescriptorSystem sys = plant(net.a, net.c);
  const DetectionFilter f = design_centralized(sys);
  const Vector x0 = oracle::random_matrix(rng, 6, 1);
  SignalSpec sig;
  sig.kind = SignalKind::smooth_random;
  sig.low = 0.2;
  sig.high = 0.5;
  sig.hold = 1.0;
  const auto sim = simulate(sys, scenario({1, 4}, sig, 15.0, x0, 25.0, 1e-2));
  const Trajectory r = run_detector(f, sim.y, x0);
  const double thr = residual_threshold(sim.y, 1e-6);
  CHECK(max_after(r, 15.0, false) <= thr);
  CHECK(max_after(r, 15.0, true) > 10 * thr);
}

TEST_CASE("detector input validation") {
  const Matrix a = -Matrix::Identity(2, 2);
  const DetectionFilter f = design_centralized(plant(a, Matrix::Identity(2, 2)));
  Trajectory y("y", {0.0, 0.1, 0.2}, Matrix::Zero(3, 3));
  CHECK_THROWS_AS(run_detector(f, y, Vector::Zero(2)), DimensionError);
  Trajectory y2("y", {0.0, 0.1, 0.2}, Matrix::Zero(2, 3));
  CHECK_THROWS_AS(run_detector(f, y2, Vector::Zero(3)), DimensionError);
}

TEST_CASE("detector rejects an inconsistent initial state on a DAE") {
  // x1' = -x1 + x2, 0 = x1 - x2 ... measured x1
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1;
  Matrix a(2, 2);
  a << -1, 0.5, 1, -1;
  Matrix c(1, 2);
  c << 1, 0;
  const DescriptorSystem sys = DescriptorSystem::attack_model(e, a, c);
  const DetectionFilter f = design_centralized(sys);
  Trajectory y("y", {0.0, 0.1, 0.2}, Matrix::Zero(1, 3));
  Vector x0(2);
  x0 << 1, 0;
  CHECK_THROWS_AS(run_detector(f, y, x0), ConsistencyError);
}

TEST_CASE("partition: derived structure and A4") {
  std::mt19937_64 rng(3);
  const auto net = fixture::block_network(rng, 3, 2, 0.2);
  const DescriptorSystem sys = plant(net.a, net.c);
  const Partition part(sys, net.regions);
  CHECK(part.count() == 3);
  CHECK(part.outputs(1) == std::vector<Index>{2, 3});
  CHECK(part.in_neighbors(0) == std::vector<Index>{1});
  CHECK(part.in_neighbors(1) == std::vector<Index>{0, 2});
  CHECK(part.out_neighbors(2) == std::vector<Index>{1});
  CHECK((part.diagonal_part(sys.A()) + part.coupling_part(sys.A()) - sys.A()).isZero(0.0));
  CHECK(part.boundary_nodes(0).size() == 2);

  // a measurement mixing two regions violates A4
  Matrix c = net.c;
  c(0, 3) = 0.5;
  CHECK_THROWS_AS(Partition(plant(net.a, c), net.regions), ConsistencyError);
  Matrix e = Matrix::Identity(6, 6);
  e(0, 5) = 1e-3;
  CHECK_THROWS_AS(Partition(DescriptorSystem::attack_model(e, net.a, net.c), net.regions), ConsistencyError);
  CHECK_THROWS_AS(Partition(sys, {{0, 1, 2}, {2, 3, 4, 5}}), DimensionError);
  CHECK_THROWS_AS(Partition(sys, {{0, 1, 2}, {3, 4}}), DimensionError);
}

TEST_CASE("decentralized design") {
  std::mt19937_64 rng(4);
  const auto net = fixture::block_network(rng, 2, 2, 0.3);
  const DescriptorSystem sys = plant(net.a, net.c);

  const DetectionFilter single = design_decentralized(Partition::single(sys));
  const DetectionFilter central = design_centralized(sys);
  CHECK((single.G - central.G).cwiseAbs().maxCoeff() <= 1e-12);

  const Partition part(sys, net.regions);
  const DetectionFilter dec = design_decentralized(part);
  CHECK(dec.mode == FilterMode::decentralized);
  for (Index r = 0; r < 2; ++r) {
    const Matrix gi = part.local_gain(dec.G, r);
    for (const Complex& lam : pencil_eigenvalues(part.local_E(r), part.local_A(r) + gi * part.local_C(r))) {
      CHECK(lam.real() < 0.0);
    }
  }
  // off-block entries of G are zero
  CHECK(dec.G.block(0, 2, 2, 2).isZero(0.0));
  CHECK(dec.G.block(2, 0, 2, 2).isZero(0.0));

  // decoupled plant: block-diagonal spectrum
  const Matrix ad = part.diagonal_part(sys.A());
  const DescriptorSystem decoupled = plant(ad, net.c);
  const DetectionFilter fd = design_decentralized(Partition(decoupled, net.regions));
  CHECK(is_hurwitz(decoupled.E(), fd.closed_loop()));
}

TEST_CASE("small-gain certificate: closed form for the scalar two-region example") {
  for (double c : {0.0, 0.5, 0.99, 1.2}) {
    Matrix a(2, 2);
    a << -1, c, c, -1;
    const DescriptorSystem sys = plant(a, Matrix(0, 2));
    const Partition part(sys, {{0}, {1}});
    const Matrix g = Matrix::Zero(2, 0);
    for (double w : {0.0, 0.3, 10.0}) {
      CHECK(coupling_spectral_radius(part, g, 0.0, w) == doctest::Approx(std::abs(c) / std::sqrt(1 + w * w)).epsilon(1e-12));
    }
    const CertificateReport rep = certify_small_gain(part, g);
    CHECK(rep.max_rho == doctest::Approx(std::abs(c)).epsilon(1e-12));
    CHECK(std::abs(rep.argmax_omega) < 1e-3);
    CHECK(rep.passed == (std::abs(c) < 1.0));
    const DominanceReport dom = certify_block_dominance(part, g);
    REQUIRE(dom.max_norm.size() == 2);
    CHECK(dom.max_norm[0] == doctest::Approx(std::abs(c)).epsilon(1e-12));
    CHECK(dom.all_passed() == (std::abs(c) < 1.0));
  }
}

TEST_CASE("serial and parallel sweeps agree exactly") {
  std::mt19937_64 rng(6);
  const auto net = fixture::block_network(rng, 3, 3, 0.3);
  const Partition part(plant(net.a, net.c), net.regions);
  const DetectionFilter f = design_decentralized(part);
  SweepOptions serial;
  serial.execution = Execution::serial;
  const auto a = certify_small_gain(part, f.G, 0.0, serial);
  const auto b = certify_small_gain(part, f.G, 0.0, {});
  CHECK(a.max_rho == b.max_rho);
  CHECK(a.argmax_omega == b.argmax_omega);
}

TEST_CASE("block dominance is sufficient but strictly conservative") {
  std::mt19937_64 rng(10);
  SweepOptions coarse;
  coarse.points_per_sign = 101;
  coarse.refine_iterations = 20;
  bool found_gap = false;
  int dominance_passes = 0;
  for (int trial = 0; trial < 400 && !(found_gap && dominance_passes > 5); ++trial) {
    Matrix a = -Matrix::Identity(4, 4);
    const double scale = 0.3 + 0.5 * (trial % 5) / 4.0;
    a.block(0, 2, 2, 2) = scale * oracle::random_orthogonal(rng, 2);
    a.block(2, 0, 2, 2) = scale * oracle::random_orthogonal(rng, 2);
    const Partition part(plant(a, Matrix(0, 4)), {{0, 1}, {2, 3}});
    const Matrix g = Matrix::Zero(4, 0);
    const auto sg = certify_small_gain(part, g, 0.0, coarse);
    const auto dom = certify_block_dominance(part, g, coarse);
    if (dom.all_passed()) {
      ++dominance_passes;
      CHECK(sg.passed);
    }
    if (sg.passed && !dom.all_passed()) found_gap = true;
  }
  CHECK(found_gap);
  CHECK(dominance_passes > 0);
}

TEST_CASE("waveform relaxation without coupling is the decentralized filter after one round") {
  std::mt19937_64 rng(14);
  const auto net = fixture::block_network(rng, 3, 3, 0.0);
  const DescriptorSystem sys = plant(net.a, net.c);
  const Partition part(sys, net.regions);
  const DetectionFilter f = design_decentralized(part);
  const Vector x0 = oracle::random_matrix(rng, 9, 1);
  const auto sim = simulate(sys, scenario({0}, SignalSpec{}, 0.0, x0, 5.0, 1e-2));
  Trajectory wdec;
  run_detector(f, sim.y, x0, {}, &wdec);
  WaveformConfig cfg;
  cfg.max_iterations = 3;
  const WaveformRun run = run_waveform_relaxation(part, f.G, sim.y, x0, cfg, &wdec);
  REQUIRE(run.iteration_error.size() == 3);
  CHECK(run.iteration_error[0] <= 1e-10);
  CHECK(run.successive_change[1] == 0.0);
  CHECK(run.certified);
}

TEST_CASE("waveform relaxation converges to the monolithic decentralized filter") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 3; ++trial) {
    const auto net = fixture::block_network(rng, 3, 3, 0.08, trial == 2);
    const DescriptorSystem sys = plant(net.a, net.c);
    const Partition part(sys, net.regions);
    const DetectionFilter f = design_decentralized(part);
    const Vector x0 = oracle::random_matrix(rng, 9, 1);
    SignalSpec sig;
    sig.kind = SignalKind::sinusoid;
    sig.value = {0.3};
    sig.frequency = {0.2};
    const auto sim = simulate(sys, scenario({2}, sig, 1.0, x0, 8.0, 1e-2));
    Trajectory wdec;
    const Trajectory rdec = run_detector(f, sim.y, x0, {}, &wdec);
    WaveformConfig cfg;
    cfg.max_iterations = 40;
    const WaveformRun run = run_waveform_relaxation(part, f.G, sim.y, x0, cfg, &wdec);
    CHECK(run.certified);
    CHECK(run.iteration_error.back() <= 1e-6);
    for (std::size_t k = 1; k < run.iteration_error.size(); ++k) {
      CHECK(run.iteration_error[k] <= run.iteration_error[k - 1] + 1e-9);
    }
    // stitched residuals equal the monolithic residual rows
    for (Index r = 0; r < part.count(); ++r) {
      const Matrix expect = part.restrict_output_rows(rdec.samples, r);
      CHECK((run.residuals[r].samples - expect).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("waveform relaxation is deterministic across schedules") {
  std::mt19937_64 rng(16);
  const auto net = fixture::block_network(rng, 4, 3, 0.1, true);
  const DescriptorSystem sys = plant(net.a, net.c);
  const Partition part(sys, net.regions);
  const DetectionFilter f = design_decentralized(part);
  const Vector x0 = oracle::random_matrix(rng, 12, 1);
  const auto sim = simulate(sys, scenario({0}, ramped_constant(0.3), 1.0, x0, 4.0, 1e-2));
  WaveformConfig par;
  par.max_iterations = 10;
  par.keep_iterates = true;
  WaveformConfig ser = par;
  ser.execution = Execution::serial;
  const auto a = run_waveform_relaxation(part, f.G, sim.y, x0, par);
  const auto b = run_waveform_relaxation(part, f.G, sim.y, x0, ser);
  const auto c = run_waveform_relaxation(part, f.G, sim.y, x0, par);
  CHECK(a.estimate.samples == b.estimate.samples);
  CHECK(a.estimate.samples == c.estimate.samples);
  CHECK(a.successive_change == b.successive_change);
  REQUIRE(a.iterates.size() == 10);
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    CHECK(a.iterates[k].samples == b.iterates[k].samples);
    CHECK(a.iterates[k].samples.col(0) == x0);
  }
}

TEST_CASE("waveform relaxation refuses an uncertified setup unless forced") {
  Matrix a(2, 2);
  a << -1, 1.5, 1.5, -1;
  Matrix c = Matrix::Identity(2, 2);
  const DescriptorSystem sys = plant(a, c);
  const Partition part(sys, {{0}, {1}});
  const Matrix g = Matrix::Zero(2, 2);
  Trajectory y("y", uniform_grid(1.0, 0.1), Matrix::Zero(2, 11));
  CHECK_THROWS_AS(run_waveform_relaxation(part, g, y, Vector::Zero(2)), DesignInfeasibleError);

  std::vector<std::string> warnings;
  log::set_sink([&](const std::string& m) { warnings.push_back(m); });
  WaveformConfig cfg;
  cfg.force = true;
  cfg.max_iterations = 2;
  const auto run = run_waveform_relaxation(part, g, y, Vector::Zero(2), cfg);
  log::reset_sink();
  CHECK_FALSE(run.certified);
  CHECK_FALSE(run.converged);
  CHECK(warnings.size() == 1);
  CHECK(run.iterations == 2);
}

TEST_CASE("waveform stops early when the tolerance is met") {
  std::mt19937_64 rng(18);
  const auto net = fixture::block_network(rng, 2, 2, 0.05);
  const DescriptorSystem sys = plant(net.a, net.c);
  const Partition part(sys, net.regions);
  const DetectionFilter f = design_decentralized(part);
  const Vector x0 = oracle::random_matrix(rng, 4, 1);
  const auto sim = simulate(sys, scenario({0}, SignalSpec{}, 0.0, x0, 3.0, 1e-2));
  WaveformConfig cfg;
  cfg.tolerance = 1e-10;
  const auto run = run_waveform_relaxation(part, f.G, sim.y, x0, cfg);
  CHECK(run.converged);
  CHECK(run.iterations < 100);
  CHECK(run.successive_change.back() < 1e-10);
}

TEST_CASE("distributed detection flags a measurement attack after onset") {
  std::mt19937_64 rng(19);
  const auto net = fixture::block_network(rng, 5, 4, 0.05, true);
  const DescriptorSystem sys = plant(net.a, net.c);
  const Partition part(sys, net.regions);
  // G = A C^T restricted to the regional blocks
  const Matrix g = sys.A() * sys.C().transpose();
  const DetectionFilter f = make_decentralized_filter(part, part.assemble_gain([&] {
    std::vector<Matrix> gs;
    for (Index r = 0; r < 5; ++r) gs.push_back(part.local_gain(g, r));
    return gs;
  }()));
  const Vector x0 = oracle::random_matrix(rng, 20, 1);
  SignalSpec sig;
  sig.kind = SignalKind::uniform_random;
  sig.low = 0.0;
  sig.high = 0.5;
  sig.hold = 0.5;
  std::vector<std::string> warnings;
  log::set_sink([&](const std::string& m) { warnings.push_back(m); });
  // measurement channel 1 of region 1 is attack index n + 0
  const auto sim = simulate(sys, scenario({20}, sig, 30.0, x0, 40.0, 1e-2));
  log::reset_sink();
  WaveformConfig cfg;
  cfg.max_iterations = 30;
  const auto run = run_waveform_relaxation(part, f.G, sim.y, x0, cfg);
  double pre = 0.0, post = 0.0;
  for (const auto& r : run.residuals) {
    for (Index k = 0; k < r.size(); ++k) {
      const double e = r.samples.col(k).squaredNorm();
      (r.times[k] < 30.0 ? pre : post) += e;
    }
  }
  CHECK(post >= 10 * pre);
  CHECK(post > 0.0);
}
