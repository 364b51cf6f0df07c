#include <doctest.h>

#include "dsmon/core/simulate.hpp"
#include "dsmon/regional/cooperative.hpp"
#include "dsmon/regional/differentiation.hpp"
#include "dsmon/regional/limitations.hpp"
#include "dsmon/regional/reconstruction.hpp"
#include "dsmon/scenario/examples.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <sstream>

using namespace dsmon;

namespace {

struct Chain {
  DescriptorSystem sys;
  Partition part;
};

Chain chain() {
  const auto net = fixture::regional_chain();
  const Index n = net.a.rows();
  DescriptorSystem sys = DescriptorSystem::attack_model(Matrix::Identity(n, n), net.a, net.c);
  Partition part(sys, net.regions);
  return {sys, part};
}

AttackScenario sinusoid_attack(const AttackSet& k, Index n, double dt = 1e-3) {
  AttackScenario sc;
  sc.attack_set = k;
  sc.signal.kind = SignalKind::sinusoid;
  sc.signal.value = {1.0};
  sc.signal.frequency = {0.3};
  sc.signal.ramp = 1.0;
  sc.start_time = 0.5;
  sc.x0 = Vector::Constant(n, 0.3);
  sc.horizon = 8.0;
  sc.dt = dt;
  return sc;
}

SimulationResult simulate_semi_explicit(const fixture::SemiExplicit& s, double horizon, double dt) {
  const DescriptorSystem sys(s.e, s.a, s.b, s.c, s.d);
  const Index m = s.b.cols();
  const Signal u = [m](double t) {
    Vector v(m);
    for (Index i = 0; i < m; ++i) v(i) = std::sin((0.7 + 0.3 * static_cast<double>(i)) * t + 0.4 * static_cast<double>(i));
    return v;
  };
  // consistent start: x2 solves the constraint for x1(0) and u(0)
  Vector x0 = Vector::Zero(s.n1 + s.n2);
  x0.head(s.n1).setConstant(0.5);
  const Matrix a21 = s.a.bottomLeftCorner(s.n2, s.n1);
  const Matrix a22 = s.a.bottomRightCorner(s.n2, s.n2);
  x0.tail(s.n2) = -a22.fullPivLu().solve(a21 * x0.head(s.n1) + s.b.bottomRows(s.n2) * u(0.0));
  return simulate_input(sys, u, uniform_grid(horizon, dt), x0);
}

PartitionedModel split(const fixture::SemiExplicit& s) {
  PartitionedModel m;
  m.A11 = s.a.topLeftCorner(s.n1, s.n1);
  m.A12 = s.a.topRightCorner(s.n1, s.n2);
  m.A21 = s.a.bottomLeftCorner(s.n2, s.n1);
  m.A22 = s.a.bottomRightCorner(s.n2, s.n2);
  m.B1 = s.b.topRows(s.n1);
  m.B2 = s.b.bottomRows(s.n2);
  m.C1 = s.c.leftCols(s.n1);
  m.C2 = s.c.rightCols(s.n2);
  m.D = s.d;
  return m;
}

double projected_error(const Subspace& v, const Matrix& truth, const Matrix& estimate) {
  return (v.residual_projector() * truth - estimate).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("smoothing differentiator is exact on cubics") {
  std::vector<double> t;
  for (int k = 0; k <= 40; ++k) t.push_back(0.05 * k);
  Matrix y(1, static_cast<Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = t[k];
    y(0, static_cast<Index>(k)) = 1.0 - 2.0 * s + 0.5 * s * s + 0.25 * s * s * s;
  }
  const auto d = smooth_derivatives(t, y, 3);
  REQUIRE(d.size() == 4);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double s = t[k];
    const auto c = static_cast<Index>(k);
    CHECK(d[0](0, c) == doctest::Approx(y(0, c)).epsilon(1e-9));
    CHECK(d[1](0, c) == doctest::Approx(-2.0 + s + 0.75 * s * s).epsilon(1e-8));
    CHECK(d[2](0, c) == doctest::Approx(1.0 + 1.5 * s).epsilon(1e-7));
    CHECK(d[3](0, c) == doctest::Approx(1.5).epsilon(1e-6));
  }
}

TEST_CASE("smoothing differentiator tracks a sinusoid") {
  const auto t = uniform_grid(3.0, 1e-2);
  Matrix y(2, static_cast<Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) {
    y(0, static_cast<Index>(k)) = std::sin(t[k]);
    y(1, static_cast<Index>(k)) = std::cos(2.0 * t[k]);
  }
  const auto d = smooth_derivatives(t, y, 2);
  double e1 = 0.0, e2 = 0.0, interior = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto c = static_cast<Index>(k);
    const double err = std::max(std::abs(d[1](0, c) - std::cos(t[k])),
                                std::abs(d[1](1, c) + 2.0 * std::sin(2.0 * t[k])));
    e1 = std::max(e1, err);
    if (k >= 3 && k + 3 < t.size()) interior = std::max(interior, err);
    e2 = std::max(e2, std::abs(d[2](0, c) + std::sin(t[k])));
  }
  CHECK(interior < 1e-6);
  CHECK(e1 < 1e-4);
  CHECK(e2 < 1e-3);
}

TEST_CASE("smoothing differentiator rejects unresolvable requests") {
  const auto t = uniform_grid(1.0, 0.1);
  const Matrix y = Matrix::Ones(1, static_cast<Index>(t.size()));
  CHECK_THROWS_AS(smooth_derivatives(t, y, 4), ResolutionError);
  const std::vector<double> shorter(t.begin(), t.begin() + 5);
  CHECK_THROWS_AS(smooth_derivatives(shorter, Matrix::Ones(1, 5), 1), ResolutionError);
}

TEST_CASE("reconstruction without unknown inputs loses exactly the unobservable part") {
  std::mt19937_64 rng(21);
  fixture::SemiExplicit s = fixture::random_semi_explicit(rng, 4, 2, 0, 1);
  // x1 = (observable pair, unobservable pair); no path from x1 into the constraint
  s.a.block(0, 2, 2, 2).setZero();
  s.a.block(4, 0, 2, 4).setZero();
  s.c.block(0, 2, 1, 2).setZero();
  s.a = fixture::stabilized(s.e, s.a);
  const auto sim = simulate_semi_explicit(s, 4.0, 1e-3);
  const PartitionedModel m = split(s);
  const Reconstruction rec = reconstruct_states(m, sim.y);

  Matrix obs(4, 4);
  for (Index k = 0; k < 4; ++k) obs.row(k) = m.C1 * m.A11.pow(static_cast<double>(k));
  const Subspace unobservable = Subspace::span(oracle::lu_kernel(obs));
  CHECK(unobservable.dim() == 2);
  CHECK(approx_equal(rec.V1, unobservable, 1e-7));
  CHECK(projected_error(rec.V1, sim.x.samples.topRows(4), rec.x1.samples) <= 1e-4);
  CHECK(projected_error(rec.V2, sim.x.samples.bottomRows(2), rec.x2.samples) <= 1e-4);
}

TEST_CASE("reconstruction with C1 = 0 and A21 = 0 recovers nothing of x1") {
  std::mt19937_64 rng(22);
  fixture::SemiExplicit s = fixture::random_semi_explicit(rng, 3, 2, 1, 2);
  s.c.leftCols(3).setZero();
  s.a.bottomLeftCorner(2, 3).setZero();
  const auto sim = simulate_semi_explicit(s, 2.0, 1e-3);
  const Reconstruction rec = reconstruct_states(split(s), sim.y);
  CHECK(rec.V1.is_whole());
  CHECK(rec.x1.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reconstruction of a four-state system with one algebraic constraint") {
  std::mt19937_64 rng(23);
  const fixture::SemiExplicit s = fixture::random_semi_explicit(rng, 3, 1, 1, 2);
  const auto sim = simulate_semi_explicit(s, 5.0, 1e-3);
  const Reconstruction rec = reconstruct_states(split(s), sim.y);
  CHECK(rec.V1.dim() == 0);
  CHECK(projected_error(rec.V1, sim.x.samples.topRows(3), rec.x1.samples) <= 1e-3);
  CHECK(projected_error(rec.V2, sim.x.samples.bottomRows(1), rec.x2.samples) <= 1e-3);
}

TEST_CASE("SVD partition reproduces the descriptor system") {
  std::mt19937_64 rng(24);
  const auto p = fixture::random_index_one(rng, 5, 3);
  const Matrix b = oracle::random_matrix(rng, 5, 2);
  const Matrix c = oracle::random_matrix(rng, 3, 5);
  const Matrix d = Matrix::Zero(3, 2);
  const PartitionedRealization r = partition_by_svd(p.e, p.a, b, c, d);
  CHECK((r.V.transpose() * r.V - Matrix::Identity(5, 5)).norm() <= 1e-12);
  CHECK(r.model.n1() == 3);
  CHECK(r.model.n2() == 2);
  // C V = [C1 C2]
  Matrix cv(3, 5);
  cv << r.model.C1, r.model.C2;
  CHECK((c * r.V - cv).norm() <= 1e-10);
}

TEST_CASE("decoupled limitations: boundary attack and an interior attack") {
  const Scenario s = tworegion16_scenario();
  const Partition part = s.make_partition();
  const RegionModel r1 = region_model(part, 0);
  const AttackSet global = s.attack.attack_set;
  const AttackSet local = local_attack_set(part, 0, global);
  CHECK(local == AttackSet({2}));
  const LimitationReport rep = check_decoupled_limitations(r1, local, 1e5, &part, global);
  CHECK(rep[5].fires);
  CHECK_FALSE(rep.decoupled_detectable());
  CHECK_FALSE(rep.decoupled_identifiable());

  const Chain c = chain();
  const RegionModel c0 = region_model(c.part, 0);
  const LimitationReport interior = check_decoupled_limitations(c0, AttackSet({1}), 1e5, &c.part, AttackSet({1}));
  CHECK(interior[3].fires);
  CHECK_FALSE(interior[5].fires);
  CHECK(interior.decoupled_detectable());
  // the attack sits in region 1, so region 2 sees only external channels
  const LimitationReport outside =
      check_decoupled_limitations(region_model(c.part, 1), AttackSet(), 1e5, &c.part, AttackSet({1}));
  CHECK(outside[6].fires);
}

TEST_CASE("zero dynamics check compresses dependent input columns") {
  const Matrix e = Matrix::Identity(2, 2);
  Matrix a(2, 2);
  a << -1, 0.5, 0.2, -2;
  Matrix b(2, 2);
  b << 1, 2, 0, 0;
  const Matrix c = (Matrix(1, 2) << 0, 1).finished();
  // one independent input into two states read through a single sensor: relative degree one, no zeros
  CHECK_FALSE(has_zero_dynamics(e, a, b, c, Matrix::Zero(1, 2)));
  const Matrix c2 = (Matrix(1, 2) << 1, 0).finished();
  // the input reaches the sensor directly and x2 is left as a stable zero
  CHECK(has_zero_dynamics(e, a, b, c2, Matrix::Zero(1, 2)));
}

TEST_CASE("no attack: every region is safe by C1") {
  const Chain c = chain();
  const auto sim = simulate(c.sys, sinusoid_attack(AttackSet(), c.sys.n()));
  const RegionalVerdict v = cooperative_round(c.part, region_models(c.part), sim.y, Vector::Constant(c.sys.n(), 0.3));
  CHECK(v.suspect.empty());
  CHECK(v.safe.size() == 3);
  for (Index i = 0; i < 3; ++i) CHECK(v.criterion[static_cast<std::size_t>(i)] == SafetyCriterion::c1);
}

TEST_CASE("attack inside region 1: region 2 is cleared by C2, region 3 by C1") {
  const Chain c = chain();
  const AttackScenario sc = sinusoid_attack(AttackSet({0}), c.sys.n());
  const auto sim = simulate(c.sys, sc);
  const RegionalVerdict v = cooperative_round(c.part, region_models(c.part), sim.y, sc.x0);
  CHECK(v.suspect == std::vector<Index>{0});
  CHECK_FALSE(v.zero[0]);
  CHECK_FALSE(v.zero[1]);
  CHECK(v.criterion[1] == SafetyCriterion::c2);
  CHECK(v.criterion[2] == SafetyCriterion::c1);
}

TEST_CASE("out-neighbour residuals of an attacked region are all zero or all nonzero") {
  const Chain c = chain();
  const auto models = region_models(c.part);
  for (Index node = 0; node < 10; ++node) {
    const AttackScenario sc = sinusoid_attack(AttackSet({node}), c.sys.n());
    const auto sim = simulate(c.sys, sc);
    const RegionalVerdict v = cooperative_round(c.part, models, sim.y, sc.x0);
    const Index attacked = c.part.region_of_node(node);
    CAPTURE(node);
    CHECK_FALSE(v.zero[static_cast<std::size_t>(attacked)]);
    std::size_t zeros = 0;
    const auto outs = c.part.out_neighbors(attacked);
    for (Index j : outs) zeros += v.zero[static_cast<std::size_t>(j)] ? 1 : 0;
    CHECK((zeros == 0 || zeros == outs.size()));
    CHECK(std::find(v.suspect.begin(), v.suspect.end(), attacked) != v.suspect.end());
  }
}

TEST_CASE("message log is deterministic and identical for serial and parallel runs") {
  const Chain c = chain();
  const AttackScenario sc = sinusoid_attack(AttackSet({0}), c.sys.n());
  const auto sim = simulate(c.sys, sc);
  const auto models = region_models(c.part);
  RegionalOptions serial, parallel;
  serial.execution = Execution::serial;
  parallel.execution = Execution::parallel;
  const RegionalVerdict a = cooperative_round(c.part, models, sim.y, sc.x0, serial);
  const RegionalVerdict b = cooperative_round(c.part, models, sim.y, sc.x0, parallel);
  std::ostringstream la, lb;
  a.messages.write(la);
  b.messages.write(lb);
  CHECK(la.str() == lb.str());
  CHECK(a.max_residual == b.max_residual);
  CHECK(a.suspect == b.suspect);

  // two directed links each way: estimate + uncertainty in round 1, one flag back in round 2
  const auto entries = a.messages.entries();
  CHECK(entries.size() == 12);
  std::size_t round1 = 0, round2 = 0;
  for (const Message& m : entries) (m.round == 1 ? round1 : round2) += 1;
  CHECK(round1 == 8);
  CHECK(round2 == 4);
  CHECK(std::is_sorted(entries.begin(), entries.end(), [](const Message& x, const Message& y) {
    return std::tie(x.round, x.sender, x.receiver) < std::tie(y.round, y.sender, y.receiver);
  }));
  CHECK(la.str().rfind("round,sender,receiver,payload_kind,bytes\n", 0) == 0);
}

TEST_CASE("regions misflagged by a wrong neighbour estimate are explained by it") {
  const Chain c = chain();
  // node 8 of region 2 is measured but interior: its estimate goes wrong and both neighbours hear it
  const AttackScenario sc = sinusoid_attack(AttackSet({7}), c.sys.n());
  const auto sim = simulate(c.sys, sc);
  const RegionalIdentification id = identify_regional(c.part, sim.y, sc.x0, 1);
  CHECK(id.verdict.suspect == std::vector<Index>{0, 1, 2});
  const auto models = region_models(c.part);
  for (const LocalIdentification& li : id.locals) {
    CAPTURE(li.region);
    REQUIRE(li.local_set.has_value());
    if (li.region == 1) {
      CHECK(*li.global_set == AttackSet({7}));
      CHECK_FALSE(li.explained_by.has_value());
    } else {
      // the neighbour's error enters through the boundary node it feeds
      CHECK(models[static_cast<std::size_t>(li.region)].on_boundary(*li.local_set));
      CHECK(li.explained_by == std::optional<Index>(1));
    }
  }
  CHECK(id.identified == AttackSet({7}));
}

TEST_CASE("filter counts of the regional search") {
  const Chain c = chain();
  CHECK(regional_filter_count(c.part, 1) == doctest::Approx(3 * 8));
  CHECK(regional_filter_count(c.part, 2) == doctest::Approx(3 * 28));
  const AttackScenario sc = sinusoid_attack(AttackSet({0}), c.sys.n());
  const auto sim = simulate(c.sys, sc);
  const RegionalIdentification id = identify_regional(c.part, sim.y, sc.x0, 1);
  // one suspect region, candidates of size at most one over its 5 + 3 channels
  CHECK(id.filters == doctest::Approx(1 + 8));
  CHECK(id.centralized_filters == doctest::Approx(15 + 9));
  CHECK(id.identified == AttackSet({0}));
}

TEST_CASE("two-area network: a boundary attack is identified cooperatively") {
  const Scenario s = tworegion16_scenario();
  const Partition part = s.make_partition();
  const auto sim = simulate(s.system(), s.attack);
  const RegionalIdentification id = identify_regional(part, sim.y, s.attack.x0, 1);
  CHECK(id.verdict.suspect == std::vector<Index>{0});
  CHECK(id.verdict.criterion[1] == SafetyCriterion::c1);
  CHECK(id.identified == AttackSet::from_one_based({3}));
}

TEST_CASE("ring with two corrupted regions at distance two") {
  const Scenario s = ring_scenario(5, 4, 0.05, 7);
  const Partition part = s.make_partition();
  AttackScenario sc = sinusoid_attack(AttackSet({2, 10}), s.A.rows());
  const auto sim = simulate(s.system(), sc);
  const RegionalIdentification id = identify_regional(part, sim.y, sc.x0, 1);
  const auto& suspect = id.verdict.suspect;
  CHECK(std::find(suspect.begin(), suspect.end(), 0) != suspect.end());
  CHECK(std::find(suspect.begin(), suspect.end(), 2) != suspect.end());
  CHECK(id.identified == AttackSet({2, 10}));
}

TEST_CASE("hypothesis with zero dynamics makes the region unclassifiable") {
  const Chain c = chain();
  const auto sim = simulate(c.sys, sinusoid_attack(AttackSet(), c.sys.n()));
  RegionalOptions opts;
  opts.hypotheses.assign(3, std::nullopt);
  // every state and sensor of region 1 at once cannot be zero-free
  std::vector<Index> all;
  for (Index k = 0; k < 8; ++k) all.push_back(k);
  opts.hypotheses[0] = AttackSet(all);
  const RegionalVerdict v = cooperative_round(c.part, region_models(c.part), sim.y, Vector::Constant(c.sys.n(), 0.3), opts);
  CHECK(v.unclassifiable == std::vector<Index>{0});
  CHECK(std::find(v.suspect.begin(), v.suspect.end(), 0) != v.suspect.end());
  CHECK_FALSE(v.reasons[0].empty());
}
