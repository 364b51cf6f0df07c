#include "dsmon/scenario/examples.hpp"

#include "dsmon/detection/certify.hpp"
#include "dsmon/detection/detection_filter.hpp"
#include "dsmon/identification/l1_example.hpp"
#include "dsmon/regional/limitations.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <utility>

namespace dsmon {

namespace {

// Undirected edges of the two-rhombus graph underlying the 8-node network.
constexpr std::array<std::pair<int, int>, 12> kRhombusEdges{{{1, 2}, {1, 4}, {1, 5}, {2, 3}, {2, 6}, {3, 4},
                                                             {3, 7}, {4, 8}, {5, 6}, {5, 8}, {6, 7}, {7, 8}}};

Vector random_state(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

Matrix tworegion16_weights(std::uint64_t seed) {
  const Index n = 16;
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : kRhombusEdges) {
    edges.emplace_back(a, b);
    edges.emplace_back(a + 8, b + 8);
  }
  edges.emplace_back(3, 9);
  edges.emplace_back(4, 10);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(0.5, 1.5);
  Matrix weights = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) weights(i, i) = w(rng);
  for (const auto& [a, b] : edges) {
    weights(a - 1, b - 1) = w(rng);
    weights(b - 1, a - 1) = w(rng);
  }
  for (Index i = 0; i < n; ++i) weights.row(i) /= weights.row(i).sum();
  return weights - Matrix::Identity(n, n);
}

// Full reconstruction in both areas and pairwise zero-freeness of the
// attack on node 3 against every other single channel of area 1.
bool tworegion16_generic(const Scenario& s) {
  const Partition part = s.make_partition();
  for (Index i = 0; i < part.count(); ++i) {
    const RegionModel m = region_model(part, i);
    if (has_zero_dynamics(m.E, m.A, m.Bb, m.C, Matrix::Zero(m.p(), m.Bb.cols()))) return false;
  }
  const RegionModel m = region_model(part, 0);
  const AttackSet k({2});
  for (Index r = 0; r < m.channels(); ++r) {
    if (r == 2) continue;
    const AttackSet both = k.set_union(AttackSet({r}));
    if (has_zero_dynamics(m.E, m.A, m.B_of(both), m.C, m.D_of(both))) return false;
  }
  return true;
}

struct RingBlocks {
  Matrix a, c;
  std::vector<std::vector<Index>> regions;
};

RingBlocks ring_blocks(Index regions, Index size, double coupling, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.5);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::bernoulli_distribution sign(0.5);
  std::vector<Index> measured{0};
  if (size > 1) measured.push_back(1);
  if (size > 2) measured.push_back(size - 1);
  Index read = 0;
  for (Index v = 0; v < size; ++v) {
    if (std::find(measured.begin(), measured.end(), v) == measured.end()) {
      read = v;
      break;
    }
  }
  const Index n = regions * size;
  RingBlocks out;
  out.a = Matrix::Zero(n, n);
  out.c = Matrix::Zero(regions * static_cast<Index>(measured.size()), n);
  Index row = 0;
  for (Index r = 0; r < regions; ++r) {
    const Index o = r * size;
    for (Index i = 0; i < size; ++i)
      for (Index j = 0; j < size; ++j) out.a(o + i, o + j) = nd(rng);
    out.a.block(o, o, size, size) -= 2.0 * Matrix::Identity(size, size);
    for (Index v : measured) out.c(row++, o + v) = 1.0;
    std::vector<Index> nodes;
    for (Index i = 0; i < size; ++i) nodes.push_back(o + i);
    out.regions.push_back(nodes);
  }
  if (regions > 1) {
    for (Index r = 0; r < regions; ++r) {
      const Index prev = (r + regions - 1) % regions;
      const Index next = (r + 1) % regions;
      const double wp = coupling * mag(rng) * (sign(rng) ? 1.0 : -1.0);
      const double wn = coupling * mag(rng) * (sign(rng) ? 1.0 : -1.0);
      out.a(r * size, prev * size + read) += wp;
      out.a(r * size + size - 1, next * size + read) += wn;
    }
  }
  return out;
}

bool ring_certified(const Scenario& s) {
  const Partition part = s.make_partition();
  std::vector<Matrix> gains;
  for (Index r = 0; r < part.count(); ++r) gains.push_back(part.local_A(r) * part.local_C(r).transpose());
  const Matrix g = part.assemble_gain(gains);
  try {
    (void)make_decentralized_filter(part, g);
  } catch (const DesignInfeasibleError&) {
    return false;
  }
  return certify_small_gain(part, g).passed;
}

}  // namespace

Scenario consensus8_scenario(double eps) {
  if (!(eps > 0.0)) throw ScenarioError("consensus8 needs epsilon > 0");
  Scenario s;
  s.name = "consensus8";
  s.metadata["epsilon"] = format_double(eps);
  s.metadata["description"] = "8-node consensus network, measured nodes {2,4,7}, attacked node {3}";
  s.A = consensus8_matrix(eps);
  s.E = Matrix::Identity(8, 8);
  s.C = consensus8_output();
  s.attack.attack_set = AttackSet::from_one_based({3});
  s.attack.signal.kind = SignalKind::constant;
  s.attack.signal.value = {1.0};
  s.attack.start_time = 0.0;
  s.attack.x0 = Vector::Zero(8);
  s.attack.horizon = 20.0;
  s.attack.dt = 1e-2;
  s.monitor.mode = "identify";
  s.validate();
  return s;
}

Scenario tworegion16_scenario(std::uint64_t seed) {
  Scenario s;
  s.name = "tworegion16";
  s.E = Matrix::Identity(16, 16);
  s.C = Matrix::Zero(6, 16);
  const std::array<int, 6> measured{2, 5, 7, 12, 13, 15};
  for (std::size_t k = 0; k < measured.size(); ++k) s.C(static_cast<Index>(k), measured[k] - 1) = 1.0;
  s.partition = {{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 12, 13, 14, 15}};
  s.attack.attack_set = AttackSet::from_one_based({3});
  s.attack.signal.kind = SignalKind::sinusoid;
  s.attack.signal.value = {1.0};
  s.attack.signal.frequency = {0.2};
  s.attack.signal.ramp = 1.0;
  s.attack.start_time = 1.0;
  s.attack.horizon = 10.0;
  s.attack.dt = 1e-3;
  s.monitor.mode = "regional";
  std::uint64_t accepted = seed;
  for (int tries = 0;; ++tries, ++accepted) {
    if (tries == 100) throw ScenarioError("tworegion16: no generic weights found from seed " + std::to_string(seed));
    s.A = tworegion16_weights(accepted);
    if (tworegion16_generic(s)) break;
  }
  std::mt19937_64 rng(accepted);
  s.attack.x0 = random_state(rng, 16);
  s.seed = accepted;
  s.metadata["description"] =
      "two 8-node areas with the two-rhombus topology, links 3-9 and 4-10, measured nodes "
      "{2,5,7,12,13,15}, attacked node {3}";
  s.metadata["weights"] =
      "not part of the published example; self and edge weights drawn uniformly in [0.5, 1.5], "
      "rows normalized to sum one, A = W - I";
  s.metadata["requested_seed"] = std::to_string(seed);
  s.metadata["accepted_seed"] = std::to_string(accepted);
  s.validate();
  return s;
}

Scenario ring_scenario(Index regions, Index size, double coupling, std::uint64_t seed) {
  if (regions < 1 || size < 1) throw ScenarioError("ring needs at least one region of at least one node");
  if (!(coupling >= 0.0)) throw ScenarioError("ring coupling must be non-negative");
  Scenario s;
  s.name = "ring";
  std::uint64_t accepted = seed;
  for (int tries = 0;; ++tries, ++accepted) {
    if (tries == 100) throw ScenarioError("ring: no certified network found from seed " + std::to_string(seed));
    RingBlocks blocks = ring_blocks(regions, size, coupling, accepted);
    s.A = std::move(blocks.a);
    s.C = std::move(blocks.c);
    s.E = Matrix::Identity(s.A.rows(), s.A.rows());
    s.partition = std::move(blocks.regions);
    if (ring_certified(s)) break;
  }
  std::mt19937_64 rng(accepted ^ 0x5eedULL);
  s.attack.x0 = random_state(rng, s.A.rows());
  s.attack.horizon = 50.0;
  s.attack.dt = 1e-2;
  s.seed = accepted;
  s.monitor.mode = "distributed";
  s.metadata["description"] = "ring of " + std::to_string(regions) + " regions with " + std::to_string(size) +
                              " nodes each, coupling " + format_double(coupling);
  s.metadata["gain"] = "decentralized A_D C^T, small-gain certified";
  s.metadata["requested_seed"] = std::to_string(seed);
  s.metadata["accepted_seed"] = std::to_string(accepted);
  s.validate();
  return s;
}

Scenario generate_example(const std::string& name, const ExampleParams& params) {
  if (name == "consensus8") return consensus8_scenario(params.epsilon);
  if (name == "tworegion16") return tworegion16_scenario(params.seed);
  if (name == "ring") return ring_scenario(params.regions, params.size, params.coupling, params.seed);
  throw ScenarioError("unknown example '" + name + "' (expected consensus8, tworegion16 or ring)");
}

std::vector<std::string> example_names() { return {"consensus8", "tworegion16", "ring"}; }

}  // namespace dsmon
