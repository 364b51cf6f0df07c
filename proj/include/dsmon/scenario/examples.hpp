#pragma once

#include "dsmon/scenario/scenario.hpp"

#include <string>
#include <vector>

namespace dsmon {

/// The 8-node consensus network with coupling parameter eps, measured nodes
/// {2,4,7} and a constant attack on node 3.
Scenario consensus8_scenario(double eps = 1e-4);

/// Two areas of 8 nodes, each with the two-rhombus topology of the 8-node
/// network, joined by the links 3-9 and 4-10. Nodes {2,5,7,12,13,15} are
/// measured and node 3 is attacked. Edge weights are drawn from `seed` and
/// normalized so that A = W - I with W row stochastic. Seeds whose weights
/// are not generic enough are skipped; the accepted seed is recorded in the
/// metadata.
Scenario tworegion16_scenario(std::uint64_t seed = 1);

/// A ring of `regions` blocks with `size` nodes each. Every block is stable,
/// measures nodes {1, 2, size} and reads one unmeasured node of each ring
/// neighbour with weight of order `coupling`. Seeds are advanced until the
/// decentralized gain A_D C^T is admissible and passes the small-gain
/// certificate; the accepted seed is recorded in the metadata.
Scenario ring_scenario(Index regions, Index size, double coupling, std::uint64_t seed);

/// Dispatch by name: "consensus8", "tworegion16" or "ring". Parameters not
/// used by the example are ignored.
struct ExampleParams {
  double epsilon = 1e-4;
  Index regions = 5;
  Index size = 4;
  double coupling = 0.05;
  std::uint64_t seed = 7;
};
Scenario generate_example(const std::string& name, const ExampleParams& params = {});

std::vector<std::string> example_names();

}  // namespace dsmon
