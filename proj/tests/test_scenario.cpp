#include <doctest.h>

#include "dsmon/detection/certify.hpp"
#include "dsmon/scenario/examples.hpp"
#include "dsmon/scenario/scenario.hpp"
#include "support/fixtures.hpp"

#include <filesystem>
#include <fstream>

using namespace dsmon;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "dsmon_test_scenario";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string minimal_json(const std::string& extra = "") {
  return R"({"schema_version": 1, "system": {"A": [[-1, 0], [0, -2]], "C": [[1, 1]]})" + extra + "}";
}

}  // namespace

TEST_CASE("consensus8 reproduces the printed matrix") {
  const Scenario s = consensus8_scenario();
  const Matrix expect = fixture::consensus_a(1e-4);
  CHECK(s.A == expect);
  CHECK(s.A(0, 0) == -0.8);
  CHECK(s.A(0, 1) == 0.1);
  CHECK(s.A(0, 3) == 0.2);
  CHECK(s.A(0, 4) == 0.5);
  CHECK(s.C == fixture::consensus_c());
  CHECK(s.E == Matrix::Identity(8, 8));
  CHECK(s.attack.attack_set == AttackSet::from_one_based({3}));
  const Scenario other = consensus8_scenario(1e-2);
  CHECK(other.A == fixture::consensus_a(1e-2));
}

TEST_CASE("tworegion16 follows the two-area topology") {
  const Scenario s = tworegion16_scenario();
  CHECK(s.A.rows() == 16);
  CHECK(s.A.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
  for (Index i = 0; i < 16; ++i) CHECK(s.A(i, i) < 0.0);
  const Partition part = s.make_partition();
  CHECK(part.count() == 2);
  // only the links 3-9 and 4-10 cross the areas
  const Matrix ac = part.coupling_part(s.A);
  for (Index i = 0; i < 16; ++i) {
    for (Index j = 0; j < 16; ++j) {
      const bool link = (i == 2 && j == 8) || (i == 8 && j == 2) || (i == 3 && j == 9) || (i == 9 && j == 3);
      CHECK((ac(i, j) != 0.0) == link);
    }
  }
  CHECK(part.boundary_nodes(0) == std::vector<Index>{2, 3});
  CHECK(part.boundary_nodes(1) == std::vector<Index>{8, 9});
  std::vector<Index> measured;
  for (Index r = 0; r < s.C.rows(); ++r) {
    Index col;
    s.C.row(r).maxCoeff(&col);
    measured.push_back(col + 1);
  }
  CHECK(measured == std::vector<Index>{2, 5, 7, 12, 13, 15});
  CHECK(s.metadata.count("weights") == 1);
  CHECK(s.metadata.at("accepted_seed") == "1");
}

TEST_CASE("ring with one region has no coupling") {
  const Scenario s = ring_scenario(1, 6, 0.3, 3);
  const Partition part = s.make_partition();
  CHECK(part.count() == 1);
  CHECK(part.coupling_part(s.A).isZero(0.0));
}

TEST_CASE("ring(5, 4, 0.05, 7) passes the small-gain certificate with G = A_D C^T") {
  const Scenario s = ring_scenario(5, 4, 0.05, 7);
  CHECK(s.metadata.at("accepted_seed") == "7");
  const Partition part = s.make_partition();
  CHECK(part.count() == 5);
  const Matrix g = part.diagonal_part(s.A) * s.C.transpose();
  CHECK(certify_small_gain(part, g).passed);
  for (Index r = 0; r < 5; ++r) {
    CHECK(part.in_neighbors(r).size() == 2);
    CHECK(part.outputs(r).size() == 3);
  }
}

TEST_CASE("generated examples survive a save and load round trip") {
  const auto dir = scratch_dir();
  for (const std::string& name : example_names()) {
    CAPTURE(name);
    const Scenario s = generate_example(name);
    const auto path = (dir / (name + ".json")).string();
    save_scenario(path, s);
    const Scenario back = load_scenario(path);
    CHECK(structurally_equal(s, back));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
  }
}

TEST_CASE("noise and explicit gains round trip") {
  Scenario s = ring_scenario(2, 3, 0.1, 4);
  NoiseSpec noise;
  noise.state_cov = 1e-3 * Matrix::Identity(6, 6);
  noise.output_cov = 1e-4 * Matrix::Identity(s.C.rows(), s.C.rows());
  noise.seed = 99;
  s.attack.noise = noise;
  s.monitor.gain = s.make_partition().diagonal_part(s.A) * s.C.transpose();
  s.attack.signal.kind = SignalKind::piecewise;
  s.attack.signal.breakpoints = {0.0, 1.0};
  s.attack.signal.levels = {{0.0}, {0.25}};
  s.attack.attack_set = AttackSet({1});
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(structurally_equal(s, back));
}

TEST_CASE("generators are deterministic in their seed") {
  CHECK(structurally_equal(ring_scenario(3, 4, 0.05, 11), ring_scenario(3, 4, 0.05, 11)));
  CHECK_FALSE(structurally_equal(ring_scenario(3, 4, 0.05, 11), ring_scenario(3, 4, 0.05, 12)));
  CHECK(structurally_equal(tworegion16_scenario(5), tworegion16_scenario(5)));
}

TEST_CASE("matrices may be given by file reference") {
  const auto dir = scratch_dir();
  {
    std::ofstream out(dir / "a.csv");
    out << "# state matrix\n-1, 0.5\n0, -2\n";
  }
  const std::string text =
      R"({"schema_version": 1, "system": {"E": "identity", "A": {"file": "a.csv"}, "C": [[1, 0]]}})";
  const Scenario s = scenario_from_json(text, dir.string());
  CHECK(s.A(0, 1) == 0.5);
  CHECK(s.A(1, 1) == -2.0);
  CHECK(s.E == Matrix::Identity(2, 2));
}

TEST_CASE("schema violations are rejected") {
  CHECK_NOTHROW(scenario_from_json(minimal_json()));
  CHECK_THROWS_AS(scenario_from_json(R"({"system": {"A": [[-1]], "C": [[1]]}})"), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(R"({"schema_version": 2, "system": {"A": [[-1]], "C": [[1]]}})"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "colour": "red")")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "partition": [[1], [1]])")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "partition": [[1]])")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "attack": {"set": [4]})")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "attack": {"signal": {"kind": "square"}})")),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "monitor": {"mode": "psychic"})")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(minimal_json(R"(, "simulation": {"x0": [1, 2, 3]})")), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json(R"({"schema_version": 1, "system": {"A": [[-1, 0], [0]], "C": [[1, 1]]}})"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json("not json"), ScenarioError);
  CHECK_THROWS_AS(generate_example("pentagon"), ScenarioError);
  CHECK_THROWS_AS(ring_scenario(0, 4, 0.1, 1), ScenarioError);
}
