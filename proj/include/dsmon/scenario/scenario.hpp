#pragma once

#include "dsmon/core/descriptor_system.hpp"
#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/partition.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dsmon {

inline constexpr int kScenarioSchemaVersion = 1;

/// Settings for the monitors run on a scenario.
struct MonitorConfig {
  /// centralized | decentralized | distributed | identify | regional
  std::string mode = "centralized";
  /// Injection gain G (n x p). Empty means design one automatically.
  Matrix gain;
  double residual_factor = 1e-6;
  double regional_factor = 1e-3;
  int iterations = 100;
  Index cardinality = 1;
  Index sg_window = 7;
  Index sg_order = 3;
};

/// A complete, self-describing experiment: the plant in attack layout, an
/// optional partition, the attack, the simulation grid and the monitor setup.
struct Scenario {
  std::string name;
  std::map<std::string, std::string> metadata;
  Matrix E, A, C;
  std::vector<std::vector<Index>> partition;  ///< 0-based node lists; empty when absent
  AttackScenario attack;
  std::uint64_t seed = 1;
  MonitorConfig monitor;

  DescriptorSystem system() const { return DescriptorSystem::attack_model(E, A, C); }
  bool has_partition() const { return !partition.empty(); }
  Partition make_partition() const;
  /// Checks dimensions, cross references and the attack spec; throws ScenarioError.
  void validate() const;
};

/// Serializes to the JSON scenario format (1-based indices, inline matrices).
std::string scenario_to_json(const Scenario& s, int indent = 2);

/// Parses the JSON scenario format. Matrices may be given inline as rows or
/// as {"file": "path.csv"}, resolved relative to `base_dir`.
Scenario scenario_from_json(const std::string& text, const std::string& base_dir = ".");

void save_scenario(const std::string& path, const Scenario& s);
Scenario load_scenario(const std::string& path);

/// Field-by-field equality, matrices compared exactly.
bool structurally_equal(const Scenario& a, const Scenario& b);

/// Reads a numeric matrix from comma separated rows (blank lines and '#' comments skipped).
Matrix read_matrix_csv(const std::string& path);

/// A short description of the file format, printed on usage errors.
std::string scenario_schema_help();

}  // namespace dsmon
