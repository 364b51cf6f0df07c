#include "dsmon/scenario/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dsmon {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!names.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

std::uint64_t get_seed(const json& obj, const char* key, std::uint64_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

long long get_int(const json& obj, const char* key, long long fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<long long>();
}

std::vector<double> get_vector(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) fail(where, "expected a number or an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) fail(where, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& v, const std::string& where, const std::string& base_dir) {
  if (v.is_object()) {
    require_keys(v, where, {"file"});
    if (!v.contains("file") || !v.at("file").is_string()) fail(where, "file reference needs a string 'file'");
    std::filesystem::path path(v.at("file").get<std::string>());
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    return read_matrix_csv(path.string());
  }
  if (!v.is_array()) fail(where, "expected an array of rows or a file reference");
  const Index rows = static_cast<Index>(v.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = v.at(static_cast<std::size_t>(i));
    if (!row.is_array()) fail(where, "row " + std::to_string(i + 1) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols) fail(where, "ragged rows");
    for (Index j = 0; j < cols; ++j) {
      const json& x = row.at(static_cast<std::size_t>(j));
      if (!x.is_number()) fail(where, "non-numeric entry");
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

std::vector<long long> index_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of 1-based indices");
  std::vector<long long> out;
  for (const json& x : v) {
    if (!x.is_number_integer() || x.get<long long>() < 1) fail(where, "indices are positive integers");
    out.push_back(x.get<long long>());
  }
  return out;
}

json one_based(const std::vector<Index>& idx) {
  json out = json::array();
  for (Index i : idx) out.push_back(i + 1);
  return out;
}

json signal_to_json(const SignalSpec& s) {
  json levels = json::array();
  for (const auto& l : s.levels) levels.push_back(l);
  return json{{"kind", to_string(s.kind)}, {"value", s.value},       {"frequency", s.frequency},
              {"phase", s.phase},          {"low", s.low},           {"high", s.high},
              {"hold", s.hold},            {"ramp", s.ramp},         {"seed", s.seed},
              {"breakpoints", s.breakpoints}, {"levels", levels}};
}

SignalSpec signal_from_json(const json& v, const std::string& where) {
  require_keys(v, where, {"kind", "value", "frequency", "phase", "low", "high", "hold", "ramp", "seed",
                          "breakpoints", "levels"});
  SignalSpec s;
  if (v.contains("kind")) {
    if (!v.at("kind").is_string()) fail(where + ".kind", "expected a string");
    s.kind = signal_kind_from_string(v.at("kind").get<std::string>());
  }
  if (v.contains("value")) s.value = get_vector(v.at("value"), where + ".value");
  if (v.contains("frequency")) s.frequency = get_vector(v.at("frequency"), where + ".frequency");
  if (v.contains("phase")) s.phase = get_vector(v.at("phase"), where + ".phase");
  s.low = get_number(v, "low", s.low, where);
  s.high = get_number(v, "high", s.high, where);
  s.hold = get_number(v, "hold", s.hold, where);
  s.ramp = get_number(v, "ramp", s.ramp, where);
  s.seed = get_seed(v, "seed", s.seed, where);
  if (v.contains("breakpoints")) s.breakpoints = get_vector(v.at("breakpoints"), where + ".breakpoints");
  if (v.contains("levels")) {
    if (!v.at("levels").is_array()) fail(where + ".levels", "expected an array");
    for (const json& l : v.at("levels")) s.levels.push_back(get_vector(l, where + ".levels"));
  }
  return s;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_signal(const SignalSpec& a, const SignalSpec& b) {
  return a.kind == b.kind && a.value == b.value && a.frequency == b.frequency && a.phase == b.phase &&
         a.low == b.low && a.high == b.high && a.hold == b.hold && a.ramp == b.ramp &&
         a.seed == b.seed && a.breakpoints == b.breakpoints && a.levels == b.levels;
}

}  // namespace

Partition Scenario::make_partition() const {
  const DescriptorSystem sys = system();
  if (!has_partition()) return Partition::single(sys);
  return Partition(sys, partition);
}

void Scenario::validate() const {
  const Index n = A.rows();
  if (n == 0 || A.cols() != n) throw ScenarioError("A must be square and non-empty");
  if (E.rows() != n || E.cols() != n) throw ScenarioError("E must have the size of A");
  if (C.cols() != n) throw ScenarioError("C must have one column per state");
  if (has_partition()) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (const auto& region : partition) {
      if (region.empty()) throw ScenarioError("partition has an empty region");
      for (Index v : region) {
        if (v < 0 || v >= n) throw ScenarioError("partition node " + std::to_string(v + 1) + " out of range");
        if (seen[static_cast<std::size_t>(v)]++) {
          throw ScenarioError("partition node " + std::to_string(v + 1) + " listed twice");
        }
      }
    }
    for (Index v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)]) {
        throw ScenarioError("partition misses node " + std::to_string(v + 1));
      }
    }
    try {
      (void)make_partition();
    } catch (const Error& err) {
      throw ScenarioError(std::string("partition: ") + err.what());
    }
  }
  if (attack.x0.size() != n) throw ScenarioError("x0 must have one entry per state");
  try {
    attack.validate(system());
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& err) {
    throw ScenarioError(std::string("attack: ") + err.what());
  }
  if (monitor.gain.size() > 0 && (monitor.gain.rows() != n || monitor.gain.cols() != C.rows())) {
    throw ScenarioError("monitor gain must be n x p");
  }
  static const std::set<std::string> modes{"centralized", "decentralized", "distributed", "identify",
                                           "regional"};
  if (!modes.count(monitor.mode)) throw ScenarioError("unknown monitor mode '" + monitor.mode + "'");
  if (monitor.iterations < 1) throw ScenarioError("monitor iterations must be positive");
  if (monitor.cardinality < 0) throw ScenarioError("monitor cardinality must be non-negative");
  if (monitor.sg_order < 1 || monitor.sg_window < monitor.sg_order + 1) {
    throw ScenarioError("differentiator needs order >= 1 and window > order");
  }
}

std::string scenario_to_json(const Scenario& s, int indent) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["name"] = s.name;
  doc["metadata"] = s.metadata;
  doc["system"] = {{"E", matrix_to_json(s.E)}, {"A", matrix_to_json(s.A)}, {"C", matrix_to_json(s.C)}};
  if (s.has_partition()) {
    json regions = json::array();
    for (const auto& r : s.partition) regions.push_back(one_based(r));
    doc["partition"] = regions;
  }
  doc["attack"] = {{"set", one_based(s.attack.attack_set.indices())},
                   {"start_time", s.attack.start_time},
                   {"signal", signal_to_json(s.attack.signal)}};
  json sim = {{"horizon", s.attack.horizon}, {"dt", s.attack.dt}, {"seed", s.seed},
              {"x0", std::vector<double>(s.attack.x0.data(), s.attack.x0.data() + s.attack.x0.size())}};
  if (s.attack.noise) {
    sim["noise"] = {{"state_cov", matrix_to_json(s.attack.noise->state_cov)},
                    {"output_cov", matrix_to_json(s.attack.noise->output_cov)},
                    {"seed", s.attack.noise->seed}};
  }
  doc["simulation"] = sim;
  doc["monitor"] = {{"mode", s.monitor.mode},
                    {"gain", s.monitor.gain.size() == 0 ? json("auto") : matrix_to_json(s.monitor.gain)},
                    {"residual_factor", s.monitor.residual_factor},
                    {"regional_factor", s.monitor.regional_factor},
                    {"iterations", s.monitor.iterations},
                    {"cardinality", s.monitor.cardinality},
                    {"sg_window", s.monitor.sg_window},
                    {"sg_order", s.monitor.sg_order}};
  return doc.dump(indent) + "\n";
}

Scenario scenario_from_json(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + err.what());
  }
  require_keys(doc, "scenario",
               {"schema_version", "name", "metadata", "system", "partition", "attack", "simulation", "monitor"});
  if (!doc.contains("schema_version")) fail("scenario", "missing schema_version");
  const long long version = get_int(doc, "schema_version", 0, "scenario");
  if (version != kScenarioSchemaVersion) {
    fail("scenario", "unsupported schema_version " + std::to_string(version) + " (expected " +
                         std::to_string(kScenarioSchemaVersion) + ")");
  }
  Scenario s;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("name", "expected a string");
    s.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("metadata")) {
    const json& meta = doc.at("metadata");
    if (!meta.is_object()) fail("metadata", "expected an object");
    for (const auto& [key, value] : meta.items()) {
      if (!value.is_string()) fail("metadata." + key, "expected a string");
      s.metadata[key] = value.get<std::string>();
    }
  }

  if (!doc.contains("system")) fail("scenario", "missing system");
  const json& sys = doc.at("system");
  require_keys(sys, "system", {"E", "A", "C"});
  if (!sys.contains("A") || !sys.contains("C")) fail("system", "A and C are required");
  s.A = matrix_from_json(sys.at("A"), "system.A", base_dir);
  s.C = matrix_from_json(sys.at("C"), "system.C", base_dir);
  if (!sys.contains("E") || (sys.at("E").is_string() && sys.at("E").get<std::string>() == "identity")) {
    s.E = Matrix::Identity(s.A.rows(), s.A.rows());
  } else {
    s.E = matrix_from_json(sys.at("E"), "system.E", base_dir);
  }

  if (doc.contains("partition")) {
    const json& part = doc.at("partition");
    if (!part.is_array()) fail("partition", "expected an array of regions");
    for (const json& region : part) {
      std::vector<Index> nodes;
      for (long long v : index_list(region, "partition")) nodes.push_back(static_cast<Index>(v - 1));
      s.partition.push_back(nodes);
    }
  }

  if (doc.contains("attack")) {
    const json& att = doc.at("attack");
    require_keys(att, "attack", {"set", "start_time", "signal"});
    if (att.contains("set")) s.attack.attack_set = AttackSet::from_one_based(index_list(att.at("set"), "attack.set"));
    s.attack.start_time = get_number(att, "start_time", 0.0, "attack");
    if (att.contains("signal")) s.attack.signal = signal_from_json(att.at("signal"), "attack.signal");
  }

  s.attack.x0 = Vector::Zero(s.A.rows());
  if (doc.contains("simulation")) {
    const json& sim = doc.at("simulation");
    require_keys(sim, "simulation", {"horizon", "dt", "seed", "x0", "noise"});
    s.attack.horizon = get_number(sim, "horizon", s.attack.horizon, "simulation");
    s.attack.dt = get_number(sim, "dt", s.attack.dt, "simulation");
    s.seed = get_seed(sim, "seed", s.seed, "simulation");
    if (sim.contains("x0")) {
      const auto x0 = get_vector(sim.at("x0"), "simulation.x0");
      s.attack.x0 = x0.size() == 1 && s.A.rows() != 1 ? Vector::Constant(s.A.rows(), x0[0])
                                                       : Vector(Eigen::Map<const Vector>(x0.data(), static_cast<Index>(x0.size())));
    }
    if (sim.contains("noise")) {
      const json& nz = sim.at("noise");
      require_keys(nz, "simulation.noise", {"state_cov", "output_cov", "seed"});
      NoiseSpec noise;
      if (!nz.contains("state_cov") || !nz.contains("output_cov")) {
        fail("simulation.noise", "state_cov and output_cov are required");
      }
      noise.state_cov = matrix_from_json(nz.at("state_cov"), "simulation.noise.state_cov", base_dir);
      noise.output_cov = matrix_from_json(nz.at("output_cov"), "simulation.noise.output_cov", base_dir);
      noise.seed = get_seed(nz, "seed", noise.seed, "simulation.noise");
      s.attack.noise = noise;
    }
  }

  if (doc.contains("monitor")) {
    const json& mon = doc.at("monitor");
    require_keys(mon, "monitor", {"mode", "gain", "residual_factor", "regional_factor", "iterations",
                                  "cardinality", "sg_window", "sg_order"});
    if (mon.contains("mode")) {
      if (!mon.at("mode").is_string()) fail("monitor.mode", "expected a string");
      s.monitor.mode = mon.at("mode").get<std::string>();
    }
    if (mon.contains("gain") && !(mon.at("gain").is_string() && mon.at("gain").get<std::string>() == "auto")) {
      s.monitor.gain = matrix_from_json(mon.at("gain"), "monitor.gain", base_dir);
    }
    s.monitor.residual_factor = get_number(mon, "residual_factor", s.monitor.residual_factor, "monitor");
    s.monitor.regional_factor = get_number(mon, "regional_factor", s.monitor.regional_factor, "monitor");
    s.monitor.iterations = static_cast<int>(get_int(mon, "iterations", s.monitor.iterations, "monitor"));
    s.monitor.cardinality = static_cast<Index>(get_int(mon, "cardinality", s.monitor.cardinality, "monitor"));
    s.monitor.sg_window = static_cast<Index>(get_int(mon, "sg_window", s.monitor.sg_window, "monitor"));
    s.monitor.sg_order = static_cast<Index>(get_int(mon, "sg_order", s.monitor.sg_order, "monitor"));
  }
  s.validate();
  return s;
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
  out << scenario_to_json(s);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  return scenario_from_json(text.str(), base.empty() ? "." : base.string());
}

bool structurally_equal(const Scenario& a, const Scenario& b) {
  const auto same_noise = [](const std::optional<NoiseSpec>& x, const std::optional<NoiseSpec>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return same_matrix(x->state_cov, y->state_cov) && same_matrix(x->output_cov, y->output_cov) &&
           x->seed == y->seed;
  };
  return a.name == b.name && a.metadata == b.metadata && same_matrix(a.E, b.E) && same_matrix(a.A, b.A) &&
         same_matrix(a.C, b.C) && a.partition == b.partition &&
         a.attack.attack_set == b.attack.attack_set && same_signal(a.attack.signal, b.attack.signal) &&
         a.attack.start_time == b.attack.start_time && same_matrix(a.attack.x0, b.attack.x0) &&
         a.attack.horizon == b.attack.horizon && a.attack.dt == b.attack.dt &&
         same_noise(a.attack.noise, b.attack.noise) && a.seed == b.seed &&
         a.monitor.mode == b.monitor.mode && same_matrix(a.monitor.gain, b.monitor.gain) &&
         a.monitor.residual_factor == b.monitor.residual_factor &&
         a.monitor.regional_factor == b.monitor.regional_factor &&
         a.monitor.iterations == b.monitor.iterations && a.monitor.cardinality == b.monitor.cardinality &&
         a.monitor.sg_window == b.monitor.sg_window && a.monitor.sg_order == b.monitor.sg_order;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ScenarioError("matrix file '" + path + "': bad entry '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ScenarioError("matrix file '" + path + "': ragged rows");
    }
    rows.push_back(row);
  }
  Matrix m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

std::string scenario_schema_help() {
  return R"(Scenario files are JSON objects (schema_version 1):
  schema_version  1 (required)
  name, metadata  string, object of strings
  system          {"E": M | "identity", "A": M, "C": M}; M is an array of rows
                  or {"file": "matrix.csv"} relative to the scenario file
  partition       optional array of regions, each an array of 1-based nodes
  attack          {"set": [1-based channels], "start_time": t,
                   "signal": {"kind": zero|constant|sinusoid|uniform_random|
                              smooth_random|piecewise, "value", "frequency",
                              "phase", "low", "high", "hold", "ramp", "seed",
                              "breakpoints", "levels"}}
                  channels 1..n are state equations, n+1..n+p measurements
  simulation      {"horizon": T, "dt": h, "seed": s, "x0": [..],
                   "noise": {"state_cov": M, "output_cov": M, "seed": s}}
  monitor         {"mode": centralized|decentralized|distributed|identify|
                   regional, "gain": "auto" | M, "residual_factor",
                   "regional_factor", "iterations", "cardinality",
                   "sg_window", "sg_order"}
)";
}

}  // namespace dsmon
