#include "dsmon/core/simulate.hpp"
#include "dsmon/detection/certify.hpp"
#include "dsmon/detection/detection_filter.hpp"
#include "dsmon/detection/waveform.hpp"
#include "dsmon/identification/identify.hpp"
#include "dsmon/identification/l1_example.hpp"
#include "dsmon/regional/cooperative.hpp"
#include "dsmon/regional/limitations.hpp"
#include "dsmon/scenario/examples.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dsmon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerdict = 2;

struct CommonOptions {
  std::string scenario = "-";
  std::string out_dir = ".";
  std::optional<double> horizon;
  std::optional<double> dt;
  std::string attack_set;
};

// Text report echoed to stdout and saved as report.txt in the output directory.
class Report {
 public:
  template <typename... Args>
  void line(const Args&... args) {
    ((text_ << args), ...);
    text_ << '\n';
  }
  void finish(const std::string& out_dir) const {
    std::cout << text_.str();
    std::ofstream f(std::filesystem::path(out_dir) / "report.txt");
    if (!f) throw Error("cannot write report to '" + out_dir + "'");
    f << text_.str();
  }

 private:
  std::ostringstream text_;
};

std::string path_in(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

std::string join(const std::vector<Index>& v, bool one_based = true) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i] + (one_based ? 1 : 0));
  }
  return out;
}

Scenario read_scenario(const CommonOptions& o) {
  Scenario s;
  if (o.scenario == "-") {
    std::ostringstream text;
    text << std::cin.rdbuf();
    s = scenario_from_json(text.str());
  } else {
    s = load_scenario(o.scenario);
  }
  if (o.horizon) s.attack.horizon = *o.horizon;
  if (o.dt) s.attack.dt = *o.dt;
  if (!o.attack_set.empty()) s.attack.attack_set = AttackSet::parse(o.attack_set);
  s.validate();
  std::filesystem::create_directories(o.out_dir);
  return s;
}

// One region per line (1-based nodes separated by commas or spaces), or a
// JSON array of arrays.
std::vector<std::vector<Index>> read_partition_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open partition file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::string body = text.str();
  std::vector<std::vector<Index>> regions;
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& err) {
      throw ScenarioError(std::string("partition file: ") + err.what());
    }
    for (const auto& region : doc) {
      std::vector<Index> nodes;
      for (const auto& v : region) nodes.push_back(v.get<Index>() - 1);
      regions.push_back(nodes);
    }
    return regions;
  }
  std::istringstream lines(body);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#') continue;
    const AttackSet nodes = AttackSet::parse(line);
    regions.push_back(nodes.indices());
  }
  return regions;
}

Partition resolve_partition(Scenario& s, const std::string& partition_file) {
  if (!partition_file.empty()) {
    s.partition = read_partition_file(partition_file);
    s.validate();
  }
  if (!s.has_partition()) throw ScenarioError("this command needs a partition (scenario or --partition)");
  return s.make_partition();
}

NumericPolicy policy_for(const Scenario& s) {
  NumericPolicy policy;
  policy.residual_factor = s.monitor.residual_factor;
  policy.seed = s.seed;
  return policy;
}

SimulationResult run_simulation(const Scenario& s, const NumericPolicy& policy) {
  return simulate(s.system(), s.attack, policy);
}

Trajectory measurements(const Scenario& s, const std::string& file, const NumericPolicy& policy) {
  if (!file.empty()) return read_csv_file(file);
  return run_simulation(s, policy).y;
}

// Block-diagonal gain: the scenario's, else A_D C^T when it is admissible and
// certified, else a per-region pole placement.
Matrix distributed_gain(const Scenario& s, const Partition& part, const NumericPolicy& policy,
                        std::string& origin) {
  if (s.monitor.gain.size() > 0) {
    origin = "scenario";
    return s.monitor.gain;
  }
  std::vector<Matrix> local;
  for (Index r = 0; r < part.count(); ++r) local.push_back(part.local_A(r) * part.local_C(r).transpose());
  const Matrix g = part.assemble_gain(local);
  try {
    (void)make_decentralized_filter(part, g, policy);
    if (certify_small_gain(part, g).passed) {
      origin = "A_D C^T";
      return g;
    }
  } catch (const DesignInfeasibleError&) {
  }
  origin = "pole placement";
  return design_decentralized(part, policy).G;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool attack = true) {
  cmd->add_option("-s,--scenario", o.scenario, "scenario JSON file, '-' for stdin")->capture_default_str();
  cmd->add_option("-o,--out-dir", o.out_dir, "directory for CSV artifacts and report.txt")->capture_default_str();
  cmd->add_option("--horizon", o.horizon, "override the simulation horizon T");
  cmd->add_option("--dt", o.dt, "override the simulation step");
  if (attack) cmd->add_option("--attack-set", o.attack_set, "override the attack set, e.g. 3 or 3,9 (1-based)");
}

int cmd_example(const std::string& name, const ExampleParams& params, const std::string& out) {
  const Scenario s = generate_example(name, params);
  if (out.empty() || out == "-") {
    std::cout << scenario_to_json(s);
  } else {
    save_scenario(out, s);
    std::cerr << "wrote " << out << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const CommonOptions& o) {
  const Scenario s = read_scenario(o);
  const NumericPolicy policy = policy_for(s);
  const SimulationResult sim = run_simulation(s, policy);
  write_csv(path_in(o.out_dir, "x.csv"), sim.x);
  write_csv(path_in(o.out_dir, "y.csv"), sim.y);
  write_csv(path_in(o.out_dir, "u.csv"), sim.u);
  Report rep;
  rep.line("scenario: ", s.name.empty() ? "(unnamed)" : s.name);
  rep.line("states: ", s.A.rows(), ", measurements: ", s.C.rows());
  rep.line("attack set: ", s.attack.attack_set.to_string(), " (", to_string(s.attack.signal.kind), ", onset ",
           format_double(s.attack.start_time), ")");
  rep.line("grid: T = ", format_double(s.attack.horizon), ", dt = ", format_double(s.attack.dt), ", ",
           sim.y.size(), " samples");
  rep.line("max |x|: ", format_double(sim.x.sup_norm()), ", max |y|: ", format_double(sim.y.sup_norm()));
  rep.line("artifacts: x.csv y.csv u.csv");
  rep.finish(o.out_dir);
  return kExitOk;
}

int cmd_detect(const CommonOptions& o, const std::string& data) {
  const Scenario s = read_scenario(o);
  const NumericPolicy policy = policy_for(s);
  const DescriptorSystem sys = s.system();
  const Trajectory y = measurements(s, data, policy);
  const DetectionFilter filter = s.monitor.gain.size() > 0 ? make_detection_filter(sys, s.monitor.gain, policy)
                                                           : design_centralized(sys, nullptr, policy);
  Trajectory w;
  const Trajectory r = run_detector(filter, y, s.attack.x0, policy, &w);
  const DetectionVerdict v = detection_verdict(r, y, policy);
  write_csv(path_in(o.out_dir, "residual.csv"), r);
  write_csv(path_in(o.out_dir, "w.csv"), w);
  if (data.empty()) write_csv(path_in(o.out_dir, "y.csv"), y);
  Report rep;
  rep.line("centralized detection filter on ", s.name.empty() ? "(unnamed)" : s.name);
  rep.line("injection gain: ", s.monitor.gain.size() > 0 ? "scenario" : "designed");
  rep.line("max |r|: ", format_double(v.max_residual));
  rep.line("threshold: ", format_double(v.threshold));
  rep.line("verdict: ", v.attack ? "attack detected" : "no attack detected");
  rep.line("artifacts: residual.csv w.csv", data.empty() ? " y.csv" : "");
  rep.finish(o.out_dir);
  return v.attack ? kExitVerdict : kExitOk;
}

int cmd_detect_distributed(const CommonOptions& o, const std::string& partition_file,
                           std::optional<int> iterations, bool certify_only, const std::string& data) {
  Scenario s = read_scenario(o);
  const NumericPolicy policy = policy_for(s);
  const Partition part = resolve_partition(s, partition_file);
  std::string origin;
  const Matrix g = distributed_gain(s, part, policy, origin);
  const CertificateReport cert = certify_small_gain(part, g);
  Report rep;
  rep.line("distributed detection on ", s.name.empty() ? "(unnamed)" : s.name, " with ", part.count(), " regions");
  rep.line("gain: ", origin);
  rep.line("small-gain certificate: max rho = ", format_double(cert.max_rho), " at omega = ",
           format_double(cert.argmax_omega), ", ", cert.passed ? "passed" : "failed");
  if (certify_only) {
    rep.finish(o.out_dir);
    return cert.passed ? kExitOk : kExitError;
  }
  const Trajectory y = measurements(s, data, policy);
  const DetectionFilter dec = make_decentralized_filter(part, g, policy);
  Trajectory w_dec;
  (void)run_detector(dec, y, s.attack.x0, policy, &w_dec);
  WaveformConfig cfg;
  cfg.max_iterations = iterations.value_or(s.monitor.iterations);
  const WaveformRun run = run_waveform_relaxation(part, g, y, s.attack.x0, cfg, &w_dec, policy);

  std::ofstream conv(path_in(o.out_dir, "convergence.csv"));
  conv << "k,error\n";
  for (std::size_t k = 0; k < run.iteration_error.size(); ++k) {
    conv << (k + 1) << ',' << format_double(run.iteration_error[k]) << '\n';
  }
  write_csv(path_in(o.out_dir, "estimate.csv"), run.estimate);
  bool attack = false;
  rep.line("iterations: ", run.iterations, ", final error against the monolithic filter: ",
           run.iteration_error.empty() ? "n/a" : format_double(run.iteration_error.back()));
  for (Index i = 0; i < part.count(); ++i) {
    const Trajectory& r = run.residuals[static_cast<std::size_t>(i)];
    const Trajectory yi("y", y.times, part.restrict_output_rows(y.samples, i));
    const DetectionVerdict v = detection_verdict(r, yi, policy);
    attack = attack || v.attack;
    write_csv(path_in(o.out_dir, "residual_region" + std::to_string(i + 1) + ".csv"), r);
    rep.line("region ", i + 1, ": max |r| = ", format_double(v.max_residual), ", threshold ",
             format_double(v.threshold), v.attack ? ", attack detected" : ", clean");
  }
  rep.line("verdict: ", attack ? "attack detected" : "no attack detected");
  rep.line("artifacts: convergence.csv estimate.csv residual_region<i>.csv");
  rep.finish(o.out_dir);
  return attack ? kExitVerdict : kExitOk;
}

int cmd_identify(const CommonOptions& o, std::optional<Index> k, bool up_to, const std::string& data) {
  const Scenario s = read_scenario(o);
  const NumericPolicy policy = policy_for(s);
  const DescriptorSystem sys = s.system();
  const Trajectory y = measurements(s, data, policy);
  IdentifyOptions opts;
  opts.mode = up_to ? CardinalityMode::up_to : CardinalityMode::exact;
  const Index card = k.value_or(s.monitor.cardinality);
  const IdentificationVerdict v = identify(sys, y, s.attack.x0, card, opts, policy);

  std::ofstream csv(path_in(o.out_dir, "candidates.csv"));
  csv << "set,max_residual,zero,feasible\n";
  for (const CandidateResult& c : v.candidates) {
    csv << quoted(c.set.to_string()) << ',' << (c.feasible ? format_double(c.max_residual) : "nan") << ','
        << (c.zero ? 1 : 0) << ',' << (c.feasible ? 1 : 0) << '\n';
  }
  Report rep;
  rep.line("identification over ", v.candidates.size(), " candidates with |K| ", up_to ? "<= " : "= ", card);
  rep.line("threshold: ", format_double(v.threshold));
  std::size_t infeasible = 0;
  for (const CandidateResult& c : v.candidates) infeasible += c.feasible ? 0 : 1;
  if (infeasible) rep.line("candidates without a filter: ", infeasible);
  bool attack = true;
  if (v.conclusive()) {
    std::string sets;
    for (const AttackSet& a : v.identified) {
      sets += (sets.empty() ? "" : " ") + a.to_string();
      if (a.empty()) attack = false;
    }
    rep.line("zero-residual sets of minimal size: ", sets);
    if (v.identified.size() > 1) rep.line("intersection of all zero-residual sets: ", v.intersection.to_string());
  } else {
    rep.line("no candidate explains the measurements");
  }
  rep.line("verdict: ", attack ? (v.conclusive() ? "attack identified" : "attack detected, not identified")
                               : "no attack");
  rep.line("artifacts: candidates.csv");
  rep.finish(o.out_dir);
  return attack ? kExitVerdict : kExitOk;
}

const char* criterion_name(SafetyCriterion c) {
  switch (c) {
    case SafetyCriterion::c1: return "C1";
    case SafetyCriterion::c2: return "C2";
    case SafetyCriterion::none: return "-";
  }
  return "-";
}

int cmd_identify_regional(const CommonOptions& o, const std::string& partition_file, std::optional<Index> k,
                          const std::string& messages, const std::string& data) {
  Scenario s = read_scenario(o);
  NumericPolicy policy = policy_for(s);
  const Partition part = resolve_partition(s, partition_file);
  const Trajectory y = measurements(s, data, policy);
  RegionalOptions opts;
  opts.residual_factor = s.monitor.regional_factor;
  opts.sg.window = s.monitor.sg_window;
  opts.sg.order = s.monitor.sg_order;
  const Index card = k.value_or(s.monitor.cardinality);
  const RegionalIdentification id = identify_regional(part, y, s.attack.x0, card, opts, policy);
  const RegionalVerdict& v = id.verdict;

  std::ofstream msg(messages.empty() ? path_in(o.out_dir, "messages.csv") : messages);
  if (!msg) throw Error("cannot write the message log");
  v.messages.write(msg);
  std::ofstream csv(path_in(o.out_dir, "regions.csv"));
  csv << "region,max_residual,threshold,zero,criterion,status,local_set\n";
  Report rep;
  rep.line("cooperative identification on ", s.name.empty() ? "(unnamed)" : s.name, " with ", part.count(),
           " regions");
  for (Index i = 0; i < part.count(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const bool suspect = std::find(v.suspect.begin(), v.suspect.end(), i) != v.suspect.end();
    std::string local = "";
    for (const LocalIdentification& li : id.locals) {
      if (li.region == i && li.global_set) local = li.global_set->to_string();
    }
    csv << (i + 1) << ',' << format_double(v.max_residual[u]) << ',' << format_double(v.threshold[u]) << ','
        << (v.zero[u] ? 1 : 0) << ',' << criterion_name(v.criterion[u]) << ','
        << (suspect ? "suspect" : "safe") << ',' << quoted(local) << '\n';
    if (v.residuals[u].size() > 0) {
      write_csv(path_in(o.out_dir, "residual_region" + std::to_string(i + 1) + ".csv"), v.residuals[u]);
    }
    std::string line = "region " + std::to_string(i + 1) + ": max |r| = " + format_double(v.max_residual[u]) +
                       ", " + (suspect ? "suspect" : std::string("safe by ") + criterion_name(v.criterion[u]));
    if (!v.reasons[u].empty()) line += " (" + v.reasons[u] + ")";
    rep.line(line);
  }
  for (const LocalIdentification& li : id.locals) {
    std::string line = "local identification in region " + std::to_string(li.region + 1) + ": ";
    if (!li.global_set) {
      line += "inconclusive";
    } else {
      line += li.global_set->to_string();
      if (li.explained_by) line += ", explained by region " + std::to_string(*li.explained_by + 1);
    }
    rep.line(line);
  }
  rep.line("filters: ", format_double(id.filters), " regional against ", format_double(id.centralized_filters),
           " centralized");
  rep.line("messages: ", v.messages.size());
  const bool attack = !v.suspect.empty();
  rep.line("identified attack set: ", id.identified.to_string());
  rep.line("verdict: ", attack ? "attack detected" : "no attack detected");
  rep.line("artifacts: regions.csv messages.csv residual_region<i>.csv");
  rep.finish(o.out_dir);
  return attack ? kExitVerdict : kExitOk;
}

int cmd_check_partition(const CommonOptions& o, const std::string& partition_file) {
  Scenario s = read_scenario(o);
  const NumericPolicy policy = policy_for(s);
  const Partition part = resolve_partition(s, partition_file);
  Report rep;
  rep.line("partition of ", s.name.empty() ? "(unnamed)" : s.name, ": ", part.count(), " regions");
  std::ofstream csv(path_in(o.out_dir, "partition.csv"));
  csv << "region,nodes,outputs,boundary,in_neighbors,out_neighbors\n";
  for (Index i = 0; i < part.count(); ++i) {
    std::vector<Index> in = part.in_neighbors(i), out = part.out_neighbors(i);
    csv << (i + 1) << ',' << quoted(join(part.nodes(i))) << ',' << quoted(join(part.outputs(i))) << ','
        << quoted(join(part.boundary_nodes(i))) << ',' << quoted(join(in)) << ',' << quoted(join(out)) << '\n';
    rep.line("region ", i + 1, ": nodes {", join(part.nodes(i)), "}, measurements {", join(part.outputs(i)),
             "}, boundary {", join(part.boundary_nodes(i)), "}, reads from {", join(in), "}");
  }
  std::string origin;
  try {
    const Matrix g = distributed_gain(s, part, policy, origin);
    const CertificateReport cert = certify_small_gain(part, g);
    rep.line("small-gain certificate with ", origin, " gain: max rho = ", format_double(cert.max_rho), ", ",
             cert.passed ? "passed" : "failed");
  } catch (const DesignInfeasibleError& err) {
    rep.line("no decentralized detection filter: ", err.what());
  }
  const AttackSet global = s.attack.attack_set;
  if (!global.empty()) {
    rep.line("decoupled limitations for attack set ", global.to_string(), ":");
    for (Index i = 0; i < part.count(); ++i) {
      const RegionModel m = region_model(part, i);
      const LimitationReport lr =
          check_decoupled_limitations(m, local_attack_set(part, i, global), 1e5, &part, global, policy);
      std::string fired;
      for (const LimitationItem& item : lr.items) {
        if (item.fires) fired += (fired.empty() ? "" : ", ") + item.name;
      }
      rep.line("  region ", i + 1, ": ", fired.empty() ? "none" : fired);
      for (const LimitationItem& item : lr.items) {
        if (item.fires) rep.line("    ", item.name, ": ", item.conclusion);
      }
    }
  }
  rep.line("artifacts: partition.csv");
  rep.finish(o.out_dir);
  return kExitOk;
}

int cmd_l1_demo(double epsilon, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const L1Report r = l1_counterexample(epsilon);
  write_csv(path_in(out_dir, "u_bar.csv"), r.u_bar);
  write_csv(path_in(out_dir, "y_k.csv"), r.y_k);
  write_csv(path_in(out_dir, "y_kbar.csv"), r.y_kbar);
  Report rep;
  rep.line("equivalent attack on {2,4,7} for u = 1 on {3}, epsilon = ", format_double(epsilon));
  rep.line("max |u_bar_i|: ", format_double(r.max_abs[0]), ", ", format_double(r.max_abs[1]), ", ",
           format_double(r.max_abs[2]));
  rep.line("output match: ", format_double(r.output_match));
  rep.line("max ||u_bar||_1, ||u_bar||_2, ||u_bar||_inf: ", format_double(r.max_norm[0]), ", ",
           format_double(r.max_norm[1]), ", ", format_double(r.max_norm[2]));
  rep.line("bound 1/3 ", r.bound_satisfied ? "satisfied" : "violated");
  rep.line("artifacts: u_bar.csv y_k.csv y_kbar.csv");
  rep.finish(out_dir);
  return r.bound_satisfied ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attack detection and identification for descriptor systems"};
  app.require_subcommand(1);

  std::string example_name, example_out;
  ExampleParams params;
  auto* example = app.add_subcommand("example", "write a built-in scenario as JSON");
  example->add_option("name", example_name, "consensus8 | tworegion16 | ring")->required();
  example->add_option("--epsilon", params.epsilon, "consensus8 coupling")->capture_default_str();
  example->add_option("--regions", params.regions, "ring regions")->capture_default_str();
  example->add_option("--size", params.size, "ring nodes per region")->capture_default_str();
  example->add_option("--coupling", params.coupling, "ring coupling strength")->capture_default_str();
  example->add_option("--seed", params.seed, "generator seed")->capture_default_str();
  example->add_option("-o,--out", example_out, "output file (stdout when omitted)");

  CommonOptions sim_opts;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate a scenario and write x, y and u");
  add_common(simulate_cmd, sim_opts);

  CommonOptions det_opts;
  std::string det_data;
  auto* detect = app.add_subcommand("detect", "centralized detection filter");
  add_common(detect, det_opts);
  detect->add_option("--measurements", det_data, "measurement CSV instead of simulating");

  CommonOptions dist_opts;
  std::string dist_partition, dist_data;
  std::optional<int> dist_iterations;
  bool certify_only = false;
  auto* distributed = app.add_subcommand("detect-distributed", "waveform-relaxation detection filter");
  add_common(distributed, dist_opts);
  distributed->add_option("--partition", dist_partition, "partition file (one region per line, 1-based)");
  distributed->add_option("--iterations", dist_iterations, "waveform iterations k");
  distributed->add_flag("--certify-only", certify_only, "only evaluate the small-gain certificate");
  distributed->add_option("--measurements", dist_data, "measurement CSV instead of simulating");

  CommonOptions id_opts;
  std::optional<Index> id_k;
  bool up_to = false;
  std::string id_data;
  auto* ident = app.add_subcommand("identify", "centralized attack identification");
  add_common(ident, id_opts);
  ident->add_option("-k,--cardinality", id_k, "candidate attack size");
  ident->add_flag("--up-to", up_to, "search every size up to k");
  ident->add_option("--measurements", id_data, "measurement CSV instead of simulating");

  CommonOptions reg_opts;
  std::string reg_partition, reg_messages, reg_data;
  std::optional<Index> reg_k;
  auto* regional = app.add_subcommand("identify-regional", "cooperative regional identification");
  add_common(regional, reg_opts);
  regional->add_option("--partition", reg_partition, "partition file (one region per line, 1-based)");
  regional->add_option("-k,--cardinality", reg_k, "local attack size bound");
  regional->add_option("--messages", reg_messages, "message log CSV (default <out-dir>/messages.csv)");
  regional->add_option("--measurements", reg_data, "measurement CSV instead of simulating");

  CommonOptions part_opts;
  std::string part_file;
  auto* check = app.add_subcommand("check-partition", "report regions, boundaries, certificate and limitations");
  add_common(check, part_opts);
  check->add_option("--partition", part_file, "partition file (one region per line, 1-based)");

  double l1_eps = 1e-4;
  std::string l1_out = ".";
  auto* l1 = app.add_subcommand("l1-demo", "equivalent attack with smaller amplitude on a larger set");
  l1->add_option("--epsilon", l1_eps, "consensus8 coupling")->capture_default_str();
  l1->add_option("-o,--out-dir", l1_out, "directory for CSV artifacts")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) {
      std::cerr << '\n' << scenario_schema_help();
      return kExitError;
    }
    return kExitOk;
  }

  try {
    if (example->parsed()) return cmd_example(example_name, params, example_out);
    if (simulate_cmd->parsed()) return cmd_simulate(sim_opts);
    if (detect->parsed()) return cmd_detect(det_opts, det_data);
    if (distributed->parsed()) {
      return cmd_detect_distributed(dist_opts, dist_partition, dist_iterations, certify_only, dist_data);
    }
    if (ident->parsed()) return cmd_identify(id_opts, id_k, up_to, id_data);
    if (regional->parsed()) return cmd_identify_regional(reg_opts, reg_partition, reg_k, reg_messages, reg_data);
    if (check->parsed()) return cmd_check_partition(part_opts, part_file);
    if (l1->parsed()) return cmd_l1_demo(l1_eps, l1_out);
  } catch (const ScenarioError& err) {
    std::cerr << "error: " << err.what() << "\n\n" << scenario_schema_help();
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
