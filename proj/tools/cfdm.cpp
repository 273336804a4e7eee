#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfdm/cfd.hpp"
#include "cfdm/conflict.hpp"
#include "cfdm/discovery.hpp"
#include "cfdm/generator.hpp"
#include "cfdm/relation.hpp"
#include "cfdm/rng.hpp"
#include "cfdm/sampling.hpp"
#include "cfdm/tuning.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cfdm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

/// Configuration problems found before any stage runs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stage that started and then failed.
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& why)
      : std::runtime_error("stage " + stage + " failed: " + why) {}
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("no such file: " + path);
}

NullPolicy make_policy(const std::string& markers) {
  if (markers == "\x01") return {};
  NullPolicy policy;
  policy.markers.clear();
  std::istringstream ss(markers);
  std::string item;
  while (std::getline(ss, item, ',')) policy.markers.insert(item);
  policy.markers.insert("");
  return policy;
}

double minutes_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
             .count() /
         60.0;
}

void write_rules(const std::string& path,
                 const std::vector<std::pair<CFD, std::uint64_t>>& rules,
                 const std::string& annotation) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [cfd, count] : rules)
    out << format_cfd(cfd) << "  # " << annotation << ": " << count << "\n";
}

std::vector<CFD> read_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<CFD> rules;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r'))
      line.pop_back();
    if (line.empty()) continue;
    rules.push_back(parse_cfd(line));
  }
  return rules;
}

json groups_to_json(const Schema& schema, const SampleGroups& groups,
                    std::uint64_t source_tuples) {
  json j;
  j["attributes"] = schema.attributes;
  j["q"] = groups.q;
  j["source_tuples"] = source_tuples;
  json gs = json::array();
  for (const auto& group : groups.groups) {
    json rows = json::array();
    for (const Tuple& t : group) {
      json row = json::array();
      for (const Cell& c : t.cells)
        row.push_back(c ? json(*c) : json(nullptr));
      rows.push_back(std::move(row));
    }
    gs.push_back(std::move(rows));
  }
  j["groups"] = std::move(gs);
  return j;
}

struct LoadedGroups {
  Schema schema;
  SampleGroups groups;
  std::uint64_t source_tuples = 0;
};

LoadedGroups groups_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j = json::parse(in);
  LoadedGroups out;
  out.schema.attributes = j.at("attributes").get<std::vector<std::string>>();
  out.groups.q = j.at("q").get<std::vector<std::uint64_t>>();
  out.source_tuples = j.at("source_tuples").get<std::uint64_t>();
  for (const json& rows : j.at("groups")) {
    std::vector<Tuple> group;
    for (const json& row : rows) {
      Tuple t;
      for (const json& cell : row)
        t.cells.push_back(cell.is_null() ? Cell{}
                                         : Cell{cell.get<std::string>()});
      group.push_back(std::move(t));
    }
    out.groups.groups.push_back(std::move(group));
  }
  return out;
}

/// Per-group discovery under the dispatch plan; groups run in parallel when
/// threads > 1, with identical results either way.
std::vector<std::vector<MinedRule>> discover_groups(
    const SampleGroups& groups, const Schema& schema,
    const DiscoveryParams& params, std::uint64_t source_tuples,
    unsigned threads) {
  if (threads <= 1) return dfcfd(groups, schema, params, source_tuples);
  std::vector<std::future<std::vector<std::vector<MinedRule>>>> futures;
  for (const auto& group : groups.groups) {
    SampleGroups one;
    one.groups.push_back(group);
    one.q.push_back(group.size());
    futures.push_back(std::async(std::launch::async, [&, one] {
      return dfcfd(one, schema, params, source_tuples);
    }));
  }
  std::vector<std::vector<MinedRule>> out;
  for (auto& f : futures) out.push_back(f.get()[0]);
  return out;
}

/// Union with duplicate elimination, keeping first-seen order, then sorted.
std::vector<MinedRule> union_rules(
    const std::vector<std::vector<MinedRule>>& per_group) {
  std::vector<MinedRule> merged;
  std::set<std::string> seen;
  for (const auto& group : per_group)
    for (const MinedRule& r : group)
      if (seen.insert(format_cfd(r.cfd)).second) merged.push_back(r);
  std::sort(merged.begin(), merged.end(),
            [](const MinedRule& a, const MinedRule& b) {
              return format_cfd(a.cfd) < format_cfd(b.cfd);
            });
  return merged;
}

/// Supporter counts over all sample groups: constants by direct counting,
/// variables by rank bracketing against the planned miners.
std::vector<WeightedRule> weigh_rules(const std::vector<CFD>& rules,
                                      const LoadedGroups& data,
                                      const DiscoveryParams& params) {
  std::vector<WeightedRule> out;
  for (const CFD& c : rules) out.push_back({c, 0});
  std::vector<CFD> variables;
  for (const CFD& c : rules)
    if (c.kind() == CfdKind::Variable) variables.push_back(c);

  DiscoveryPlan plan =
      dfcfd_plan(data.schema.arity(), data.source_tuples);
  for (const auto& group : data.groups.groups) {
    std::unordered_map<CFD, std::uint64_t, CfdHash> var_weights;
    if (!variables.empty() && group.size() >= 4) {
      MinerFn miner = [&](std::uint64_t k) {
        DiscoveryParams p = params;
        p.min_support = k;
        std::vector<MinedRule> mined;
        if (plan.use_bctane)
          mined = bctane(group, data.schema, p);
        else if (plan.use_bfcfd)
          mined = bfcfd(group, data.schema, p);
        return mined;
      };
      var_weights = weight_variables(variables, group.size(),
                                     make_ladder(group.size()), miner);
    }
    for (WeightedRule& r : out) {
      if (r.cfd.kind() == CfdKind::Constant)
        r.weight += weight_constant(r.cfd, group, data.schema);
      else if (auto it = var_weights.find(r.cfd); it != var_weights.end())
        r.weight += it->second;
    }
  }
  return out;
}

std::vector<std::pair<CFD, std::uint64_t>> resolve_rules(
    const std::vector<WeightedRule>& weighted, std::uint64_t seed,
    const std::string& dot_path) {
  ConflictGraph graph = build_graph(weighted);
  if (!dot_path.empty()) {
    std::ofstream dot(dot_path, std::ios::binary);
    if (!dot) throw std::runtime_error("cannot write " + dot_path);
    dot << to_dot(graph);
  }
  std::vector<std::pair<CFD, std::uint64_t>> kept;
  for (std::size_t v : mwid(graph, seed)) {
    const WeightedNode& node = graph.nodes[v];
    for (const CFD& c : node.members) {
      std::uint64_t w = node.weight;
      for (const WeightedRule& r : weighted)
        if (r.cfd == c) w = r.weight;
      kept.push_back({c, w});
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return format_cfd(a.first) < format_cfd(b.first);
  });
  return kept;
}

std::optional<double> planted_coverage(const std::vector<CFD>& planted,
                                       const std::vector<CFD>& recovered) {
  if (planted.empty()) return std::nullopt;
  std::size_t covered = 0;
  for (const CFD& p : planted)
    for (const CFD& r : recovered)
      if (more_general_or_equal(r, p)) {
        ++covered;
        break;
      }
  return double(covered) / double(planted.size());
}

std::vector<std::size_t> read_indices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::size_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(std::stoull(line));
  }
  return out;
}

// ---------------------------------------------------------------- commands

struct GenerateArgs {
  GeneratorSpec spec;
  std::string out_dir;
};

void cmd_generate(const GenerateArgs& args) {
  args.spec.validate();
  GeneratedData d = stage("generate", [&] { return generate(args.spec); });
  stage("write", [&] {
    fs::create_directories(args.out_dir);
    save_csv(d.data, args.out_dir + "/data.csv");
    std::ofstream rf(args.out_dir + "/planted-rules.txt", std::ios::binary);
    for (const CFD& rule : d.planted) rf << format_cfd(rule) << "\n";
    std::ofstream di(args.out_dir + "/dirty-index.txt", std::ios::binary);
    for (std::size_t row : d.dirty_rows) di << row << "\n";
    return 0;
  });
  std::cout << "wrote " << d.data.tuples.size() << " rows, "
            << d.planted.size() << " rules, " << d.dirty_rows.size()
            << " dirty rows to " << args.out_dir << "\n";
}

struct SampleArgs {
  std::string data, out, markers = "\x01";
  SamplingParams params;
};

void cmd_sample(const SampleArgs& args) {
  require_file(args.data);
  NullPolicy policy = make_policy(args.markers);
  CsvStream in(args.data, policy);
  args.params.validate(in.schema().arity());
  SamplingStats stats;
  SampleGroups groups =
      stage("sample", [&] { return brrsc(in, args.params, stats); });
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + args.out);
  out << groups_to_json(in.schema(), groups, stats.tuples_scanned).dump(2)
      << "\n";
  std::cout << "sampled " << groups.n() << " groups from "
            << stats.tuples_scanned << " tuples in " << stats.passes
            << " pass\n";
}

struct DiscoverArgs {
  std::string groups, out;
  DiscoveryParams params;
  unsigned threads = 1;
};

void cmd_discover(const DiscoverArgs& args) {
  require_file(args.groups);
  args.params.validate();
  LoadedGroups data =
      stage("load", [&] { return groups_from_json(args.groups); });
  auto per_group = stage("discover", [&] {
    return discover_groups(data.groups, data.schema, args.params,
                           data.source_tuples, args.threads);
  });
  std::vector<std::pair<CFD, std::uint64_t>> rules;
  for (const MinedRule& r : union_rules(per_group))
    rules.push_back({r.cfd, r.eval.supporters});
  write_rules(args.out, rules, "supporters");
  std::cout << "discovered " << rules.size() << " rules\n";
}

struct ResolveArgs {
  std::string rules, groups, out, graph_dot;
  DiscoveryParams params;
  std::uint64_t seed = 0;
};

void cmd_resolve(const ResolveArgs& args) {
  require_file(args.rules);
  require_file(args.groups);
  args.params.validate();
  std::vector<CFD> rules = stage("load", [&] { return read_rules(args.rules); });
  LoadedGroups data =
      stage("load", [&] { return groups_from_json(args.groups); });
  auto weighted =
      stage("weigh", [&] { return weigh_rules(rules, data, args.params); });
  auto kept = stage("resolve", [&] {
    return resolve_rules(weighted, args.seed, args.graph_dot);
  });
  write_rules(args.out, kept, "weight");
  std::cout << "kept " << kept.size() << " of " << rules.size()
            << " rules\n";
}

struct CleanArgs {
  std::string rules, data, out, markers = "\x01";
};

void cmd_clean(const CleanArgs& args) {
  require_file(args.rules);
  require_file(args.data);
  std::vector<CFD> rules = stage("load", [&] { return read_rules(args.rules); });
  Relation rel = stage("load", [&] {
    return load_csv(args.data, make_policy(args.markers));
  });
  std::vector<std::size_t> flagged =
      stage("clean", [&] { return violations(rules, rel); });
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + args.out);
  for (std::size_t row : flagged) out << row << "\n";
  std::cout << "flagged " << flagged.size() << " of " << rel.tuples.size()
            << " rows\n";
}

struct TuneArgs {
  std::string spec, measurements, out;
};

RequirementSpec read_requirements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  RequirementSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("spec line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "objective") {
      if (value == "CW") spec.objective = Dimension::CW;
      else if (value == "QC") spec.objective = Dimension::QC;
      else if (value == "CC") spec.objective = Dimension::CC;
      else if (value == "QD") spec.objective = Dimension::QD;
      else
        throw std::runtime_error("spec: unknown objective " + value);
    } else if (key == "cw_max") {
      spec.cw_max = std::stod(value);
    } else if (key == "qc_min") {
      spec.qc_min = std::stod(value);
    } else if (key == "cc_max") {
      spec.cc_max = std::stod(value);
    } else if (key == "qd_min") {
      spec.qd_min = std::stod(value);
    } else if (key == "rows") {
      spec.data_rows = std::stod(value);
    } else {
      throw std::runtime_error("spec: unknown key " + key);
    }
  }
  return spec;
}

void cmd_tune(const TuneArgs& args) {
  require_file(args.spec);
  require_file(args.measurements);
  RequirementSpec spec;
  try {
    spec = read_requirements(args.spec);
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  FittedModel model = stage("fit", [&] {
    return fit(load_measurements_file(args.measurements));
  });
  TuneResult result = stage("optimize", [&] { return optimize(model, spec); });
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + args.out);
  if (!result.feasible) {
    out << "feasible=false\n";
    out << "reason=" << result.infeasible_reason << "\n";
    throw StageError("optimize", result.infeasible_reason);
  }
  out << "feasible=true\n";
  for (const auto& [name, value] : result.params)
    out << name << "=" << value << "\n";
  out << "objective=" << dimension_name(spec.objective) << "\n";
  out << "objective_value=" << result.objective_value << "\n";
  std::cout << "selected";
  for (const auto& [name, value] : result.params)
    std::cout << " " << name << "=" << value;
  std::cout << "\n";
}

struct PipelineArgs {
  std::string data, out_dir, planted, dirty_index;
  std::string markers = "\x01";
  SamplingParams sampling;
  DiscoveryParams discovery;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void cmd_pipeline(const PipelineArgs& args) {
  require_file(args.data);
  if (!args.planted.empty()) require_file(args.planted);
  if (!args.dirty_index.empty()) require_file(args.dirty_index);
  fs::create_directories(args.out_dir);
  NullPolicy policy = make_policy(args.markers);

  auto cw_start = std::chrono::steady_clock::now();
  CsvStream in(args.data, policy);
  SamplingParams sampling = args.sampling;
  sampling.seed = args.seed;
  sampling.validate(in.schema().arity());
  args.discovery.validate();
  SamplingStats stats;
  SampleGroups groups =
      stage("sample", [&] { return brrsc(in, sampling, stats); });
  LoadedGroups data{in.schema(), groups, stats.tuples_scanned};
  {
    std::ofstream gf(args.out_dir + "/groups.json", std::ios::binary);
    gf << groups_to_json(in.schema(), groups, stats.tuples_scanned).dump(2)
       << "\n";
  }

  auto per_group = stage("discover", [&] {
    return discover_groups(groups, in.schema(), args.discovery,
                           stats.tuples_scanned, args.threads);
  });
  std::vector<MinedRule> mined = union_rules(per_group);
  std::vector<std::pair<CFD, std::uint64_t>> mined_out;
  std::vector<CFD> mined_cfds;
  for (const MinedRule& r : mined) {
    mined_out.push_back({r.cfd, r.eval.supporters});
    mined_cfds.push_back(r.cfd);
  }
  write_rules(args.out_dir + "/rules.txt", mined_out, "supporters");

  auto weighted = stage("weigh", [&] {
    return weigh_rules(mined_cfds, data, args.discovery);
  });
  auto kept = stage("resolve", [&] {
    return resolve_rules(weighted, mix_seed(args.seed) ^ 0x5eedULL, "");
  });
  write_rules(args.out_dir + "/rules-clean.txt", kept, "weight");
  double cw = minutes_since(cw_start);

  auto cc_start = std::chrono::steady_clock::now();
  Relation rel = stage("load", [&] { return load_csv(args.data, policy); });
  std::vector<CFD> final_rules;
  for (const auto& [cfd, weight] : kept) final_rules.push_back(cfd);
  std::vector<std::size_t> flagged =
      stage("clean", [&] { return violations(final_rules, rel); });
  {
    std::ofstream vf(args.out_dir + "/violations.txt", std::ios::binary);
    for (std::size_t row : flagged) vf << row << "\n";
  }
  double cc = minutes_since(cc_start);

  json report;
  report["cw_minutes"] = cw;
  report["cc_minutes"] = cc;
  report["source_tuples"] = stats.tuples_scanned;
  report["groups"] = groups.n();
  report["rules_discovered"] = mined.size();
  report["rules_kept"] = kept.size();
  report["rows_flagged"] = flagged.size();
  report["qc"] = nullptr;
  report["qd"] = nullptr;
  json warnings = json::array();
  if (kept.empty()) warnings.push_back("no rules discovered");
  if (!args.planted.empty()) {
    std::vector<CFD> planted =
        stage("score", [&] { return read_rules(args.planted); });
    auto qc = planted_coverage(planted, final_rules);
    if (qc && !kept.empty())
      report["qc"] = *qc;
    else
      warnings.push_back("qc undefined");
  }
  if (!args.dirty_index.empty()) {
    std::vector<std::size_t> dirty =
        stage("score", [&] { return read_indices(args.dirty_index); });
    if (dirty.empty()) {
      warnings.push_back("qd undefined");
    } else {
      std::set<std::size_t> dirty_set(dirty.begin(), dirty.end());
      std::size_t hit = 0;
      for (std::size_t row : flagged)
        if (dirty_set.count(row)) ++hit;
      report["qd"] = double(hit) / double(dirty_set.size());
    }
  }
  report["warnings"] = warnings;
  {
    std::ofstream rf(args.out_dir + "/report.json", std::ios::binary);
    rf << report.dump(2) << "\n";
  }
  std::cout << "pipeline done: " << kept.size() << " rules, "
            << flagged.size() << " rows flagged\n";
}

void add_sampling_flags(CLI::App* cmd, SamplingParams& p) {
  cmd->add_option("--m", p.m, "tuples per sample group");
  cmd->add_option("--b", p.b, "similarity bound b");
  cmd->add_option("--b-lo", p.b_lo, "popularity bound b'");
  cmd->add_option("--n-max", p.n_max, "maximum group count");
}

void add_discovery_flags(CLI::App* cmd, DiscoveryParams& p) {
  cmd->add_option("--e", p.e, "confidence threshold");
  cmd->add_option("--min-support", p.min_support, "supporter floor k");
  cmd->add_option("--max-lhs", p.max_lhs, "LHS size cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CFD mining pipeline"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd =
      app.add_subcommand("generate", "emit a benchmark dataset");
  generate_cmd->add_option("--rows", gen.spec.rows, "row count");
  generate_cmd->add_option("--arity", gen.spec.arity, "attribute count");
  generate_cmd->add_option("--rules", gen.spec.n_rules, "planted rule count");
  generate_cmd->add_option("--error-rate", gen.spec.error_rate,
                           "fraction of rows perturbed");
  generate_cmd->add_option("--key-domain", gen.spec.key_domain,
                           "values per key attribute");
  generate_cmd->add_option("--seed", gen.spec.seed, "random seed");
  generate_cmd->add_option("--out-dir", gen.out_dir, "output directory")
      ->required();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "one-pass sampling");
  sample_cmd->add_option("--data", sample.data, "input CSV")->required();
  sample_cmd->add_option("--out", sample.out, "groups.json path")->required();
  sample_cmd->add_option("--null-markers", sample.markers,
                         "comma-separated missing-value markers");
  sample_cmd->add_option("--seed", sample.params.seed, "random seed");
  add_sampling_flags(sample_cmd, sample.params);

  DiscoverArgs discover;
  auto* discover_cmd = app.add_subcommand("discover", "mine CFDs per group");
  discover_cmd->add_option("--groups", discover.groups, "groups.json path")
      ->required();
  discover_cmd->add_option("--out", discover.out, "rules.txt path")
      ->required();
  discover_cmd->add_option("--threads", discover.threads,
                           "per-group parallelism");
  add_discovery_flags(discover_cmd, discover.params);

  ResolveArgs resolve;
  auto* resolve_cmd =
      app.add_subcommand("resolve", "drop conflicting rules via MWID");
  resolve_cmd->add_option("--rules", resolve.rules, "rules.txt path")
      ->required();
  resolve_cmd->add_option("--groups", resolve.groups, "groups.json path")
      ->required();
  resolve_cmd->add_option("--out", resolve.out, "rules-clean.txt path")
      ->required();
  resolve_cmd->add_option("--graph-dot", resolve.graph_dot,
                          "write the conflict graph in DOT format");
  resolve_cmd->add_option("--seed", resolve.seed, "random seed");
  add_discovery_flags(resolve_cmd, resolve.params);

  CleanArgs clean;
  auto* clean_cmd = app.add_subcommand("clean", "flag violating rows");
  clean_cmd->add_option("--rules", clean.rules, "rule file")->required();
  clean_cmd->add_option("--data", clean.data, "input CSV")->required();
  clean_cmd->add_option("--out", clean.out, "violations path")->required();
  clean_cmd->add_option("--null-markers", clean.markers,
                        "comma-separated missing-value markers");

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "requirement-driven tuning");
  tune_cmd->add_option("--spec", tune.spec, "requirement file")->required();
  tune_cmd->add_option("--measurements", tune.measurements,
                       "sweep measurements CSV")
      ->required();
  tune_cmd->add_option("--out", tune.out, "parameter file")->required();

  PipelineArgs pipeline;
  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "sample, discover, resolve, clean");
  pipeline_cmd->add_option("--data", pipeline.data, "input CSV")->required();
  pipeline_cmd->add_option("--out-dir", pipeline.out_dir, "output directory")
      ->required();
  pipeline_cmd->add_option("--planted", pipeline.planted,
                           "planted rules for QC scoring");
  pipeline_cmd->add_option("--dirty-index", pipeline.dirty_index,
                           "dirty row ids for QD scoring");
  pipeline_cmd->add_option("--null-markers", pipeline.markers,
                           "comma-separated missing-value markers");
  pipeline_cmd->add_option("--seed", pipeline.seed, "random seed");
  pipeline_cmd->add_option("--threads", pipeline.threads,
                           "per-group parallelism");
  add_sampling_flags(pipeline_cmd, pipeline.sampling);
  add_discovery_flags(pipeline_cmd, pipeline.discovery);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (generate_cmd->parsed()) cmd_generate(gen);
    if (sample_cmd->parsed()) cmd_sample(sample);
    if (discover_cmd->parsed()) cmd_discover(discover);
    if (resolve_cmd->parsed()) cmd_resolve(resolve);
    if (clean_cmd->parsed()) cmd_clean(clean);
    if (tune_cmd->parsed()) cmd_tune(tune);
    if (pipeline_cmd->parsed()) cmd_pipeline(pipeline);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
