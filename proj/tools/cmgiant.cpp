// cmgiant: experiment runner for configuration-model giant components.
//
//   cmgiant giant --pmf 1:0.5,3:0.5 --n 10000,100000 --seeds 20 --out out/giant
//   cmgiant distances --config cfg.json --threads 4
//   cmgiant replay out/giant/manifest.json --out replayed
//   cmgiant spec --pmf 1:0.5,3:0.5
//   cmgiant build --pmf 1:0.5,3:0.5 --n 1000 --seed 7 > edges.txt
//
// CMGIANT_OUT overrides the output directory of a config file; --out
// overrides both.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmgiant/experiment.hpp"
#include "cmgiant/graph_build.hpp"

using namespace cmgiant;

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "1:0.5,3:0.5"
nlohmann::json pmf_arg(const std::string& text) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("--pmf: expected k:p pairs, got '" + item + "'");
    try {
      j[item.substr(0, colon)] = std::stod(item.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw ConfigError("--pmf: malformed probability in '" + item + "'");
    }
  }
  return j;
}

nlohmann::json int_list_arg(const std::string& flag, const std::string& text) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      j.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError(flag + ": '" + item + "' is not an integer");
    }
  }
  return j;
}

struct Overrides {
  std::string config;
  std::string out;
  std::string pmf;
  std::string pmf_csv;
  std::string sequence;
  std::string n;
  std::string seeds;
  std::string k;
  std::string r;
  std::string b;
  double alpha = 0.0;
  double delta = 0.0;
  double m_exponent = 0.0;
  std::size_t pairs = 0;
  std::size_t bp_samples = 0;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--pmf", o.pmf, "degree pmf as k:p,k:p,...");
  cmd->add_option("--pmf-csv", o.pmf_csv, "degree pmf CSV file (k,p rows)");
  cmd->add_option("--sequence", o.sequence, "explicit degree sequence file");
  cmd->add_option("--n", o.n, "comma-separated n values");
  cmd->add_option("--seeds", o.seeds, "seed count, or comma-separated seeds when more than one");
  cmd->add_option("--k", o.k, "comma-separated cluster-size thresholds");
  cmd->add_option("--r", o.r, "comma-separated ball radii");
  cmd->add_option("--b", o.b, "comma-separated degree truncation bounds");
  cmd->add_option("--alpha", o.alpha, "envelope exponent in (1/2, 1)");
  cmd->add_option("--delta", o.delta, "discrepancy exponent slack");
  cmd->add_option("--m-exponent", o.m_exponent, "coupling budget m = floor(n^e)");
  cmd->add_option("--pairs", o.pairs, "vertex pairs per distance sample");
  cmd->add_option("--bp-samples", o.bp_samples, "branching-process balls per radius");
  cmd->add_option("--threads", o.threads, "worker threads");
}

ExperimentConfig build_config(ExperimentKind kind, const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(o.config + ": config syntax error: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(o.config + ": top level must be a JSON object");
    if (j.contains("experiment") && j["experiment"] != to_string(kind)) {
      throw ConfigError(o.config + ": config field 'experiment' is '" + j["experiment"].dump() +
                        "' but the subcommand is '" + to_string(kind) + "'");
    }
  }
  j["experiment"] = to_string(kind);
  if (!o.pmf.empty()) j["degree_model"] = {{"pmf", pmf_arg(o.pmf)}};
  if (!o.pmf_csv.empty()) j["degree_model"] = {{"pmf_csv", o.pmf_csv}};
  if (!o.sequence.empty()) j["degree_model"] = {{"sequence", o.sequence}};
  if (!o.n.empty()) j["n"] = int_list_arg("--n", o.n);
  if (!o.seeds.empty()) {
    const auto seeds = int_list_arg("--seeds", o.seeds);
    j["seeds"] = seeds.size() == 1 ? seeds[0] : seeds;
  }
  if (!o.k.empty()) j["k"] = int_list_arg("--k", o.k);
  if (!o.r.empty()) j["r"] = int_list_arg("--r", o.r);
  if (!o.b.empty()) j["b"] = int_list_arg("--b", o.b);
  if (o.alpha != 0.0) j["alpha"] = o.alpha;
  if (o.delta != 0.0) j["delta"] = o.delta;
  if (o.m_exponent != 0.0) j["m_exponent"] = o.m_exponent;
  if (o.pairs != 0) j["pairs"] = o.pairs;
  if (o.bp_samples != 0) j["bp_samples"] = o.bp_samples;
  if (o.threads != 0) j["threads"] = o.threads;
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(o.config.empty() ? std::string(e.what()) : o.config + ": " + e.what());
  }
  if (const char* env = std::getenv("CMGIANT_OUT"); env && *env) cfg.output_dir = env;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

int run(const ExperimentConfig& cfg) {
  const RunResult r = run_experiment(cfg);
  if (r.exit_status != 0) {
    std::cerr << "cmgiant: " << r.error << '\n';
    return r.exit_status;
  }
  for (const auto& f : r.files) std::cout << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration-model giant component experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kLibraryVersion);

  std::vector<Overrides> overrides(all_experiment_kinds().size());
  std::vector<CLI::App*> experiment_cmds;
  for (std::size_t i = 0; i < all_experiment_kinds().size(); ++i) {
    const ExperimentKind kind = all_experiment_kinds()[i];
    auto* cmd = app.add_subcommand(to_string(kind), std::string("run the ") + to_string(kind) + " experiment");
    add_common(cmd, overrides[i]);
    experiment_cmds.push_back(cmd);
  }

  std::string manifest_path;
  std::string replay_out;
  std::size_t replay_threads = 0;
  auto* replay = app.add_subcommand("replay", "re-run the config recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory");
  replay->add_option("--threads", replay_threads, "worker threads");

  std::string spec_pmf;
  auto* spec_cmd = app.add_subcommand("spec", "print the branching-process limit of a degree pmf as JSON");
  spec_cmd->add_option("--pmf", spec_pmf, "degree pmf as k:p,k:p,...")->required();

  std::string build_pmf;
  std::size_t build_n = 0;
  std::uint64_t build_seed = 0;
  std::string build_out;
  auto* build_cmd = app.add_subcommand("build", "sample one configuration model and print its edge list");
  build_cmd->add_option("--pmf", build_pmf, "degree pmf as k:p,k:p,...")->required();
  build_cmd->add_option("--n", build_n, "number of vertices")->required()->check(CLI::PositiveNumber);
  build_cmd->add_option("--seed", build_seed, "seed");
  build_cmd->add_option("--out", build_out, "edge list file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < experiment_cmds.size(); ++i) {
      if (*experiment_cmds[i]) return run(build_config(all_experiment_kinds()[i], overrides[i]));
    }
    if (*replay) {
      std::ifstream in(manifest_path);
      nlohmann::json m;
      try {
        m = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(manifest_path + ": " + e.what());
      }
      if (!m.contains("config")) throw ConfigError(manifest_path + ": no 'config' field");
      ExperimentConfig cfg = ExperimentConfig::from_json(m["config"]);
      if (const char* env = std::getenv("CMGIANT_OUT"); env && *env) cfg.output_dir = env;
      if (!replay_out.empty()) cfg.output_dir = replay_out;
      if (replay_threads != 0) cfg.threads = replay_threads;
      return run(cfg);
    }
    if (*spec_cmd) {
      const ExperimentConfig cfg = ExperimentConfig::from_json({{"degree_model", {{"pmf", pmf_arg(spec_pmf)}}}});
      std::cout << offspring_spec_json(build_offspring_spec(*cfg.pmf)).dump(2) << '\n';
      return 0;
    }
    if (*build_cmd) {
      const ExperimentConfig cfg = ExperimentConfig::from_json({{"degree_model", {{"pmf", pmf_arg(build_pmf)}}}});
      Rng deg_rng(split_seed(build_seed, build_n, 1));
      Rng pair_rng(split_seed(build_seed, build_n, 2));
      const HalfEdgeGraph g = pair_half_edges(sample_iid_degrees(*cfg.pmf, build_n, deg_rng), pair_rng);
      if (build_out.empty()) {
        write_edge_list(std::cout, g);
      } else {
        std::ofstream os(build_out);
        if (!os) throw std::runtime_error("cannot write " + build_out);
        write_edge_list(os, g);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "cmgiant: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelError& e) {
    std::cerr << "cmgiant: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "cmgiant: invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "cmgiant: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
