#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

#include "cmgiant/experiment.hpp"

using namespace cmgiant;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cmgiant_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    ExperimentConfig::parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct SummaryRow {
  double mean = 0.0;
  double stddev = 0.0;
  std::string theory;
};

// metric -> row for the single n in a summary.csv
std::map<std::string, SummaryRow> read_summary(const fs::path& p) {
  std::map<std::string, SummaryRow> out;
  std::istringstream is(slurp(p));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
    if (line.back() == ',') f.emplace_back();
    REQUIRE(f.size() == 7);
    out[f[2]] = {std::stod(f[3]), std::stod(f[4]), f[6]};
  }
  return out;
}

const char* kMixPmf = R"("degree_model": {"pmf": {"1": 0.5, "3": 0.5}})";

int cli(const std::string& args) {
  const std::string cmd = std::string(CMGIANT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config diagnostics name the field or position") {
  CHECK(error_of(R"({"experiment": "giant", "n": 10,)").find("line") != std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": 10, "seeds": 1, "colour": 3})").find("'colour'") !=
        std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "seeds": 1})").find("'n'") != std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": 10})").find("'seeds'") != std::string::npos);
  CHECK(error_of(R"({"n": 10, "seeds": 1})").find("'degree_model'") != std::string::npos);
  CHECK(error_of(R"({"degree_model": {"pmf": {"0": 0.5, "2": 0.5}}, "n": 10, "seeds": 1})")
            .find("degree_model.pmf") != std::string::npos);
  CHECK(error_of(R"({"degree_model": {"pmf": {"1": 0.5, "2": 0.4}}, "n": 10, "seeds": 1})")
            .find("degree_model.pmf") != std::string::npos);
  CHECK(error_of(R"({"degree_model": {"sequence": "/nonexistent/seq.txt"}, "seeds": 1})").find("does not exist") !=
        std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": 10, "seeds": 1, "experiment": "nope"})")
            .find("'experiment'") != std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": 10, "seeds": 1, "alpha": 0.4})").find("'alpha'") !=
        std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": 10, "seeds": 1, "experiment": "almost_local", "r": [0]})")
            .find("'r'") != std::string::npos);
  CHECK(error_of(std::string("{") + kMixPmf + R"(, "n": [10, 20], "seeds": [3, 4]})") == "");
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("seed count expands to 0..count-1") {
  const ExperimentConfig c = ExperimentConfig::parse(std::string("{") + kMixPmf + R"(, "n": 10, "seeds": 3})");
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("manifests are deterministic and hash the outputs-relevant config") {
  const std::string text = std::string("{") + kMixPmf + R"(, "n": [1000], "seeds": 2, "experiment": "giant"})";
  ExperimentConfig a = ExperimentConfig::parse(text);
  ExperimentConfig b = ExperimentConfig::parse(text);
  a.output_dir = scratch("manifest_a");
  b.output_dir = scratch("manifest_b");
  b.threads = 4;
  CHECK(slurp(emit_manifest(a)) == slurp(emit_manifest(b)));
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig c = a;
  c.seeds = {0, 2};
  CHECK(config_hash(a) != config_hash(c));
  const auto m = manifest_json(a);
  CHECK(m["config_hash"] == config_hash(a));
  CHECK(m["offspring_spec"]["xi"].get<double>() == doctest::Approx(1.0 / 3.0));
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST_CASE("giant experiment summary") {
  ExperimentConfig cfg =
      ExperimentConfig::parse(std::string("{") + kMixPmf + R"(, "n": [10000], "seeds": 5, "experiment": "giant"})");
  cfg.output_dir = scratch("giant");
  const RunResult r = run_experiment(cfg);
  REQUIRE(r.exit_status == 0);
  const auto rows = read_summary(cfg.output_dir / "summary.csv");
  const SummaryRow& g = rows.at("gmax_frac");
  CHECK(std::abs(g.mean - 22.0 / 27.0) <= 0.03);
  CHECK(std::abs(std::stod(g.theory) - 0.814815) <= 1e-6);
  CHECK(fs::exists(cfg.output_dir / "records.jsonl"));
  CHECK(fs::exists(cfg.output_dir / "manifest.json"));
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("replay reproduces the summary and threads do not change results") {
  ExperimentConfig cfg =
      ExperimentConfig::parse(std::string("{") + kMixPmf + R"(, "n": [2000], "seeds": 3, "experiment": "structure"})");
  cfg.output_dir = scratch("replay_a");
  REQUIRE(run_experiment(cfg).exit_status == 0);
  const nlohmann::json m = nlohmann::json::parse(slurp(cfg.output_dir / "manifest.json"));
  ExperimentConfig again = ExperimentConfig::from_json(m["config"]);
  again.output_dir = scratch("replay_b");
  again.threads = 3;
  REQUIRE(run_experiment(again).exit_status == 0);
  CHECK(slurp(cfg.output_dir / "summary.csv") == slurp(again.output_dir / "summary.csv"));
  CHECK(slurp(cfg.output_dir / "records.jsonl") == slurp(again.output_dir / "records.jsonl"));
  fs::remove_all(cfg.output_dir);
  fs::remove_all(again.output_dir);
}

TEST_CASE("p2 demo: the largest cluster does not concentrate") {
  ExperimentConfig cfg = ExperimentConfig::parse(
      R"({"degree_model": {"pmf": {"2": 1.0}}, "n": [10000], "seeds": 20, "experiment": "p2_demo"})");
  cfg.output_dir = scratch("p2");
  REQUIRE(run_experiment(cfg).exit_status == 0);
  CHECK(read_summary(cfg.output_dir / "summary.csv").at("gmax_frac").stddev > 0.05);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("necessity demo: two halves") {
  ExperimentConfig cfg = ExperimentConfig::parse(std::string("{") + kMixPmf +
                                                 R"(, "n": [10000], "seeds": 3, "experiment": "necessity_demo",
                                                     "r": [2]})");
  cfg.output_dir = scratch("necessity");
  REQUIRE(run_experiment(cfg).exit_status == 0);
  const auto rows = read_summary(cfg.output_dir / "summary.csv");
  CHECK(std::abs(rows.at("gmax_frac").mean - 11.0 / 27.0) <= 0.03);
  CHECK(rows.at("boundary_pair_fraction_r2").mean >= 0.25);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("every experiment runs at small scale") {
  for (ExperimentKind kind : all_experiment_kinds()) {
    CAPTURE(to_string(kind));
    const std::string pmf = kind == ExperimentKind::p2_demo ? R"("degree_model": {"pmf": {"2": 1.0}})" : kMixPmf;
    ExperimentConfig cfg = ExperimentConfig::parse("{" + pmf + R"(, "n": [600], "seeds": 2, "pairs": 50,
        "bp_samples": 200, "experiment": ")" + to_string(kind) + "\"}");
    cfg.output_dir = scratch(std::string("small_") + to_string(kind));
    const RunResult r = run_experiment(cfg);
    CHECK(r.exit_status == 0);
    CHECK(r.error == "");
    for (const auto& f : r.files) CHECK(fs::exists(f));
    fs::remove_all(cfg.output_dir);
  }
}

TEST_CASE("command-line exit codes") {
  const fs::path out = scratch("cli");
  CHECK(cli("giant --pmf 1:0.5,3:0.5 --n 500 --seeds 2 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(cli("replay " + (out / "manifest.json").string() + " --out " + (out / "again").string()) == 0);
  CHECK(slurp(out / "summary.csv") == slurp(out / "again" / "summary.csv"));
  CHECK(cli("giant --pmf 1:0.5,3:0.4 --n 500 --seeds 2 --out " + out.string()) == 2);
  CHECK(cli("giant --pmf 1:0.5,3:0.5 --seeds 2 --out " + out.string()) == 2);
  CHECK(cli("distances --pmf 1:0.5,2:0.5 --n 500 --seeds 1 --out " + out.string()) == 2);
  CHECK(cli("spec --pmf 1:0.5,3:0.5") == 0);
  CHECK(cli("build --pmf 1:0.5,3:0.5 --n 50") == 0);
  CHECK(cli("giant --pmf 1:0.5,3:0.5 --n 500 --seeds 1 --out /proc/cmgiant_cannot_write") == 3);
  fs::remove_all(out);
}

}
