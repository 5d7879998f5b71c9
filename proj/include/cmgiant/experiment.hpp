#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmgiant/degree_model.hpp"
#include "cmgiant/local_limit.hpp"

namespace cmgiant {

inline constexpr const char* kLibraryVersion = "1.0.0";

enum class ExperimentKind {
  giant,
  structure,
  almost_local,
  necessity_demo,
  local_conv,
  coupling,
  distances,
  p2_demo,
  truncation,
};

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& name);
const std::vector<ExperimentKind>& all_experiment_kinds();

/// Bad or inconsistent configuration; the message names the field (or the
/// line and column for JSON syntax errors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed while an experiment was running.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::giant;
  /// Exactly one of pmf / sequence_path is set after loading.
  std::optional<Pmf> pmf;
  std::optional<std::filesystem::path> sequence_path;
  std::vector<std::size_t> n_values;
  std::vector<std::uint64_t> seeds;
  std::vector<std::int64_t> k_values{50};
  std::vector<int> r_values{2};
  std::vector<Degree> b_values{5};
  double alpha = kDefaultEnvelopeAlpha;
  double delta = 0.1;
  double m_exponent = 0.4;
  std::size_t pairs = 1000;
  std::size_t bp_samples = 100'000;
  std::size_t threads = 1;
  std::filesystem::path output_dir = "out";

  /// Everything that determines outputs; excludes output_dir and threads.
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Throws ConfigError on violated invariants (no n, no seed, missing files).
  void validate() const;
};

/// Hex FNV-1a hash of the canonical config JSON.
std::string config_hash(const ExperimentConfig& cfg);

/// Manifest JSON: config, hash, seeds, library version, offspring spec.
nlohmann::ordered_json manifest_json(const ExperimentConfig& cfg);

nlohmann::ordered_json offspring_spec_json(const OffspringSpec& spec);

/// Writes manifest.json into cfg.output_dir; throws std::runtime_error if
/// the directory cannot be written.
std::filesystem::path emit_manifest(const ExperimentConfig& cfg);

struct RunResult {
  int exit_status = 0;
  std::vector<std::filesystem::path> files;
  std::string error;
};

/// Runs every (n, seed) replicate, writes records.jsonl, summary.csv, the
/// manifest and experiment-specific dumps. Exit status is nonzero iff an
/// internal invariant failed; in that case (and on any other error) the
/// files written so far are removed.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace cmgiant
