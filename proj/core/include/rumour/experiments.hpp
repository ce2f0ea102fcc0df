#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rumour/engine.hpp"
#include "rumour/estimators.hpp"
#include "rumour/radius_law.hpp"
#include "rumour/reactivation.hpp"

namespace rumour {

enum class ExperimentKind { Simulate, Survival, Speed, Clt, React, Criterion, Oracle, Probe };

std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from(const std::string& name);

/// A validated experiment description. Fields a kind does not use keep their defaults.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  RadiusLaw law = RadiusLaw::constant(0);
  nlohmann::json law_spec;  ///< as written, normalised
  SiteEnvironment env = SiteEnvironment::all_occupied();
  nlohmann::json env_spec;

  double p2 = 0.0;
  RadiusKeying keying = RadiusKeying::StepKeyed;
  std::optional<Radius> window;

  std::int64_t horizon = 1000;
  std::int64_t replicates = 1000;
  std::vector<std::int64_t> ns;
  std::int64_t steps = 10000;  ///< N for speed and reactivation runs, n for clt
  std::int64_t cap = 100000;   ///< censoring step for survival runs
  std::int64_t min_conditional = 1000;
  MuSource mu_source = MuSource::Renewal;
  double fixed_mu = 0.0;
  std::int64_t centering_steps = 100'000'000;
  double ks_alpha = 0.01;
  std::int64_t oracle_horizon = 3;
  double oracle_budget = 1e8;
  std::int64_t criterion_nmax = 1'000'000;

  std::uint64_t seed = 1;
  double level = 0.95;
  std::string out = "out";

  /// Canonical JSON of every field, the input of config_hash.
  nlohmann::json canonical() const;
  /// FNV-1a of canonical().dump(), as 16 hex digits.
  std::string hash() const;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
};

/// Parses JSON text. Collects every problem found rather than stopping at the first.
ParseResult parse_config(const std::string& text);

/// Raised when a run detects a broken invariant; the CLI maps it to a nonzero exit.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunResult {
  int exit_code = 0;
  std::filesystem::path dir;
  std::vector<std::string> files;  ///< relative to dir, manifest.json last
  nlohmann::json report;
};

/// Runs the experiment and writes manifest.json, report.json and the data CSVs
/// into config.out. Data files depend only on the config, never on `workers`.
RunResult run_experiment(const ExperimentConfig& config, unsigned workers);

/// CSV header of each data file written for `kind`, in write order.
std::vector<std::pair<std::string, std::string>> csv_schema(ExperimentKind kind);

std::string library_version();

}  // namespace rumour
