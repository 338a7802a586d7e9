#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matconc/verify.hpp"

namespace matconc {

enum ExitCode { kExitOk = 0, kExitFail = 1, kExitConfig = 2, kExitNumeric = 3 };

struct CheckSpec {
  std::string name;
  json params = json::object();
  // Expected to fail; reported but never gates the exit code.
  bool negative_control = false;
};

struct ExperimentSettings {
  std::size_t samples = 100000;
  std::vector<double> t_grid;  // empty: default grid
  TailBranch branch = TailBranch::LambdaMax;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::optional<json> model;
  std::optional<json> field;  // finite field literal used by the exact checks
  std::vector<CheckSpec> checks;
  ExperimentSettings experiment;
  std::string output_path;
  std::string format;  // "json" | "csv" | "" (command default)
};

// Throws ConfigError naming the offending field. A seed override replaces (or supplies) "seed".
ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

struct CatalogEntry {
  std::string name;
  std::string group;  // exact | trace | monte-carlo | oracle
  std::string description;
};
const std::vector<CatalogEntry>& check_catalog();
bool is_known_check(const std::string& name);

struct PresetEntry {
  std::string name;
  std::string description;
};
const std::vector<PresetEntry>& preset_catalog();
std::string model_description(const std::string& kind);

// Runs one configured check. Parameters missing from spec.params take the documented defaults.
VerificationReport run_check(const CheckSpec& spec, const ExperimentConfig& cfg);
// Checks fan out over `jobs` threads; reports come back in config order.
std::vector<VerificationReport> run_verify(const ExperimentConfig& cfg, int jobs = 1);
// True iff every check not marked as a negative control passed.
bool suite_passed(const std::vector<VerificationReport>& reports);

std::string reports_to_jsonl(const std::vector<VerificationReport>& reports, bool include_timing);
// Header: v,name,status,margin,tolerance,trials,seed,negative_control
std::string reports_to_csv(const std::vector<VerificationReport>& reports);
std::string reports_table(const std::vector<VerificationReport>& reports);

struct ExperimentRow {
  double t;
  double empirical;
  double stderr_;
  double bound;
  bool pass;  // empirical - 4 stderr <= bound
};
struct ExperimentResult {
  ConcentrationModel model;
  TailCurve curve;
  std::vector<ExperimentRow> rows;
};
ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Header: v,t,empirical,stderr,bound,pass
std::string experiment_to_csv(const ExperimentResult& r);
std::string experiment_to_json(const ExperimentResult& r, const ExperimentConfig& cfg);

struct BoundsQuery {
  int d = 1;
  double c = 1.0;
  double v = 1.0;
  std::vector<double> q_list;
  std::vector<double> t_grid;
};
// Rows of {kind, x, value} covering tails, two-sided tails, moments and the expectation bound.
json bounds_table(const BoundsQuery& q);
std::string bounds_to_csv(const json& table);

}  // namespace matconc
