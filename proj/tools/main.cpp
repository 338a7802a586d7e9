#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "matconc/suite.hpp"

using namespace matconc;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  int jobs = 1;
  bool timing = false;
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output \"" + path + "\"");
  f << text;
}

std::string pick_format(const Globals& g, const ExperimentConfig& cfg, const char* fallback) {
  if (!g.format.empty()) return g.format;
  if (!cfg.format.empty()) return cfg.format;
  return fallback;
}

std::string pick_path(const Globals& g, const ExperimentConfig& cfg) { return g.out.empty() ? cfg.output_path : g.out; }

int cmd_verify(const Globals& g, const std::string& path) {
  const auto cfg = load_config(path, g.seed);
  const auto reports = run_verify(cfg, g.jobs);
  const auto fmt = pick_format(g, cfg, "json");
  write_output(fmt == "csv" ? reports_to_csv(reports) : reports_to_jsonl(reports, g.timing), pick_path(g, cfg));
  std::cerr << reports_table(reports);
  return suite_passed(reports) ? kExitOk : kExitFail;
}

int cmd_experiment(const Globals& g, const std::string& path) {
  const auto cfg = load_config(path, g.seed);
  const auto result = run_experiment(cfg);
  const auto fmt = pick_format(g, cfg, "csv");
  write_output(fmt == "json" ? experiment_to_json(result, cfg) : experiment_to_csv(result), pick_path(g, cfg));
  return kExitOk;
}

int cmd_bounds(const Globals& g, BoundsQuery q, const std::string& preset) {
  if (preset == "product") {
    q.c = 2.0;
    if (q.q_list.empty()) q.q_list = {1.0, 2.0, 3.0};
  } else if (!preset.empty()) {
    throw ConfigError("bounds: unknown preset \"" + preset + "\" (available: product)");
  }
  for (double x : q.q_list)
    if (!admissible_moment_order(x))
      throw ConfigError("bounds: --q " + format_double(x) + " is not an admissible moment order (need q = 1 or q >= 1.5)");
  if (!(q.c > 0.0) || !(q.v >= 0.0)) throw ConfigError("bounds: need --c > 0 and --v >= 0");
  for (double t : q.t_grid)
    if (!(t >= 0.0)) throw ConfigError("bounds: tail thresholds must be >= 0");
  const json table = bounds_table(q);
  write_output(g.format == "json" ? table.dump() + "\n" : bounds_to_csv(table), g.out);
  return kExitOk;
}

int cmd_list(const Globals& g) {
  json j = {{"v", 1}, {"models", json::array()}, {"checks", json::array()}, {"presets", json::array()}};
  for (const auto& k : model_kinds()) j["models"].push_back({{"name", k}, {"description", model_description(k)}});
  for (const auto& c : check_catalog())
    j["checks"].push_back({{"name", c.name}, {"group", c.group}, {"description", c.description}});
  for (const auto& p : preset_catalog()) j["presets"].push_back({{"name", p.name}, {"description", p.description}});
  if (g.format == "json") {
    write_output(j.dump() + "\n", g.out);
    return kExitOk;
  }
  std::string s = "models:\n";
  for (const auto& m : j["models"])
    s += "  " + m["name"].get<std::string>() + "  " + m["description"].get<std::string>() + "\n";
  s += "checks:\n";
  for (const auto& c : j["checks"])
    s += "  " + c["name"].get<std::string>() + " [" + c["group"].get<std::string>() + "]  " +
         c["description"].get<std::string>() + "\n";
  s += "presets:\n";
  for (const auto& p : j["presets"])
    s += "  " + p["name"].get<std::string>() + "  " + p["description"].get<std::string>() + "\n";
  write_output(s, g.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix concentration verification harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", g.jobs, "Worker threads for verify")->check(CLI::PositiveNumber);
  app.add_flag("--timing", g.timing, "Record elapsed_s in JSON reports");

  std::string config_path;
  auto* verify = app.add_subcommand("verify", "Run the checks listed in a config");
  verify->add_option("config", config_path, "Config path")->required();
  auto* experiment = app.add_subcommand("experiment", "Write a Monte Carlo tail curve for a model config");
  experiment->add_option("config", config_path, "Config path")->required();

  BoundsQuery q;
  std::string preset;
  double single_t = -1.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the bound calculators");
  bounds->add_option("--d", q.d, "Matrix dimension")->check(CLI::PositiveNumber);
  bounds->add_option("--c", q.c, "Bakry-Emery constant");
  bounds->add_option("--v", q.v, "Variance proxy");
  bounds->add_option("--q", q.q_list, "Moment orders")->delimiter(',');
  bounds->add_option("--t-grid", q.t_grid, "Tail thresholds")->delimiter(',');
  bounds->add_option("--t", single_t, "Single tail threshold");
  bounds->add_option("--preset", preset, "Preset constants (product: c = 2)");

  auto* list = app.add_subcommand("list", "Print the catalog of models, checks and presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) g.seed = seed;
  if (single_t >= 0.0) q.t_grid.push_back(single_t);

  try {
    if (*verify) return cmd_verify(g, config_path);
    if (*experiment) return cmd_experiment(g, config_path);
    if (*bounds) return cmd_bounds(g, q, preset);
    if (*list) return cmd_list(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ResourceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
