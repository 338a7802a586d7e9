#include "matconc/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "matconc/field_io.hpp"

namespace matconc {

namespace {

const std::vector<std::string> kFiniteParams = {"trials", "dim", "factors", "space", "seed", "tol", "perturb"};

struct CheckInfo {
  CatalogEntry entry;
  std::vector<std::string> params;
};

std::vector<std::string> with_finite(std::vector<std::string> extra) {
  extra.insert(extra.end(), kFiniteParams.begin(), kFiniteParams.end());
  return extra;
}

const std::vector<CheckInfo>& check_table() {
  static const std::vector<CheckInfo> table = {
      {{"bakry-emery", "exact", "Gamma(f) <= c Gamma2(f) at every state (finite engine) or along a model"},
       with_finite({"c", "on"})},
      {{"local-ergodicity", "exact", "Gamma(P_t f) <= exp(-2t/c) P_t Gamma(f) pointwise"}, with_finite({"c", "t_grid"})},
      {{"local-poincare", "exact", "P_t(f^2) - (P_t f)^2 <= c (1 - exp(-2t/c)) P_t Gamma(f)"},
       with_finite({"c", "t_grid"})},
      {{"variance-ergodicity", "exact", "Var(P_t f) <= exp(-2t/alpha) Var(f)"}, with_finite({"alpha", "t_grid"})},
      {{"matrix-poincare", "exact", "Var(f) <= alpha E Gamma(f)"}, with_finite({"alpha"})},
      {{"jensen", "exact", "trace moments contract under the semigroup"}, with_finite({"t_grid", "q_list"})},
      {{"chain-rule", "exact", "E tr Gamma(g, phi(f)) against the chain-rule bound for convex |phi'|"},
       with_finite({"family"})},
      {{"poly-moment", "exact", "exact trace moments of f - E f against the polynomial-moment bound"},
       with_finite({"c", "q_list"})},
      {{"mgf-moment", "exact", "exact log trace mgf against the exponential-moment bound"},
       with_finite({"c", "betas"})},
      {{"reversibility", "exact", "E tr[g P_t f] = E tr[(P_t g) f]"}, with_finite({"t_grid"})},
      {{"generator-symmetry", "exact", "E tr[g L f] = E tr[(L g) f]"}, with_finite({})},
      {{"triple-product", "exact", "triple-product identity for the generator and E of the product difference"},
       with_finite({})},
      {{"dimension-reduction", "exact", "E tr Gamma(f) = E tr Gamma of its entry fields"}, with_finite({})},
      {{"dissipation", "exact", "d/dt Var(P_t f) = -2 E Gamma(P_t f), central differences"},
       with_finite({"t_grid"})},
      {{"semigroup-law", "exact", "P_s P_t = P_{s+t}; subset and factorized evaluations agree"}, with_finite({})},
      {{"gamma-identities", "exact", "explicit Gamma and Gamma2 against their generator definitions"},
       with_finite({})},
      {{"mean-value-trace", "trace", "tr[C(phi(A) - phi(B))] against the mean value trace bound"},
       {"trials", "dim", "family", "seed", "tol"}},
      {{"young-entropy", "trace", "Young's inequality for matrix entropy, with Gibbs equality cases"},
       {"trials", "dim", "seed", "tol"}},
      {{"tail-dominance", "monte-carlo", "empirical eigenvalue tail - 4 stderr <= subgaussian tail bound"},
       {"samples", "t_grid", "branch", "seed"}},
      {{"expectation-bound", "monte-carlo", "empirical E lambda_max(f - E f) - 4 stderr <= sqrt(2 c v log d)"},
       {"samples", "seed"}},
      {{"sphere-gamma-oracle", "oracle", "sphere Gamma closed forms against tangential projection"},
       {"n", "dim", "trials", "seed", "tol"}},
      {{"so-gamma-oracle", "oracle", "SO(d) conjugation Gamma against geodesic finite differences"},
       {"d", "n", "trials", "seed", "tol"}},
      {{"skew-basis", "oracle", "sum over the skew basis of S M S equals its closed form"},
       {"d", "trials", "seed", "tol"}},
      {{"haar-invariants", "oracle", "Haar samples are orthogonal with determinant 1"}, {"d", "trials", "seed", "tol"}},
  };
  return table;
}

const CheckInfo& check_info(const std::string& name) {
  for (const auto& c : check_table())
    if (c.entry.name == name) return c;
  throw ConfigError("unknown check \"" + name + "\" (see `list`)");
}

template <class T>
T param(const CheckSpec& s, const char* key, T fallback) {
  if (!s.params.contains(key)) return fallback;
  try {
    return s.params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("check \"" + s.name + "\": parameter \"" + key + "\": " + e.what());
  }
}

std::uint64_t check_seed(const CheckSpec& s, const ExperimentConfig& cfg) {
  return param<std::uint64_t>(s, "seed", cfg.seed);
}

void require_positive(const CheckSpec& s, const char* key, double x) {
  if (!(x > 0.0)) throw ConfigError("check \"" + s.name + "\": parameter \"" + key + "\" must be > 0");
}

FieldBatch make_batch(const CheckSpec& s, const ExperimentConfig& cfg) {
  FieldBatch b;
  b.seed = check_seed(s, cfg);
  b.trials = param<std::size_t>(s, "trials", 100);
  b.dim = param<int>(s, "dim", 2);
  if (b.dim < 1) throw ConfigError("check \"" + s.name + "\": parameter \"dim\" must be >= 1");
  if (s.params.contains("space")) {
    b.space = space_from_json(s.params.at("space"));
  } else if (s.params.contains("factors")) {
    b.space = FiniteProductSpace::uniform(param<std::vector<int>>(s, "factors", {}));
  } else if (cfg.field) {
    b.fields.push_back(field_from_json(*cfg.field));
    b.space = b.fields.front().space_ptr();
    b.dim = b.fields.front().dim();
  } else {
    b.space = default_check_space();
  }
  if (s.negative_control) b.audit_measure = perturbed_measure(*b.space, param<double>(s, "perturb", 0.3));
  return b;
}

std::vector<ScalarFunction> family(const CheckSpec& s) {
  const auto name = param<std::string>(s, "family", "admissible");
  if (name == "admissible") return admissible_functions();
  if (name == "concave") return {concave_psi_function()};
  for (const auto& f : admissible_functions())
    if (f.name == name) return {f};
  if (name == concave_psi_function().name) return {concave_psi_function()};
  throw ConfigError("check \"" + s.name + "\": unknown function family \"" + name + "\"");
}

const std::vector<double> kTGrid = {0.25, 1.0, 4.0};

ConcentrationModel config_model(const CheckSpec& s, const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("check \"" + s.name + "\" needs a \"model\" in the config");
  return model_from_json(*cfg.model);
}

}  // namespace

const std::vector<CatalogEntry>& check_catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> e;
    for (const auto& c : check_table()) e.push_back(c.entry);
    return e;
  }();
  return entries;
}

bool is_known_check(const std::string& name) {
  return std::any_of(check_table().begin(), check_table().end(),
                     [&](const CheckInfo& c) { return c.entry.name == name; });
}

const std::vector<PresetEntry>& preset_catalog() {
  static const std::vector<PresetEntry> p = {
      {"gaussian_series", "tail curve for a 2x2 Gaussian series with three fixed coefficients"},
      {"sphere_I", "tail curve for a linear map on the sphere S^10"},
      {"sphere_II", "tail curve for the quadratic map sum x_i^2 A_i on the sphere"},
      {"so_conjugation", "tail curve for sum O_i A_i O_i^T with Haar rotations"},
      {"finite_suite", "exact finite-engine identity and inequality suite"},
      {"negative_controls", "checks expected to fail: small c, perturbed measures, concave psi"},
  };
  return p;
}

std::string model_description(const std::string& kind) {
  static const std::map<std::string, std::string> d = {
      {"gaussian-series", "sum g_i A_i with standard normal g_i (c = 1)"},
      {"sphere-linear", "sum x_i A_i for x uniform on S^n (c = 1/(n-1))"},
      {"sphere-quadratic", "sum x_i^2 A_i for x uniform on S^n (c = 1/(n-1))"},
      {"so-conjugation", "sum O_i A_i O_i^T for Haar O_i in SO(d) (c = 4/(d-1))"},
      {"langevin", "sum z_i A_i under exp(-eta|z|^2/2 - |z|^4/4), Langevin sampler (c = 1/eta)"},
  };
  const auto it = d.find(kind);
  return it == d.end() ? std::string() : it->second;
}

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  static const std::set<std::string> known = {"seed", "model", "field", "checks", "experiment", "output"};
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw ConfigError("config: unknown field \"" + k + "\"");
  ExperimentConfig cfg;
  if (seed_override) {
    cfg.seed = *seed_override;
  } else if (!j.contains("seed")) {
    throw ConfigError("config: field \"seed\" is required");
  } else if (!j.at("seed").is_number_unsigned()) {
    throw ConfigError("config: field \"seed\" must be a non-negative integer");
  } else {
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("model")) {
    cfg.model = j.at("model");
    try {
      (void)model_from_json(*cfg.model);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: field \"model\": ") + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: field \"model\": ") + e.what());
    }
  }
  if (j.contains("field")) {
    cfg.field = j.at("field");
    try {
      (void)field_from_json(*cfg.field);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: field \"field\": ") + e.what());
    }
  }
  if (j.contains("checks")) {
    const auto& checks = j.at("checks");
    if (!checks.is_array()) throw ConfigError("config: field \"checks\" must be an array");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      const std::string where = "config: checks[" + std::to_string(i) + "]";
      CheckSpec spec;
      if (c.is_string()) {
        spec.name = c.get<std::string>();
      } else if (c.is_object() && c.contains("name") && c.at("name").is_string()) {
        spec.name = c.at("name").get<std::string>();
        if (c.contains("params")) {
          if (!c.at("params").is_object()) throw ConfigError(where + ".params must be an object");
          spec.params = c.at("params");
        }
        if (c.contains("negative_control")) {
          if (!c.at("negative_control").is_boolean())
            throw ConfigError(where + ".negative_control must be a boolean");
          spec.negative_control = c.at("negative_control").get<bool>();
        }
        for (const auto& [k, _] : c.items())
          if (k != "name" && k != "params" && k != "negative_control")
            throw ConfigError(where + ": unknown field \"" + k + "\"");
      } else {
        throw ConfigError(where + ": expected a check name or {\"name\": ...}");
      }
      if (!is_known_check(spec.name)) throw ConfigError(where + ": unknown check \"" + spec.name + "\"");
      const auto& allowed = check_info(spec.name).params;
      for (const auto& [k, _] : spec.params.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
          throw ConfigError(where + ".params: unknown parameter \"" + k + "\" for check \"" + spec.name + "\"");
      const auto group = check_info(spec.name).entry.group;
      if (group == "monte-carlo" && !cfg.model) throw ConfigError(where + ": check \"" + spec.name + "\" needs a \"model\"");
      if (spec.name == "bakry-emery" && spec.params.value("on", std::string("finite")) == "model") {
        if (!cfg.model) throw ConfigError(where + ": bakry-emery on the model needs a \"model\"");
        const auto kind = cfg.model->at("kind").get<std::string>();
        if (kind != "gaussian-series" && kind != "langevin")
          throw ConfigError(where + ": bakry-emery is not available for model \"" + kind +
                            "\" (no second-order carre du champ; its constant is an input)");
      }
      cfg.checks.push_back(std::move(spec));
    }
  }
  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    if (!e.is_object()) throw ConfigError("config: field \"experiment\" must be an object");
    try {
      if (e.contains("samples")) cfg.experiment.samples = e.at("samples").get<std::size_t>();
      if (e.contains("t_grid")) cfg.experiment.t_grid = e.at("t_grid").get<std::vector<double>>();
      if (e.contains("branch")) cfg.experiment.branch = tail_branch_from_string(e.at("branch").get<std::string>());
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("config: field \"experiment\": ") + ex.what());
    }
    for (const auto& [k, _] : e.items())
      if (k != "samples" && k != "t_grid" && k != "branch")
        throw ConfigError("config: experiment: unknown field \"" + k + "\"");
    if (cfg.experiment.samples < 2) throw ConfigError("config: experiment.samples must be >= 2");
    for (double t : cfg.experiment.t_grid)
      if (!(t >= 0.0)) throw ConfigError("config: experiment.t_grid entries must be >= 0");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) throw ConfigError("config: field \"output\" must be an object");
    cfg.output_path = o.value("path", std::string());
    cfg.format = o.value("format", std::string());
    if (!cfg.format.empty() && cfg.format != "json" && cfg.format != "csv")
      throw ConfigError("config: output.format must be \"json\" or \"csv\"");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config \"" + path + "\"");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config \"" + path + "\": " + e.what());
  }
  return parse_config(j, seed_override);
}

VerificationReport run_check(const CheckSpec& s, const ExperimentConfig& cfg) {
  const std::string& n = s.name;
  const double tol_default = n == "dissipation" ? 1e-6 : (n == "so-gamma-oracle" ? 1e-3 : 1e-10);
  const double tol = param<double>(s, "tol", tol_default);
  const auto t_grid = param<std::vector<double>>(s, "t_grid", kTGrid);
  VerificationReport r;

  if (n == "bakry-emery" && param<std::string>(s, "on", "finite") == "model") {
    const auto m = config_model(s, cfg);
    r = check_bakry_emery(m, param<std::size_t>(s, "trials", 100), check_seed(s, cfg), param<double>(s, "c", m.c),
                          tol);
  } else if (check_info(n).entry.group == "exact") {
    const FieldBatch b = make_batch(s, cfg);
    const double c = param<double>(s, "c", 2.0);
    require_positive(s, "c", c);
    if (n == "bakry-emery") r = check_bakry_emery(b, c, tol);
    else if (n == "local-ergodicity") r = check_local_ergodicity(b, t_grid, c, tol);
    else if (n == "local-poincare") r = check_local_poincare(b, t_grid, c, tol);
    else if (n == "variance-ergodicity") r = check_variance_ergodicity(b, t_grid, param<double>(s, "alpha", 1.0), tol);
    else if (n == "matrix-poincare") r = check_matrix_poincare(b, param<double>(s, "alpha", 1.0), tol);
    else if (n == "jensen") r = check_jensen(b, t_grid, param<std::vector<double>>(s, "q_list", {1.0, 2.0, 3.0}), tol);
    else if (n == "chain-rule") r = check_chain_rule(b, family(s), tol);
    else if (n == "poly-moment")
      r = check_poly_theorem(b, param<std::vector<double>>(s, "q_list", {1.0, 1.5, 2.0, 3.0}), c, tol);
    else if (n == "mgf-moment")
      r = check_mgf_theorem(b, param<std::vector<double>>(s, "betas", {1.0, 10.0, 100.0}), c, tol);
    else if (n == "reversibility") r = check_reversibility(b, t_grid, tol);
    else if (n == "generator-symmetry") r = check_generator_symmetry(b, tol);
    else if (n == "triple-product") r = check_triple_product(b, tol);
    else if (n == "dimension-reduction") r = check_dimension_reduction(b, tol);
    else if (n == "dissipation") r = check_dissipation(b, t_grid, tol);
    else if (n == "semigroup-law") r = check_semigroup_law(b, tol);
    else r = check_gamma_identities(b, tol);
  } else if (n == "mean-value-trace") {
    r = check_mean_value(param<std::size_t>(s, "trials", 10000), param<int>(s, "dim", 3), check_seed(s, cfg),
                         family(s), param<double>(s, "tol", 1e-9));
  } else if (n == "young-entropy") {
    r = check_young_entropy(param<std::size_t>(s, "trials", 10000), param<int>(s, "dim", 3), check_seed(s, cfg),
                            param<double>(s, "tol", 1e-9));
  } else if (n == "tail-dominance") {
    r = check_tail_dominance(config_model(s, cfg), param<std::size_t>(s, "samples", 100000), param<std::vector<double>>(s, "t_grid", {}),
                             check_seed(s, cfg), tail_branch_from_string(param<std::string>(s, "branch", "lambda_max")));
  } else if (n == "expectation-bound") {
    r = check_expectation_bound(config_model(s, cfg), param<std::size_t>(s, "samples", 100000), check_seed(s, cfg));
  } else if (n == "sphere-gamma-oracle") {
    r = check_sphere_gamma(param<int>(s, "n", 10), param<int>(s, "dim", 2), param<std::size_t>(s, "trials", 100),
                           check_seed(s, cfg), param<double>(s, "tol", 1e-9));
  } else if (n == "so-gamma-oracle") {
    r = check_so_gamma(param<int>(s, "d", 3), param<int>(s, "n", 3), param<std::size_t>(s, "trials", 100),
                       check_seed(s, cfg), tol);
  } else if (n == "skew-basis") {
    r = check_skew_basis(param<int>(s, "d", 4), param<std::size_t>(s, "trials", 10000), check_seed(s, cfg),
                         param<double>(s, "tol", 1e-12));
  } else if (n == "haar-invariants") {
    r = check_haar(param<int>(s, "d", 4), param<std::size_t>(s, "trials", 1000), check_seed(s, cfg), tol);
  } else {
    throw ConfigError("unknown check \"" + n + "\"");
  }
  r.negative_control = s.negative_control;
  if (s.negative_control) r.details["failed_as_expected"] = !r.passed();
  return r;
}

std::vector<VerificationReport> run_verify(const ExperimentConfig& cfg, int jobs) {
  const std::size_t n = cfg.checks.size();
  std::vector<VerificationReport> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = run_check(cfg.checks[i], cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1, jobs), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

bool suite_passed(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.negative_control || r.passed(); });
}

std::string reports_to_jsonl(const std::vector<VerificationReport>& reports, bool include_timing) {
  std::string s;
  for (const auto& r : reports) s += report_to_json(r, include_timing).dump() + "\n";
  return s;
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  std::string s = "v,name,status,margin,tolerance,trials,seed,negative_control\n";
  for (const auto& r : reports) {
    s += "1," + r.name + "," + to_string(r.status) + "," + format_double(r.margin) + "," +
         format_double(r.tolerance) + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) + "," +
         (r.negative_control ? "true" : "false") + "\n";
  }
  return s;
}

std::string reports_table(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  char line[256];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-14s %-22s margin %+.3e  tol %.1e  trials %zu%s\n", to_string(r.status),
                  r.name.c_str(), r.margin, r.tolerance, r.trials, r.negative_control ? "  (negative control)" : "");
    os << line;
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("experiment: config needs a \"model\"");
  ExperimentResult r{model_from_json(*cfg.model), {}, {}};
  r.curve = mc_tail_curve(r.model, cfg.experiment.samples, cfg.experiment.t_grid, cfg.seed, cfg.experiment.branch);
  for (const auto& p : r.curve.points) {
    const double bound = model_tail_bound(r.model, cfg.experiment.branch, p.t);
    r.rows.push_back({p.t, p.tail.value, p.tail.stderr_, bound, p.tail.value - 4.0 * p.tail.stderr_ <= bound});
  }
  return r;
}

std::string experiment_to_csv(const ExperimentResult& r) {
  std::string s = "v,t,empirical,stderr,bound,pass\n";
  for (const auto& row : r.rows) {
    s += "1," + format_double(row.t) + "," + format_double(row.empirical) + "," + format_double(row.stderr_) + "," +
         format_double(row.bound) + "," + (row.pass ? "true" : "false") + "\n";
  }
  return s;
}

std::string experiment_to_json(const ExperimentResult& r, const ExperimentConfig& cfg) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t}, {"empirical", row.empirical}, {"stderr", row.stderr_}, {"bound", row.bound},
                    {"pass", row.pass}});
  json j = {{"v", 1},
            {"model", r.model.kind},
            {"d", r.model.dim},
            {"c", r.model.c},
            {"v_f", r.model.v},
            {"branch", to_string(cfg.experiment.branch)},
            {"samples", r.curve.samples},
            {"seed", r.curve.seed},
            {"pilot_stderr", r.curve.pilot_stderr},
            {"rows", rows}};
  return j.dump() + "\n";
}

json bounds_table(const BoundsQuery& q) {
  json rows = json::array();
  auto add = [&](const char* kind, const char* var, double x, double value) {
    rows.push_back({{"kind", kind}, {"var", var}, {"x", x}, {"value", value}});
  };
  for (double t : q.t_grid) {
    const double tail = subgaussian_tail(q.d, q.c, q.v, t);
    add("tail", "t", t, tail);
    add("two-sided-tail", "t", t, two_sided(tail));
  }
  for (double p : q.q_list) {
    add("moment-coefficient", "q", p, poly_moment_bound(q.c, p, 1.0));
    add("moment-bound", "q", p, poly_moment_bound_uniform(q.c, p, q.d, q.v));
  }
  add("expectation", "-", 0.0, expectation_bound(q.d, q.c, q.v));
  return {{"v", 1}, {"d", q.d}, {"c", q.c}, {"v_f", q.v}, {"rows", rows}};
}

std::string bounds_to_csv(const json& table) {
  std::string s = "v,kind,var,x,value\n";
  for (const auto& r : table.at("rows")) {
    s += "1," + r.at("kind").get<std::string>() + "," + r.at("var").get<std::string>() + "," +
         format_double(r.at("x").get<double>()) + "," + format_double(r.at("value").get<double>()) + "\n";
  }
  return s;
}

}  // namespace matconc
