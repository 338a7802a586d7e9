#include "matconc/verify.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "matconc/field_io.hpp"

namespace matconc {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::PassMarginal: return "pass-marginal";
    case CheckStatus::Fail: return "fail";
  }
  return "fail";
}

json report_to_json(const VerificationReport& r, bool include_timing) {
  json j = {{"v", 1},
            {"name", r.name},
            {"status", to_string(r.status)},
            {"margin", r.margin},
            {"tolerance", r.tolerance},
            {"trials", r.trials},
            {"seed", r.seed}};
  if (!r.witness.is_null()) j["witness"] = r.witness;
  if (r.negative_control) j["negative_control"] = true;
  if (!r.details.empty()) j["details"] = r.details;
  j["elapsed_s"] = include_timing ? json(r.elapsed_s) : json(nullptr);
  return j;
}

MarginTracker::MarginTracker()
    : worst_(std::numeric_limits<double>::infinity()), start_(std::chrono::steady_clock::now()) {}

void MarginTracker::observe(double margin, const std::function<json()>& witness) {
  ++count_;
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  if (margin < worst_) {
    worst_ = margin;
    witness_ = witness ? witness() : json();
    witness_["margin"] = margin;
  }
}

VerificationReport MarginTracker::finish(std::string name, CheckKind kind, double tolerance, std::size_t trials,
                                         std::uint64_t seed) const {
  VerificationReport r;
  r.name = std::move(name);
  r.kind = kind;
  r.margin = count_ == 0 ? 0.0 : worst_;
  r.tolerance = tolerance;
  r.witness = witness_;
  r.trials = trials;
  r.seed = seed;
  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  if (!(r.margin >= -tolerance)) {
    r.status = CheckStatus::Fail;
  } else if (kind == CheckKind::Inequality && r.margin < 0.0) {
    r.status = CheckStatus::PassMarginal;
  } else {
    r.status = CheckStatus::Pass;
  }
  return r;
}

double psd_slack(const HermitianMatrix& lhs, const HermitianMatrix& rhs) { return psd_margin(lhs, rhs); }

double scalar_slack(double lhs, double rhs) { return (rhs - lhs) / (1.0 + std::abs(lhs) + std::abs(rhs)); }

double identity_margin(const ComplexMatrix& a, const ComplexMatrix& b) {
  return -(a - b).norm() / (1.0 + a.norm() + b.norm());
}

MatrixField FieldBatch::draw(std::size_t trial, int slot) const {
  if (!fields.empty()) return fields[(trial + static_cast<std::size_t>(slot)) % fields.size()];
  Rng rng = Rng::stream(seed, 8 * static_cast<std::uint64_t>(trial) + static_cast<std::uint64_t>(slot));
  return random_field(space, dim, rng);
}

SpacePtr default_check_space() { return FiniteProductSpace::uniform({2, 3, 2}); }

SpacePtr perturbed_measure(const FiniteProductSpace& s, double strength) {
  std::vector<std::vector<double>> w;
  for (int i = 0; i < s.num_factors(); ++i) {
    std::vector<double> wi = s.weights(i);
    double sum = 0.0;
    for (std::size_t k = 0; k < wi.size(); ++k) {
      wi[k] *= 1.0 + strength * (k % 2 == 0 ? 1.0 : -1.0);
      sum += wi[k];
    }
    for (double& x : wi) x /= sum;
    w.push_back(std::move(wi));
  }
  return FiniteProductSpace::make(std::move(w));
}

namespace {

HermitianMatrix herm(const ComplexMatrix& m) { return HermitianMatrix::hermitian_part(m); }

json field_witness(const FieldBatch& b, std::size_t trial, std::size_t state, double margin,
                   const MatrixField* field) {
  json w = {{"trial", trial}, {"state", state}};
  if (b.fields.empty()) w["stream"] = 8 * trial;
  if (margin < 0.0 && field) w["field"] = field_to_json(*field);
  return w;
}

// Pointwise psd comparison lhs(z) <= rhs(z) for all states.
void observe_pointwise(MarginTracker& tr, const FieldBatch& b, std::size_t trial, const MatrixField& f,
                       const MatrixField& lhs, const MatrixField& rhs, json extra = json::object()) {
  for (std::size_t z = 0; z < lhs.size(); ++z) {
    const double m = psd_slack(herm(lhs[z]), herm(rhs[z]));
    tr.observe(m, [&] {
      json w = field_witness(b, trial, z, m, &f);
      w.update(extra);
      return w;
    });
  }
}

MatrixField scaled(const MatrixField& f, double s) { return f * Complex(s, 0.0); }

}  // namespace

VerificationReport check_bakry_emery(const FieldBatch& b, double c, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto g = carre_du_champ(f);
    const auto g2 = carre_du_champ2(f);
    for (std::size_t z = 0; z < f.size(); ++z) {
      const HermitianMatrix gz = herm(g[z]), g2z = herm(g2[z]);
      const double m = lambda_min(c * g2z - gz) / (1.0 + op_norm(g2z));
      tr.observe(m, [&] { return field_witness(b, k, z, m, &f); });
    }
  }
  auto r = tr.finish("bakry-emery", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["c"] = c;
  return r;
}

namespace {

MatrixValuedMap random_quadratic_map(int n, int d, Rng& rng) {
  HermitianMatrix a0 = random_hermitian(d, rng);
  std::vector<HermitianMatrix> bs, cs(n * n, HermitianMatrix::zero(d));
  for (int i = 0; i < n; ++i) bs.push_back(random_hermitian(d, rng));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cs[i * n + j] = random_hermitian(d, rng);
      cs[j * n + i] = cs[i * n + j];
    }
  return quadratic_map(a0, bs, cs);
}

VerificationReport bakry_emery_on_maps(const LogConcaveModel& m, const std::function<MatrixValuedMap(Rng&)>& make,
                                       std::size_t trials, std::uint64_t seed, double c, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    const auto f = make(rng);
    RealVector z(m.n);
    for (int i = 0; i < m.n; ++i) z(i) = rng.normal();
    const auto g = gamma_euclidean(f, z);
    const auto g2 = gamma2_euclidean(f, m, z);
    const double margin = lambda_min(c * g2 - g) / (1.0 + op_norm(g2));
    tr.observe(margin, [&] { return json{{"trial", k}, {"point", std::vector<double>(z.data(), z.data() + z.size())}}; });
  }
  auto r = tr.finish("bakry-emery", CheckKind::Inequality, tol, trials, seed);
  r.details["c"] = c;
  return r;
}

}  // namespace

VerificationReport check_bakry_emery(const LogConcaveModel& m, int dim, std::size_t trials, std::uint64_t seed,
                                     double c, double tol) {
  const int n = m.n;
  return bakry_emery_on_maps(m, [n, dim](Rng& rng) { return random_quadratic_map(n, dim, rng); }, trials, seed, c,
                             tol);
}

VerificationReport check_bakry_emery(const ConcentrationModel& m, std::size_t trials, std::uint64_t seed, double c,
                                     double tol) {
  if (m.kind == "gaussian-series" || m.kind == "langevin") {
    const auto lc = m.kind == "gaussian-series" ? LogConcaveModel::standard_gaussian(m.n)
                                                : LogConcaveModel::quartic(m.n, 1.0 / m.c);
    const auto f = linear_map(m.coefficients);
    return bakry_emery_on_maps(lc, [f](Rng&) { return f; }, trials, seed, c, tol);
  }
  throw DomainError("bakry-emery: no second-order carre du champ is implemented for model \"" + m.kind +
                    "\"; its constant c = " + std::to_string(m.c) + " is taken as an input");
}

VerificationReport check_local_ergodicity(const FieldBatch& b, const std::vector<double>& t_grid, double c,
                                          double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto gf = carre_du_champ(f);
    for (double t : t_grid) {
      const auto lhs = carre_du_champ(semigroup_apply(f, t));
      const auto rhs = scaled(semigroup_apply(gf, t), std::exp(-2.0 * t / c));
      observe_pointwise(tr, b, k, f, lhs, rhs, {{"t", t}});
    }
  }
  auto r = tr.finish("local-ergodicity", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["c"] = c;
  return r;
}

VerificationReport check_local_poincare(const FieldBatch& b, const std::vector<double>& t_grid, double c,
                                        double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto gf = carre_du_champ(f);
    const auto f2 = product(f, f);
    for (double t : t_grid) {
      const auto ptf = semigroup_apply(f, t);
      const auto lhs = semigroup_apply(f2, t) - product(ptf, ptf);
      const auto rhs = scaled(semigroup_apply(gf, t), c * (-std::expm1(-2.0 * t / c)));
      observe_pointwise(tr, b, k, f, lhs, rhs, {{"t", t}});
    }
  }
  auto r = tr.finish("local-poincare", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["c"] = c;
  return r;
}

VerificationReport check_variance_ergodicity(const FieldBatch& b, const std::vector<double>& t_grid, double alpha,
                                             double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto var = matrix_variance(f);
    for (double t : t_grid) {
      const auto lhs = matrix_variance(semigroup_apply(f, t));
      const double m = psd_slack(lhs, std::exp(-2.0 * t / alpha) * var);
      tr.observe(m, [&] { return json{{"trial", k}, {"t", t}}; });
    }
  }
  auto r = tr.finish("variance-ergodicity", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["alpha"] = alpha;
  return r;
}

VerificationReport check_matrix_poincare(const FieldBatch& b, double alpha, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const double m = psd_slack(matrix_variance(f), alpha * herm(dirichlet_form(f, f)));
    tr.observe(m, [&] { return json{{"trial", k}}; });
  }
  auto r = tr.finish("matrix-poincare", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["alpha"] = alpha;
  return r;
}

namespace {

double positive_trace_moment(const MatrixField& g, double q) {
  double acc = 0.0;
  for (std::size_t z = 0; z < g.size(); ++z) {
    const RealVector lam = eig(g.hermitian_at(z)).values;
    double s = 0.0;
    for (int i = 0; i < lam.size(); ++i) s += std::pow(std::max(lam(i), 0.0), q);
    acc += g.space().probability(z) * s;
  }
  return acc;
}

}  // namespace

VerificationReport check_jensen(const FieldBatch& b, const std::vector<double>& t_grid,
                                const std::vector<double>& q_list, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto gf = carre_du_champ(f);
    for (double t : t_grid) {
      const auto pg = semigroup_apply(gf, t);
      for (double q : q_list) {
        const double lhs = positive_trace_moment(pg, q), rhs = positive_trace_moment(gf, q);
        const double m = scalar_slack(lhs, rhs);
        tr.observe(m, [&] { return json{{"trial", k}, {"t", t}, {"q", q}, {"lhs", lhs}, {"rhs", rhs}}; });
      }
    }
  }
  return tr.finish("jensen", CheckKind::Inequality, tol, b.count(), b.seed);
}

std::vector<ScalarFunction> admissible_functions() {
  auto sgnpow = [](double p) {
    return [p](double x) { return (x < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(x), p); };
  };
  auto abspow = [](double p, double s) { return [p, s](double x) { return s * std::pow(std::abs(x), p); }; };
  std::vector<ScalarFunction> out = {
      {"identity", [](double x) { return x; }, [](double) { return 1.0; }},
      {"cube", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }},
  };
  for (double q : {1.5, 2.0, 3.0}) {
    const double p = 2.0 * q - 1.0;
    out.push_back({"signed-power-" + format_double(p), sgnpow(p), abspow(p - 1.0, p)});
  }
  for (double th : {0.5, -0.5, 1.0, -1.0}) {
    out.push_back({"exp-" + format_double(th), [th](double x) { return std::exp(th * x); },
                   [th](double x) { return std::abs(th) * std::exp(th * x); }});
  }
  return out;
}

ScalarFunction concave_psi_function() {
  // psi = exp(-x^2) is concave near 0 and small at the endpoints of long intervals through 0.
  return {"gaussian-bump",
          [](double x) { return 0.5 * std::sqrt(std::numbers::pi) * std::erf(x); },
          [](double x) { return std::exp(-x * x); }};
}

VerificationReport check_chain_rule(const FieldBatch& b, const std::vector<ScalarFunction>& family, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    const auto g = b.draw(k, 1);
    const auto gf = carre_du_champ(f), gg = carre_du_champ(g);
    for (const auto& fn : family) {
      const auto pf = f.map(fn.phi);
      const auto sf = f.map(fn.psi);
      const double lhs = expectation(carre_du_champ(g, pf)).trace().real();
      const double a = expectation(product(gf, sf)).trace().real();
      const double c = expectation(product(gg, sf)).trace().real();
      const double rhs = std::sqrt(std::max(a, 0.0) * std::max(c, 0.0));
      const double m = scalar_slack(lhs, rhs);
      tr.observe(m, [&] { return json{{"trial", k}, {"phi", fn.name}, {"lhs", lhs}, {"rhs", rhs}}; });
    }
  }
  return tr.finish("chain-rule", CheckKind::Inequality, tol, b.count(), b.seed);
}

VerificationReport check_poly_theorem(const FieldBatch& b, const std::vector<double>& q_list, double c, double tol) {
  MarginTracker tr;
  std::size_t strictly_positive = 0;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    bool all_positive = true;
    for (double q : q_list) {
      const double lhs = std::pow(trace_moment(f, 2.0 * q), 1.0 / (2.0 * q));
      const double rhs = poly_moment_bound(c, q, gamma_trace_moment(f, q));
      const double m = scalar_slack(lhs, rhs);
      all_positive = all_positive && rhs - lhs > 0.0;
      tr.observe(m, [&] { return json{{"trial", k}, {"q", q}, {"lhs", lhs}, {"rhs", rhs}}; });
    }
    if (all_positive) ++strictly_positive;
  }
  auto r = tr.finish("poly-moment", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["c"] = c;
  r.details["strictly_positive_fraction"] =
      b.count() == 0 ? 1.0 : static_cast<double>(strictly_positive) / static_cast<double>(b.count());
  return r;
}

VerificationReport check_mgf_theorem(const FieldBatch& b, const std::vector<double>& betas, double c, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    for (double beta : betas) {
      const double r = r_beta(f, beta);
      const double edge = std::sqrt(beta / c);
      for (int j = -5; j <= 5; ++j) {
        const double theta = j / 6.0 * edge;
        const double lhs = log_trace_mgf(f, theta);
        const double rhs = mgf_bound(c, theta, beta, r);
        const double m = scalar_slack(lhs, rhs);
        tr.observe(m, [&] { return json{{"trial", k}, {"beta", beta}, {"theta", theta}, {"lhs", lhs}, {"rhs", rhs}}; });
      }
    }
  }
  auto r = tr.finish("mgf-moment", CheckKind::Inequality, tol, b.count(), b.seed);
  r.details["c"] = c;
  return r;
}

namespace {

VerificationReport finish_identity(const MarginTracker& tr, const char* name, const FieldBatch& b, double tol) {
  auto r = tr.finish(name, CheckKind::Identity, tol, b.count(), b.seed);
  if (b.audit_measure) r.details["audit_measure"] = space_to_json(*b.audit_measure);
  return r;
}

}  // namespace

VerificationReport check_reversibility(const FieldBatch& b, const std::vector<double>& t_grid, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0), g = b.draw(k, 1);
    for (double t : t_grid) {
      const auto lhs = expectation(product(semigroup_apply(f, t), g), b.measure());
      const auto rhs = expectation(product(f, semigroup_apply(g, t)), b.measure());
      const double m = identity_margin(lhs, rhs);
      tr.observe(m, [&] { return json{{"trial", k}, {"t", t}}; });
    }
  }
  return finish_identity(tr, "reversibility", b, tol);
}

VerificationReport check_generator_symmetry(const FieldBatch& b, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0), g = b.draw(k, 1);
    const auto lhs = expectation(product(generator_apply(f), g), b.measure());
    const auto rhs = expectation(product(f, generator_apply(g)), b.measure());
    const double m = identity_margin(lhs, rhs);
    tr.observe(m, [&] { return json{{"trial", k}}; });
  }
  return finish_identity(tr, "generator-symmetry", b, tol);
}

VerificationReport check_triple_product(const FieldBatch& b, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0), g = b.draw(k, 1), h = b.draw(k, 2);
    const auto& s = f.space();
    const auto expr = generator_apply(product(product(f, g), h)) - product(generator_apply(product(f, g)), h) -
                      product(generator_apply(product(h, f)), g) - product(generator_apply(product(g, h)), f) +
                      product(product(generator_apply(f), g), h) + product(product(generator_apply(g), h), f) +
                      product(product(generator_apply(h), f), g);
    double mean = 0.0, scale = 0.0;
    for (std::size_t z = 0; z < f.size(); ++z) {
      const double tr_expr = expr[z].trace().real();
      // sum_i E_Z tr[(f' - f)(g' - g)(h' - h)] at z
      double direct = 0.0;
      for (int i = 0; i < s.num_factors(); ++i)
        for (int w = 0; w < s.factor_size(i); ++w) {
          const std::size_t zw = s.with_coordinate(z, i, w);
          direct += s.weight(i, w) * ((f[zw] - f[z]) * (g[zw] - g[z]) * (h[zw] - h[z])).trace().real();
        }
      const double m = -std::abs(tr_expr - direct) / (1.0 + std::abs(tr_expr) + std::abs(direct));
      tr.observe(m, [&] { return json{{"trial", k}, {"state", z}, {"part", "pointwise"}}; });
      mean += b.measure().probability(z) * tr_expr;
      scale = std::max(scale, std::abs(tr_expr));
    }
    const double m = -std::abs(mean) / (1.0 + scale);
    tr.observe(m, [&] { return json{{"trial", k}, {"part", "mean"}, {"mean", mean}}; });
  }
  return finish_identity(tr, "triple-product", b, tol);
}

VerificationReport check_dimension_reduction(const FieldBatch& b, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    Rng rng = Rng::stream(b.seed ^ 0x5bd1e995ULL, k);
    Eigen::VectorXcd u(f.dim());
    for (int i = 0; i < f.dim(); ++i) u(i) = Complex(rng.normal(), rng.normal());
    u.normalize();
    const auto gf = carre_du_champ(f);
    std::vector<double> sum(f.size(), 0.0);
    for (int j = 0; j < f.dim(); ++j)
      for (bool im : {false, true}) {
        const auto gj = carre_du_champ(entry_field(f, u, j, im));
        for (std::size_t z = 0; z < f.size(); ++z) sum[z] += gj[z](0, 0).real();
      }
    for (std::size_t z = 0; z < f.size(); ++z) {
      const Complex lhs = u.dot(gf[z] * u);
      const double m = -std::abs(lhs - sum[z]) / (1.0 + std::abs(lhs) + std::abs(sum[z]));
      tr.observe(m, [&] { return json{{"trial", k}, {"state", z}}; });
    }
  }
  return finish_identity(tr, "dimension-reduction", b, tol);
}

VerificationReport check_dissipation(const FieldBatch& b, const std::vector<double>& t_grid, double tol) {
  MarginTracker tr;
  const double h = 1e-5;
  const auto& mu = b.measure();
  const auto variance = [&](const MatrixField& f) -> ComplexMatrix {
    const ComplexMatrix m = expectation(f, mu);
    return expectation(product(f, f), mu) - m * m;
  };
  const auto energy = [&](const MatrixField& f) -> ComplexMatrix { return expectation(carre_du_champ(f), mu); };
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    for (double t : t_grid) {
      if (t <= h) throw DomainError("dissipation: t must exceed the difference step 1e-5");
      const auto fp = semigroup_apply(f, t + h), fm = semigroup_apply(f, t - h), ft = semigroup_apply(f, t);
      const ComplexMatrix dvar = (variance(fp) - variance(fm)) / (2.0 * h);
      double m = identity_margin(dvar, -2.0 * energy(ft));
      tr.observe(m, [&] { return json{{"trial", k}, {"t", t}, {"part", "variance"}}; });
      const ComplexMatrix denergy = (energy(fp) - energy(fm)) / (2.0 * h);
      const auto lft = generator_apply(ft);
      const ComplexMatrix l2 = expectation(product(lft, lft), mu);
      m = identity_margin(denergy, -2.0 * l2);
      tr.observe(m, [&] { return json{{"trial", k}, {"t", t}, {"part", "energy"}}; });
    }
  }
  return finish_identity(tr, "dissipation", b, tol);
}

VerificationReport check_semigroup_law(const FieldBatch& b, double tol) {
  MarginTracker tr;
  const std::vector<double> grid = {0.1, 0.5, 1.0};
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0);
    for (double s : grid)
      for (double t : grid) {
        const auto lhs = semigroup_apply(semigroup_apply(f, s), t);
        const auto rhs = semigroup_apply(f, s + t);
        const auto fac = semigroup_apply_factorized(f, s + t);
        for (std::size_t z = 0; z < f.size(); ++z) {
          const double m = std::min(identity_margin(lhs[z], rhs[z]), identity_margin(fac[z], rhs[z]));
          tr.observe(m, [&] { return json{{"trial", k}, {"s", s}, {"t", t}, {"state", z}}; });
        }
      }
  }
  return finish_identity(tr, "semigroup-law", b, tol);
}

VerificationReport check_gamma_identities(const FieldBatch& b, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < b.count(); ++k) {
    const auto f = b.draw(k, 0), g = b.draw(k, 1);
    const auto g1 = carre_du_champ(f, g), g1l = carre_du_champ_from_generator(f, g);
    const auto g2 = carre_du_champ2(f, g), g2l = carre_du_champ2_from_generator(f, g);
    for (std::size_t z = 0; z < f.size(); ++z) {
      double m = identity_margin(g1[z], g1l[z]);
      tr.observe(m, [&] { return json{{"trial", k}, {"state", z}, {"part", "gamma"}}; });
      m = identity_margin(g2[z], g2l[z]);
      tr.observe(m, [&] { return json{{"trial", k}, {"state", z}, {"part", "gamma2"}}; });
    }
    const auto lf = generator_apply(f);
    double m = identity_margin(expectation(carre_du_champ2(f)), expectation(product(lf, lf)));
    tr.observe(m, [&] { return json{{"trial", k}, {"part", "mean-gamma2"}}; });
    m = identity_margin(dirichlet_form(f, g), dirichlet_form_from_generator(f, g));
    tr.observe(m, [&] { return json{{"trial", k}, {"part", "dirichlet"}}; });
  }
  return finish_identity(tr, "gamma-identities", b, tol);
}

VerificationReport check_mean_value(std::size_t trials, int dim, std::uint64_t seed,
                                    const std::vector<ScalarFunction>& family, double tol) {
  MarginTracker tr;
  std::size_t violations = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    const auto a = random_hermitian(dim, rng), b = random_hermitian(dim, rng), c = random_hermitian(dim, rng);
    for (const auto& fn : family) {
      const double lhs = mean_value_lhs(a, b, c, fn.phi);
      const double rhs = mean_value_rhs(a, b, c, fn.psi);
      const double m = scalar_slack(lhs, rhs);
      if (m < -tol) ++violations;
      tr.observe(m, [&] {
        return json{{"trial", k}, {"phi", fn.name}, {"lhs", lhs}, {"rhs", rhs},
                    {"A", matrix_to_json(a.matrix())}, {"B", matrix_to_json(b.matrix())},
                    {"C", matrix_to_json(c.matrix())}};
      });
    }
  }
  auto r = tr.finish("mean-value-trace", CheckKind::Inequality, tol, trials, seed);
  r.details["violations"] = violations;
  r.details["evaluations"] = tr.observations();
  return r;
}

VerificationReport check_young_entropy(std::size_t trials, int dim, std::uint64_t seed, double tol) {
  MarginTracker tr;
  double gibbs_gap = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    const auto x = random_hermitian(dim, rng);
    const auto y = random_density(dim, rng);
    const auto s = young_entropy_check(x, y);
    tr.observe(scalar_slack(s.lhs, s.rhs), [&] { return json{{"trial", k}, {"lhs", s.lhs}, {"rhs", s.rhs}}; });
    const auto g = young_entropy_check(x, gibbs_density(x));
    const double gap = std::abs(g.rhs - g.lhs);
    gibbs_gap = std::max(gibbs_gap, gap);
    // equality case: a gap within tol counts as zero margin
    tr.observe(gap <= tol ? 0.0 : -gap, [&] { return json{{"trial", k}, {"part", "gibbs"}, {"lhs", g.lhs}, {"rhs", g.rhs}}; });
  }
  auto r = tr.finish("young-entropy", CheckKind::Inequality, tol, trials, seed);
  r.details["gibbs_max_gap"] = gibbs_gap;
  return r;
}

}  // namespace matconc
