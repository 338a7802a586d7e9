#include "matconc/models.hpp"

namespace matconc {

namespace {

class FunctionSampler : public MatrixSampler {
 public:
  FunctionSampler(Rng rng, std::function<HermitianMatrix(Rng&)> f) : rng_(std::move(rng)), f_(std::move(f)) {}
  HermitianMatrix draw() override { return f_(rng_); }

 private:
  Rng rng_;
  std::function<HermitianMatrix(Rng&)> f_;
};

class LangevinSampler : public MatrixSampler {
 public:
  LangevinSampler(MatrixValuedMap f, LangevinChain chain) : f_(std::move(f)), chain_(std::move(chain)) {}
  HermitianMatrix draw() override { return f_.evaluate(chain_.next()); }

 private:
  MatrixValuedMap f_;
  LangevinChain chain_;
};

double norm_of_square_sum(const std::vector<HermitianMatrix>& a) {
  ComplexMatrix acc = ComplexMatrix::Zero(a.front().dim(), a.front().dim());
  for (const auto& x : a) acc += x.matrix() * x.matrix();
  return op_norm(HermitianMatrix::hermitian_part(acc));
}

void check_coefficients(const std::vector<HermitianMatrix>& a, std::size_t min_count) {
  if (a.size() < min_count) {
    throw ConfigError("model needs at least " + std::to_string(min_count) + " coefficients");
  }
  for (const auto& x : a)
    if (x.dim() != a.front().dim()) throw ConfigError("model coefficients must share a dimension");
}

}  // namespace

ConcentrationModel gaussian_series_model(std::vector<HermitianMatrix> a) {
  check_coefficients(a, 1);
  ConcentrationModel m;
  m.kind = "gaussian-series";
  m.dim = a.front().dim();
  m.n = static_cast<int>(a.size());
  m.c = 1.0;
  m.v = norm_of_square_sum(a);
  m.coefficients = a;
  const auto f = linear_map(a);
  m.make_sampler = [f](Rng rng) -> std::unique_ptr<MatrixSampler> {
    return std::make_unique<FunctionSampler>(std::move(rng), [f](Rng& r) {
      RealVector z(f.coordinates);
      for (int i = 0; i < z.size(); ++i) z(i) = r.normal();
      return f.evaluate(z);
    });
  };
  return m;
}

ConcentrationModel sphere_linear_model(SphereModel s) {
  check_coefficients(s.a, 3);
  ConcentrationModel m;
  m.kind = "sphere-linear";
  m.dim = s.dim();
  m.n = s.n();
  m.c = 1.0 / (m.n - 1);
  m.v = variance_proxy_sphere_linear(s);
  m.coefficients = s.a;
  const auto f = linear_map(s.a, Domain::Sphere);
  const int n = m.n;
  m.make_sampler = [f, n](Rng rng) -> std::unique_ptr<MatrixSampler> {
    return std::make_unique<FunctionSampler>(std::move(rng),
                                             [f, n](Rng& r) { return f.evaluate(sphere_sample(n, r)); });
  };
  return m;
}

ConcentrationModel sphere_quadratic_model(SphereModel s) {
  check_coefficients(s.a, 3);
  ConcentrationModel m;
  m.kind = "sphere-quadratic";
  m.dim = s.dim();
  m.n = s.n();
  m.c = 1.0 / (m.n - 1);
  m.v = variance_proxy_sphere_quadratic(s).value;
  m.coefficients = s.a;
  const auto f = squares_map(s.a, Domain::Sphere);
  const int n = m.n;
  m.make_sampler = [f, n](Rng rng) -> std::unique_ptr<MatrixSampler> {
    return std::make_unique<FunctionSampler>(std::move(rng),
                                             [f, n](Rng& r) { return f.evaluate(sphere_sample(n, r)); });
  };
  return m;
}

ConcentrationModel so_conjugation_model(SOConjugationModel s) {
  validate(s);
  if (s.d() < 2) throw ConfigError("SO conjugation model needs d >= 2");
  ConcentrationModel m;
  m.kind = "so-conjugation";
  m.dim = s.d();
  m.n = s.n();
  m.c = 4.0 / (s.d() - 1);
  m.v = variance_proxy_so(s);
  for (const auto& a : s.a) m.coefficients.push_back(HermitianMatrix(a));
  m.make_sampler = [s](Rng rng) -> std::unique_ptr<MatrixSampler> {
    return std::make_unique<FunctionSampler>(std::move(rng), [s](Rng& r) {
      std::vector<RealMatrix> o;
      for (int i = 0; i < s.n(); ++i) o.push_back(so_sample_haar(s.d(), r));
      return so_conjugation_value(s, o);
    });
  };
  return m;
}

ConcentrationModel langevin_model(std::vector<HermitianMatrix> a, double eta, double h, long burn_in,
                                  long thinning) {
  check_coefficients(a, 1);
  if (!(eta > 0.0)) throw ConfigError("langevin model needs eta > 0");
  if (!(h > 0.0)) throw ConfigError("langevin model needs h > 0");
  ConcentrationModel m;
  m.kind = "langevin";
  m.dim = a.front().dim();
  m.n = static_cast<int>(a.size());
  m.c = 1.0 / eta;
  m.v = norm_of_square_sum(a);
  m.coefficients = a;
  const auto f = linear_map(a);
  const auto lc = LogConcaveModel::quartic(m.n, eta);
  m.make_sampler = [f, lc, h, burn_in, thinning](Rng rng) -> std::unique_ptr<MatrixSampler> {
    return std::make_unique<LangevinSampler>(f, LangevinChain(lc, h, std::move(rng), burn_in, thinning));
  };
  return m;
}

const std::vector<std::string>& model_kinds() {
  static const std::vector<std::string> kinds = {"gaussian-series", "sphere-linear", "sphere-quadratic",
                                                 "so-conjugation", "langevin"};
  return kinds;
}

ConcentrationModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("model needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (!j.contains("coefficients") || !j.at("coefficients").is_array()) {
    throw ConfigError("model needs a \"coefficients\" array");
  }
  std::vector<HermitianMatrix> a;
  for (const auto& c : j.at("coefficients")) a.push_back(hermitian_from_json(c));
  if (a.empty()) throw ConfigError("model needs at least one coefficient");

  if (kind == "gaussian-series") {
    if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(a.size())) {
      throw ConfigError("gaussian-series: \"n\" must equal the number of coefficients");
    }
    return gaussian_series_model(std::move(a));
  }
  if (kind == "sphere-linear" || kind == "sphere-quadratic") {
    if (j.contains("n") && j.at("n").get<int>() + 1 != static_cast<int>(a.size())) {
      throw ConfigError(kind + ": S^n needs n + 1 coefficients");
    }
    SphereModel s{std::move(a)};
    return kind == "sphere-linear" ? sphere_linear_model(std::move(s)) : sphere_quadratic_model(std::move(s));
  }
  if (kind == "so-conjugation") {
    SOConjugationModel s;
    for (const auto& h : a) {
      if (h.matrix().imag().cwiseAbs().maxCoeff() != 0.0) {
        throw ConfigError("so-conjugation coefficients must be real symmetric");
      }
      s.a.push_back(h.matrix().real());
    }
    return so_conjugation_model(std::move(s));
  }
  if (kind == "langevin") {
    const double eta = j.value("eta", 1.0);
    const double h = j.value("h", 0.01);
    const long burn_in = j.value("burn_in", -1L);
    const long thinning = j.value("thinning", -1L);
    return langevin_model(std::move(a), eta, h, burn_in, thinning);
  }
  throw ConfigError("unknown model kind \"" + kind + "\"");
}

}  // namespace matconc
