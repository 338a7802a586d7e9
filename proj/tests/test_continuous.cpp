#include <cmath>

#include "doctest.h"
#include "matconc/continuous.hpp"
#include "matconc/models.hpp"

using namespace matconc;

namespace {

HermitianMatrix herm2(double a, Complex b, double d) {
  ComplexMatrix m(2, 2);
  m << a, b, std::conj(b), d;
  return HermitianMatrix(m);
}

std::vector<HermitianMatrix> coefficients(int count, int d, Rng& rng) {
  std::vector<HermitianMatrix> a;
  for (int i = 0; i < count; ++i) a.push_back(random_hermitian(d, rng));
  return a;
}

HermitianMatrix sum_squares(const std::vector<HermitianMatrix>& a) {
  HermitianMatrix s = HermitianMatrix::zero(a.front().dim());
  for (const auto& x : a) s += x.squared();
  return s;
}

double diff(const HermitianMatrix& a, const HermitianMatrix& b) { return (a.matrix() - b.matrix()).norm(); }

RealVector unit(int n, int i) {
  RealVector e = RealVector::Zero(n);
  e(i) = 1.0;
  return e;
}

// f(z) = z_1^2 A
MatrixValuedMap first_square(const HermitianMatrix& a, int n) {
  MatrixValuedMap f;
  f.coordinates = n;
  f.dim = a.dim();
  f.evaluate = [a](const RealVector& z) { return (z(0) * z(0)) * a; };
  return f;
}

}  // namespace

TEST_CASE("Euclidean carre du champ") {
  Rng rng(1);
  const auto a = coefficients(3, 2, rng);
  const auto f = linear_map(a);
  const auto g = gamma_euclidean(f, RealVector::Constant(3, 0.7));
  CHECK(diff(g, sum_squares(a)) < 1e-12);
  CHECK(diff(gamma_euclidean(without_derivatives(f), RealVector::Constant(3, -0.2)), sum_squares(a)) < 1e-8);

  const auto c = quadratic_map(a[0], {HermitianMatrix::zero(2), HermitianMatrix::zero(2)},
                               std::vector<HermitianMatrix>(4, HermitianMatrix::zero(2)));
  CHECK(gamma_euclidean(c, RealVector::Constant(2, 1.0)).matrix().norm() < 1e-15);

  const auto sq = first_square(a[1], 3);
  CHECK(diff(gamma_euclidean(sq, unit(3, 0)), 4.0 * a[1].squared()) < 1e-8);

  const auto gauss = LogConcaveModel::standard_gaussian(3);
  CHECK(diff(gamma2_euclidean(f, gauss, RealVector::Constant(3, 0.3)), sum_squares(a)) < 1e-8);
  const RealVector z = (RealVector(3) << 0.4, -1.0, 2.0).finished();
  const auto expected = (4.0 * z(0) * z(0) + 4.0) * a[1].squared();
  CHECK(diff(gamma2_euclidean(sq, gauss, z), expected) < 1e-5 * (1.0 + expected.matrix().norm()));
}

TEST_CASE("Bakry-Emery on random quadratic maps under log-concave models") {
  Rng rng(2);
  for (double eta : {1.0, 0.5, 2.0}) {
    const auto m = eta == 1.0 ? LogConcaveModel::standard_gaussian(3) : LogConcaveModel::quartic(3, eta);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<HermitianMatrix> b = coefficients(3, 2, rng), cc;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cc.push_back(HermitianMatrix::zero(2));
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          const auto x = random_hermitian(2, rng);
          cc[3 * i + j] = x;
          cc[3 * j + i] = x;
        }
      const auto f = quadratic_map(random_hermitian(2, rng), b, cc);
      RealVector z(3);
      for (int i = 0; i < 3; ++i) z(i) = rng.normal();
      const auto g = gamma_euclidean(f, z);
      const auto g2 = gamma2_euclidean(f, m, z);
      CHECK(psd_margin(g, (1.0 / m.eta) * g2) >= -1e-9);
      CHECK(psd_margin(m.eta * g, g2) >= -1e-9);
    }
  }
}

TEST_CASE("Ornstein-Uhlenbeck semigroup by the Mehler formula") {
  Rng rng(3);
  const auto a = coefficients(2, 2, rng);
  const auto f = linear_map(a);
  const RealVector z = (RealVector(2) << 1.0, 0.0).finished();
  const auto at0 = ou_semigroup_estimate(f, z, 0.0, 10, 1);
  CHECK(diff(at0.mean, a[0]) == 0.0);

  const auto far = ou_semigroup_estimate(f, z, 1e6, 20000, 2);
  CHECK((far.mean.matrix().cwiseAbs().array() <= 4.0 * far.stderr_abs.array() + 1e-12).all());

  const auto half = ou_semigroup_estimate(linear_map({a[0], HermitianMatrix::zero(2)}), z, std::log(2.0), 20000, 3);
  const ComplexMatrix err = half.mean.matrix() - 0.5 * a[0].matrix();
  CHECK((err.cwiseAbs().array() <= 4.0 * half.stderr_abs.array() + 1e-12).all());
}

TEST_CASE("Langevin dynamics") {
  LogConcaveModel flat = LogConcaveModel::standard_gaussian(2);
  flat.gradient = [](const RealVector& z) { return RealVector::Zero(z.size()).eval(); };
  Rng rng(4);
  const double h = 0.3;
  const int n = 40000;
  double s2 = 0.0, s4 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = langevin_step(flat, RealVector::Zero(2), h, rng)(0);
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double var = s2 / n, se = std::sqrt((s4 / n - var * var) / n);
  CHECK(std::abs(var - 2.0 * h) <= 4.0 * se);

  // Zero noise drift: z -> (1 - h) z for the Gaussian potential.
  const auto gauss = LogConcaveModel::standard_gaussian(3);
  const RealVector z = (RealVector(3) << 1.0, -2.0, 0.5).finished();
  CHECK((gauss.gradient(z) - z).norm() == 0.0);
  CHECK(((z - 0.1 * gauss.gradient(z)) - 0.9 * z).norm() < 1e-15);

  LangevinChain chain(gauss, 0.01, Rng(5));
  CHECK(chain.burn_in() == 1000);
  CHECK(chain.thinning() == 100);
  double m2 = 0.0;
  const int samples = 4000;
  for (int k = 0; k < samples; ++k) m2 += chain.next().squaredNorm() / 3.0;
  CHECK(std::abs(m2 / samples - 1.0) < 0.05);
}

TEST_CASE("sphere sampling and Brownian motion") {
  Rng rng(6);
  const int n = 4, samples = 20000;
  RealVector s1 = RealVector::Zero(n + 1), s2 = RealVector::Zero(n + 1), s4 = RealVector::Zero(n + 1);
  for (int k = 0; k < samples; ++k) {
    const auto x = sphere_sample(n, rng);
    REQUIRE(std::abs(x.norm() - 1.0) < 1e-12);
    s1 += x;
    s2 += x.cwiseAbs2();
    s4 += x.cwiseAbs2().cwiseAbs2();
  }
  for (int i = 0; i <= n; ++i) {
    const double mean = s1(i) / samples, m2 = s2(i) / samples;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(m2 / samples));
    CHECK(std::abs(m2 - 1.0 / (n + 1)) <= 4.0 * std::sqrt((s4(i) / samples - m2 * m2) / samples));
  }

  RealVector x = unit(n + 1, 0);
  CHECK((sphere_brownian_step(x, 0.0, rng) - x).norm() == 0.0);
  long upper = 0;
  const int steps = 200000;
  for (int k = 0; k < steps; ++k) {
    x = sphere_brownian_step(x, 0.05, rng);
    REQUIRE(std::abs(x.norm() - 1.0) < 1e-12);
    if (k >= 1000 && x(0) > 0.0) ++upper;
  }
  // Correlated chain: allow a generous band around 1/2.
  CHECK(std::abs(static_cast<double>(upper) / (steps - 1000) - 0.5) < 0.05);
}

TEST_CASE("tangential gradient and sphere carre du champ") {
  const auto a = herm2(1.0, Complex(0.3, 0.2), -0.5);
  const auto z2 = HermitianMatrix::zero(2);
  const auto e1 = unit(3, 0);
  auto g = sphere_tangential_gradient(linear_map({a, z2, z2}, Domain::Sphere), e1);
  for (const auto& c : g) CHECK(c.matrix().norm() < 1e-15);
  g = sphere_tangential_gradient(linear_map({z2, a, z2}, Domain::Sphere), e1);
  CHECK(diff(g[1], a) < 1e-15);
  CHECK(g[0].matrix().norm() < 1e-15);
  CHECK(g[2].matrix().norm() < 1e-15);

  Rng rng(7);
  const SphereModel s{coefficients(4, 2, rng)};
  const auto at_e1 = gamma_sphere_linear(s, unit(4, 0));
  CHECK(diff(at_e1, sum_squares(s.a) - s.a[0].squared()) < 1e-12);
  CHECK(gamma_sphere_linear(SphereModel{{z2, z2, z2}}, unit(3, 1)).matrix().norm() == 0.0);
  CHECK(gamma_sphere_quadratic(s, unit(4, 2)).matrix().norm() < 1e-15);
  CHECK(gamma_sphere_quadratic(SphereModel{{a, a, a}}, sphere_sample(2, rng)).matrix().norm() < 1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const SphereModel m{coefficients(3, 2, rng)};
    const auto x = sphere_sample(2, rng);
    const auto lin = gamma_sphere_linear(m, x);
    CHECK(is_psd(lin));
    CHECK(psd_order(lin, sum_squares(m.a)));
    HermitianMatrix fx = HermitianMatrix::zero(2);
    for (int i = 0; i < 3; ++i) fx += x(i) * m.a[i];
    CHECK(diff(lin + fx.squared(), sum_squares(m.a)) < 1e-12);
    const auto oracle = gamma_from_gradient(sphere_tangential_gradient(linear_map(m.a, Domain::Sphere), x), 2);
    CHECK(diff(lin, oracle) < 1e-9);

    const auto quad = gamma_sphere_quadratic(m, x);
    const auto qoracle = gamma_from_gradient(sphere_tangential_gradient(squares_map(m.a), x), 2);
    CHECK(diff(quad, qoracle) < 1e-9);
    const auto fd = gamma_from_gradient(sphere_tangential_gradient(without_derivatives(squares_map(m.a)), x), 2);
    CHECK(diff(quad, fd) < 1e-6 * (1.0 + quad.matrix().norm()));
    const auto proxy = variance_proxy_sphere_quadratic(m);
    CHECK(op_norm(quad) <= 2.0 * proxy.a * proxy.a + 1e-12);
    CHECK(op_norm(quad) <= proxy.value + 1e-12);
  }
}

TEST_CASE("Haar sampling on SO(d)") {
  Rng rng(8);
  double s = 0.0, s2 = 0.0;
  const int samples = 5000;
  for (int k = 0; k < samples; ++k) {
    const auto o = so_sample_haar(3, rng);
    REQUIRE((o.transpose() * o - RealMatrix::Identity(3, 3)).norm() < 1e-12);
    REQUIRE(std::abs(o.determinant() - 1.0) < 1e-10);
    s += o(0, 0);
    s2 += o(0, 0) * o(0, 0);
  }
  CHECK(std::abs(s / samples) <= 4.0 * std::sqrt(s2 / samples / samples));
}

TEST_CASE("skew basis identity") {
  for (int d : {2, 3, 5}) {
    const auto i = RealMatrix::Identity(d, d);
    CHECK((skew_basis_sum(i) + 0.5 * (d - 1) * i).norm() < 1e-14);
    CHECK(skew_basis_sum(RealMatrix::Zero(d, d)).norm() == 0.0);
  }
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    RealMatrix m(3, 3);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) m(j, k) = rng.normal();
    CHECK((skew_basis_sum(m) - skew_basis_sum_closed_form(m)).cwiseAbs().maxCoeff() < 1e-12);
  }
  const auto basis = skew_basis(4);
  CHECK(basis.size() == 6);
  for (const auto& b : basis) {
    const RealMatrix e = expm_skew(b, 0.7);
    CHECK((e.transpose() * e - RealMatrix::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("SO(d) conjugation carre du champ") {
  SOConjugationModel m;
  m.a = {RealMatrix(RealVector::Map(std::vector<double>{1.0, -1.0}.data(), 2).asDiagonal())};
  const std::vector<RealMatrix> id = {RealMatrix::Identity(2, 2)};
  CHECK(diff(gamma_so_conjugation(m, id), 2.0 * HermitianMatrix::identity(2)) < 1e-14);
  CHECK(diff(gamma_geodesic_fd(m, id), 2.0 * HermitianMatrix::identity(2)) < 1e-3);
  CHECK(variance_proxy_so(m) == doctest::Approx(2.0));

  SOConjugationModel zero;
  zero.a = {RealMatrix::Zero(3, 3)};
  Rng rng(10);
  const std::vector<RealMatrix> o1 = {so_sample_haar(3, rng)};
  CHECK(gamma_so_conjugation(zero, o1).matrix().norm() == 0.0);
  CHECK(gamma_geodesic_fd(zero, o1).matrix().norm() == 0.0);
  CHECK(variance_proxy_so(zero) == 0.0);

  RealMatrix bent = RealMatrix::Identity(2, 2);
  bent(0, 1) = 1e-3;
  CHECK_THROWS_AS(gamma_so_conjugation(m, {bent}), DomainError);

  for (int trial = 0; trial < 20; ++trial) {
    SOConjugationModel r;
    std::vector<RealMatrix> o;
    for (int i = 0; i < 3; ++i) {
      RealMatrix g(3, 3);
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) g(j, k) = rng.normal();
      r.a.push_back(0.5 * (g + g.transpose()));
      o.push_back(so_sample_haar(3, rng));
    }
    const auto closed = gamma_so_conjugation(r, o);
    CHECK(is_psd(closed));
    CHECK(diff(closed, gamma_so_commutators(r, o)) < 1e-10 * (1.0 + closed.matrix().norm()));
    const double e1 = diff(closed, gamma_geodesic_fd(r, o, 1e-4));
    const double e2 = diff(closed, gamma_geodesic_fd(r, o, 5e-5));
    CHECK(e2 <= 1e-3 * closed.matrix().norm());
    const double ratio = e1 / e2;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 3.0);
    CHECK(op_norm(closed) <= variance_proxy_so(r) + 1e-10);
  }
}

TEST_CASE("variance proxies and model descriptions") {
  const auto z2 = HermitianMatrix::zero(2);
  CHECK(variance_proxy_sphere_linear(SphereModel{{HermitianMatrix::identity(2), z2, z2}}) == doctest::Approx(1.0));
  CHECK(variance_proxy_sphere_linear(SphereModel{{z2, z2, z2}}) == 0.0);
  CHECK(variance_proxy_sphere_quadratic(SphereModel{{z2, z2, z2}}).value == 0.0);

  const auto j = json::parse(R"({"kind": "sphere-linear", "coefficients": [
      {"d": 2, "re": [[1, 0], [0, 1]]}, {"d": 2, "re": [[0, 0], [0, 0]]}, {"d": 2, "re": [[0, 0], [0, 0]]}]})");
  const auto model = model_from_json(j);
  CHECK(model.kind == "sphere-linear");
  CHECK(model.c == doctest::Approx(1.0));
  CHECK(model.v == doctest::Approx(1.0));
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"kind": "torus", "coefficients": []})")), ConfigError);
  auto bad = j;
  bad["n"] = 5;
  CHECK_THROWS_AS(model_from_json(bad), ConfigError);

  Rng rng(11);
  const auto g = gaussian_series_model(coefficients(3, 2, rng));
  CHECK(g.c == 1.0);
  auto sampler = g.make_sampler(Rng(1));
  auto again = g.make_sampler(Rng(1));
  for (int k = 0; k < 5; ++k) CHECK(diff(sampler->draw(), again->draw()) == 0.0);
}
