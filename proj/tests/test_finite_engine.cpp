#include <cmath>

#include "doctest.h"
#include "matconc/field_io.hpp"
#include "matconc/finite_engine.hpp"

using namespace matconc;

namespace {

using Values = std::vector<ComplexMatrix>;

// Brute-force operators written against raw weight tables, independent of the engine.
struct Naive {
  std::vector<std::vector<double>> w;
  std::size_t states = 1;

  explicit Naive(std::vector<std::vector<double>> weights) : w(std::move(weights)) {
    for (const auto& f : w) states *= f.size();
  }
  std::vector<int> digits(std::size_t z) const {
    std::vector<int> d(w.size());
    for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
      d[i] = static_cast<int>(z % w[i].size());
      z /= w[i].size();
    }
    return d;
  }
  std::size_t index(const std::vector<int>& d) const {
    std::size_t z = 0;
    for (std::size_t i = 0; i < w.size(); ++i) z = z * w[i].size() + d[i];
    return z;
  }
  double prob(std::size_t z) const {
    const auto d = digits(z);
    double p = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) p *= w[i][d[i]];
    return p;
  }
  Values gen(const Values& f) const {
    Values out(states, ComplexMatrix::Zero(f[0].rows(), f[0].cols()));
    for (std::size_t z = 0; z < states; ++z) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        auto d = digits(z);
        ComplexMatrix avg = ComplexMatrix::Zero(f[0].rows(), f[0].cols());
        for (std::size_t k = 0; k < w[i].size(); ++k) {
          d[i] = static_cast<int>(k);
          avg += w[i][k] * f[index(d)];
        }
        out[z] -= f[z] - avg;
      }
    }
    return out;
  }
  static Values mul(const Values& a, const Values& b) {
    Values o(a.size());
    for (std::size_t z = 0; z < a.size(); ++z) o[z] = a[z] * b[z];
    return o;
  }
  Values gamma(const Values& f, const Values& g) const {
    const auto lfg = gen(mul(f, g)), lg = gen(g), lf = gen(f);
    Values o(states);
    for (std::size_t z = 0; z < states; ++z) o[z] = 0.5 * (lfg[z] - f[z] * lg[z] - lf[z] * g[z]);
    return o;
  }
  Values gamma2(const Values& f) const {
    const auto lgam = gen(gamma(f, f));
    const auto lf = gen(f);
    const auto a = gamma(f, lf), b = gamma(lf, f);
    Values o(states);
    for (std::size_t z = 0; z < states; ++z) o[z] = 0.5 * (lgam[z] - a[z] - b[z]);
    return o;
  }
  ComplexMatrix mean(const Values& f) const {
    ComplexMatrix m = ComplexMatrix::Zero(f[0].rows(), f[0].cols());
    for (std::size_t z = 0; z < states; ++z) m += prob(z) * f[z];
    return m;
  }
};

double max_diff(const MatrixField& f, const Values& g) {
  double e = 0.0;
  for (std::size_t z = 0; z < f.size(); ++z) e = std::max(e, (f[z] - g[z]).norm());
  return e;
}

MatrixField rademacher(const HermitianMatrix& a) {
  return MatrixField::from_function(FiniteProductSpace::uniform({2}), a.dim(), [&](std::span<const int> d) {
    return ComplexMatrix((d[0] == 0 ? -1.0 : 1.0) * a.matrix());
  });
}

HermitianMatrix sample_a() {
  ComplexMatrix a(2, 2);
  a << 1.0, Complex(0.5, -0.25), Complex(0.5, 0.25), -0.5;
  return HermitianMatrix(a);
}

}  // namespace

TEST_CASE("product space validation") {
  CHECK_THROWS_AS(FiniteProductSpace::make({{0.5, 0.4}}), ConfigError);
  CHECK_THROWS_AS(FiniteProductSpace::make({{1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FiniteProductSpace::make({}), ConfigError);
  CHECK_THROWS_AS(FiniteProductSpace::uniform(std::vector<int>(20, 2)), ResourceError);
  const auto s = FiniteProductSpace::uniform({2, 3, 2});
  CHECK(s->num_states() == 12);
  CHECK(s->coordinate(1, 2) == 1);
  CHECK(s->coordinate(2, 1) == 1);
  const auto j = space_to_json(*s);
  CHECK(space_from_json(j)->same_shape(*s));
}

TEST_CASE("expectation") {
  const auto a = sample_a();
  const auto s = FiniteProductSpace::uniform({2, 3});
  CHECK((expectation(MatrixField::constant(s, a.matrix())) - a.matrix()).norm() < 1e-15);
  CHECK(expectation(rademacher(a)).norm() < 1e-15);
  const auto biased = FiniteProductSpace::make({{0.25, 0.75}});
  const auto f = MatrixField::from_function(biased, 2, [](std::span<const int> d) {
    return ComplexMatrix(static_cast<double>(d[0]) * ComplexMatrix::Identity(2, 2));
  });
  CHECK((expectation(f) - 0.75 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("semigroup") {
  Rng rng(1);
  const auto s = FiniteProductSpace::make({{0.2, 0.8}, {0.3, 0.3, 0.4}, {0.5, 0.5}});
  const auto f = random_field(s, 2, rng);
  CHECK(max_diff(semigroup_apply(f, 0.0), f.values()) == 0.0);
  const auto far = semigroup_apply(f, 1e6);
  const ComplexMatrix ef = expectation(f);
  for (std::size_t z = 0; z < far.size(); ++z) CHECK((far[z] - ef).norm() < 1e-12);
  for (double t : {0.1, 0.7, 3.0}) CHECK((expectation(semigroup_apply(f, t)) - ef).norm() < 1e-12);
  CHECK_THROWS_AS(semigroup_apply(f, -1.0), DomainError);

  const auto one = FiniteProductSpace::make({{0.1, 0.6, 0.3}});
  const auto g = random_field(one, 3, rng);
  const double t = 0.4;
  const auto pg = semigroup_apply(g, t);
  const ComplexMatrix eg = expectation(g);
  for (std::size_t z = 0; z < g.size(); ++z)
    CHECK((pg[z] - (std::exp(-t) * g[z] + (1.0 - std::exp(-t)) * eg)).norm() < 1e-13);

  for (int n = 1; n <= 8; ++n) {
    const auto sn = FiniteProductSpace::uniform(std::vector<int>(n, 2));
    const auto h = random_field(sn, 2, rng);
    for (double tt : {0.05, 0.5, 2.0}) {
      CHECK(max_diff(semigroup_apply_subset(h, tt), semigroup_apply_factorized(h, tt).values()) < 1e-12);
    }
  }

  for (double a : {0.1, 0.5, 1.0})
    for (double b : {0.1, 0.5, 1.0})
      CHECK(max_diff(semigroup_apply(semigroup_apply(f, a), b), semigroup_apply(f, a + b).values()) < 1e-12);

  const double h = 1e-6;
  const auto lf = generator_apply(f);
  const auto ph = semigroup_apply(f, h);
  double err = 0.0;
  for (std::size_t z = 0; z < f.size(); ++z) err = std::max(err, ((ph[z] - f[z]) / h - lf[z]).norm());
  CHECK(err < 1e-4);
}

TEST_CASE("generator") {
  const auto a = sample_a();
  const auto s = FiniteProductSpace::uniform({3, 2});
  CHECK(max_diff(generator_apply(MatrixField::constant(s, a.matrix())), Values(6, ComplexMatrix::Zero(2, 2))) <
        1e-15);
  const auto f = rademacher(a);
  const auto lf = generator_apply(f);
  for (std::size_t z = 0; z < 2; ++z) CHECK((lf[z] + f[z]).norm() < 1e-15);
  Rng rng(2);
  CHECK(expectation(generator_apply(random_field(s, 3, rng))).norm() < 1e-12);
}

TEST_CASE("carre du champ against the brute-force oracle") {
  const auto a = sample_a();
  const auto f = rademacher(a);
  const auto g = carre_du_champ(f);
  for (std::size_t z = 0; z < 2; ++z) CHECK((g[z] - a.squared().matrix()).norm() < 1e-14);
  CHECK((dirichlet_form(f, f) - a.squared().matrix()).norm() < 1e-14);
  CHECK((matrix_variance(f).matrix() - a.squared().matrix()).norm() < 1e-14);
  CHECK(variance_proxy(f) == doctest::Approx(op_norm(a.squared())));

  Rng rng(3);
  const std::vector<std::vector<double>> weights = {{0.2, 0.8}, {0.3, 0.3, 0.4}, {0.6, 0.4}};
  const Naive naive(weights);
  const auto s = FiniteProductSpace::make(weights);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_field(s, 2, rng);
    const auto y = random_field(s, 2, rng);
    CHECK(max_diff(carre_du_champ(x, y), naive.gamma(x.values(), y.values())) < 1e-10);
    CHECK(max_diff(carre_du_champ2(x, x), naive.gamma2(x.values())) < 1e-10);
    const auto twice = carre_du_champ(x * Complex(2.0, 0.0), y);
    const auto once = carre_du_champ(x, y);
    for (std::size_t z = 0; z < x.size(); ++z) CHECK((twice[z] - 2.0 * once[z]).norm() < 1e-12);
    const auto gx = carre_du_champ(x);
    for (std::size_t z = 0; z < x.size(); ++z) CHECK(is_psd(gx.hermitian_at(z), 1e-10));
    CHECK((dirichlet_form(x, y) - dirichlet_form_from_generator(x, y)).norm() < 1e-10);
    const auto lx = generator_apply(x);
    CHECK((expectation(carre_du_champ2(x)) - naive.mean(Naive::mul(lx.values(), lx.values()))).norm() < 1e-10);
    CHECK(variance_proxy(x) >= op_norm(HermitianMatrix::hermitian_part(dirichlet_form(x, x))) - 1e-10);
  }
  const auto c = MatrixField::constant(s, a.matrix());
  CHECK(max_diff(carre_du_champ2(c), Values(s->num_states(), ComplexMatrix::Zero(2, 2))) < 1e-15);
}

TEST_CASE("Rademacher second-order carre du champ by enumeration") {
  // Double resampling over (Z, Z~) for n = 1 and f(z) = z A.
  const auto a = sample_a();
  const auto f = rademacher(a);
  const auto g2 = carre_du_champ2(f);
  const auto g = carre_du_champ(f);
  for (int zi = 0; zi < 2; ++zi) {
    const double z = zi == 0 ? -1.0 : 1.0;
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    for (double zz : {-1.0, 1.0})
      for (double zt : {-1.0, 1.0}) {
        const ComplexMatrix d1 = (z - zz) * a.matrix(), d2 = (zt - zz) * a.matrix();
        expected += 0.25 * 0.25 * (d1 * d1 + d2 * d2);
      }
    CHECK((g2[zi] - expected).norm() < 1e-14);
    CHECK(psd_margin(g.hermitian_at(zi), 2.0 * g2.hermitian_at(zi)) >= 0.0);
  }
}

TEST_CASE("moments and mgf") {
  const auto f = rademacher(HermitianMatrix::diagonal({1.0, -1.0}));
  CHECK(trace_moment(f, 2.0) == doctest::Approx(2.0));
  for (double theta : {-2.0, -0.3, 0.0, 0.5, 1.7}) {
    CHECK(trace_mgf(f, theta) == doctest::Approx(std::cosh(theta)).epsilon(1e-14));
    CHECK(log_trace_mgf(f, theta) == doctest::Approx(std::log(std::cosh(theta))).epsilon(1e-12));
  }
  CHECK(log_trace_mgf(f, 800.0) == doctest::Approx(800.0 - std::log(2.0)).epsilon(1e-14));

  Rng rng(4);
  const auto s = FiniteProductSpace::uniform({2, 3, 2});
  const auto c = MatrixField::constant(s, sample_a().matrix());
  CHECK(trace_moment(c, 3.0) < 1e-24);
  CHECK(trace_mgf(c, 2.0) == doctest::Approx(1.0));
  CHECK(variance_proxy(c) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_field(s, 2, rng);
    CHECK(trace_mgf(x, 0.0) == doctest::Approx(1.0));
    CHECK(trace_mgf(x, 0.7) >= 1.0);
    for (double beta : {0.1, 1.0, 10.0}) CHECK(r_beta(x, beta) <= variance_proxy(x) + 1e-12);
  }
  const auto small = MatrixField::from_function(s, 2, [](std::span<const int> d) {
    return ComplexMatrix(0.3 * (d[1] - 1.0) * HermitianMatrix::diagonal({1.0, -0.5}).matrix());
  });
  CHECK(trace_moment(small, 2.0) >= trace_moment(small, 3.0));
  CHECK(trace_moment(small, 3.0) >= trace_moment(small, 4.5));

  const auto scalar_gamma = MatrixField::from_function(FiniteProductSpace::uniform({2}), 2, [](std::span<const int> d) {
    return ComplexMatrix((d[0] == 0 ? -1.0 : 1.0) * ComplexMatrix::Identity(2, 2));
  });
  for (double beta : {0.5, 2.0, 50.0}) CHECK(r_beta(scalar_gamma, beta) == doctest::Approx(1.0));
}

TEST_CASE("field literal round trip") {
  Rng rng(6);
  const auto f = random_field(FiniteProductSpace::uniform({2, 3, 2}), 2, rng);
  const auto back = field_from_json(json::parse(field_to_json(f).dump()));
  CHECK(max_diff(back, f.values()) == 0.0);
  auto bad = field_to_json(f);
  bad["values"].erase(0);
  CHECK_THROWS(field_from_json(bad));
}
