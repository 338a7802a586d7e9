#include <Eigen/Eigenvalues>

#include <cmath>

#include "doctest.h"
#include "matconc/hermitian.hpp"
#include "matconc/matrix_io.hpp"

using namespace matconc;

namespace {

HermitianMatrix real2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return HermitianMatrix(m);
}

double reconstruction_error(const HermitianMatrix& a, const EigenDecomposition& e) {
  const ComplexMatrix r = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return (r - a.matrix()).norm();
}

}  // namespace

TEST_CASE("construction validates Hermitian symmetry") {
  ComplexMatrix m(2, 2);
  m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  CHECK_NOTHROW(HermitianMatrix{m});
  m(0, 1) = Complex(0.0, 2.0);
  CHECK_THROWS_AS(HermitianMatrix{m}, DomainError);
  CHECK_THROWS_AS(HermitianMatrix{ComplexMatrix(2, 3)}, DimensionError);
  m << 1.0, 1.0 + 1e-14, 1.0, 1.0;
  const HermitianMatrix h(m);
  CHECK(h(0, 1) == h(1, 0));
}

TEST_CASE("eig on small closed-form cases") {
  auto e = eig(HermitianMatrix::diagonal({3.0, 1.0}));
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));
  CHECK(std::abs(std::abs(e.vectors(1, 0)) - 1.0) < 1e-14);

  e = eig(real2(0, 1, 1, 0));
  CHECK(e.values(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));

  e = eig(HermitianMatrix::zero(4));
  CHECK(e.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK((e.vectors - ComplexMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("eig matches the library eigensolver on random inputs") {
  Rng rng(11);
  double worst_rec = 0.0, worst_unit = 0.0, worst_vals = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + trial % 16;
    const auto a = random_hermitian(d, rng);
    const auto e = eig(a);
    for (int i = 1; i < d; ++i) REQUIRE(e.values(i - 1) <= e.values(i));
    worst_rec = std::max(worst_rec, reconstruction_error(a, e) / (1.0 + a.matrix().norm()));
    worst_unit = std::max(worst_unit, (e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(d, d)).norm() / d);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> oracle(a.matrix());
    worst_vals = std::max(worst_vals, (oracle.eigenvalues() - e.values).cwiseAbs().maxCoeff() /
                                          (1.0 + a.matrix().norm()));
  }
  CHECK(worst_rec <= 1e-10);
  CHECK(worst_unit <= 1e-10);
  CHECK(worst_vals <= 1e-12);
}

TEST_CASE("eig handles degenerate and badly scaled spectra") {
  Rng rng(5);
  const auto u = eig(random_hermitian(6, rng)).vectors;
  const ComplexMatrix a =
      u * RealVector::Map(std::vector<double>{1, 1, 1, -2, -2, 1e-9}.data(), 6).cast<Complex>().asDiagonal() *
      u.adjoint();
  const auto h = HermitianMatrix::hermitian_part(a);
  const auto e = eig(h);
  CHECK(reconstruction_error(h, e) <= 1e-10 * (1.0 + h.matrix().norm()));
  CHECK(e.values(0) == doctest::Approx(-2.0).epsilon(1e-12));

  const auto big = 1e150 * random_hermitian(5, rng);
  CHECK(reconstruction_error(big, eig(big)) <= 1e-10 * big.matrix().norm());
}

TEST_CASE("matrix_function") {
  const auto ex = matrix_function(HermitianMatrix::zero(3), [](double x) { return std::exp(x); });
  CHECK((ex.matrix() - ComplexMatrix::Identity(3, 3)).norm() < 1e-15);

  const auto sq = matrix_function(HermitianMatrix::diagonal({1.0, 2.0}), [](double x) { return x * x; });
  CHECK((sq.matrix() - HermitianMatrix::diagonal({1.0, 4.0}).matrix()).norm() < 1e-14);

  const auto swap = real2(0, 1, 1, 0);
  const auto cube = matrix_function(swap, [](double x) { return std::copysign(std::pow(std::abs(x), 3.0), x); });
  CHECK((cube.matrix() - swap.matrix()).norm() < 1e-14);

  CHECK_THROWS_AS(matrix_function(HermitianMatrix::diagonal({0.0, 1.0}), [](double x) { return 1.0 / x; }),
                  DomainError);
  try {
    matrix_function(HermitianMatrix::diagonal({-1.0, 1.0}), [](double x) { return std::log(x); });
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("-1") != std::string::npos);
  }

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_hermitian(1 + trial % 6, rng);
    const auto id = matrix_function(a, [](double x) { return x; });
    CHECK((id.matrix() - a.matrix()).norm() <= 1e-10 * (1.0 + a.matrix().norm()));
    const auto fa = matrix_function(a, [](double x) { return std::exp(0.3 * x); });
    const ComplexMatrix comm = fa.matrix() * a.matrix() - a.matrix() * fa.matrix();
    CHECK(comm.norm() <= 1e-9 * fa.matrix().norm() * a.matrix().norm());
  }
}

TEST_CASE("trace powers and norms") {
  CHECK(trace_power_abs(HermitianMatrix::diagonal({1.0, -2.0}), 3.0) == doctest::Approx(9.0));
  CHECK(trace_power_abs(HermitianMatrix::zero(3), 1.7) == 0.0);
  CHECK(trace_power_abs(real2(0, 1, 1, 0), 2.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(trace_power_abs(HermitianMatrix::identity(2), 0.5), DomainError);

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_hermitian(1 + trial % 7, rng);
    CHECK(trace_power_abs(a, 2.0) == doctest::Approx(a.matrix().squaredNorm()).epsilon(1e-10));
  }

  auto n = norms(HermitianMatrix::identity(3));
  CHECK(n.op == doctest::Approx(1.0));
  CHECK(n.hs == doctest::Approx(std::sqrt(3.0)));
  CHECK(n.trace == doctest::Approx(3.0));
  CHECK(n.normalized_trace == doctest::Approx(1.0));
  CHECK(n.lambda_max == doctest::Approx(1.0));
  CHECK(n.lambda_min == doctest::Approx(1.0));

  n = norms(HermitianMatrix::zero(2));
  CHECK(n.op == 0.0);
  CHECK(n.hs == 0.0);
  CHECK(n.lambda_min == 0.0);

  n = norms(HermitianMatrix::diagonal({2.0, -2.0}));
  CHECK(n.op == doctest::Approx(2.0));
  CHECK(n.hs == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(n.trace == doctest::Approx(4.0));
  CHECK(n.normalized_trace == doctest::Approx(0.0));
  CHECK(n.lambda_max == doctest::Approx(2.0));
  CHECK(n.lambda_min == doctest::Approx(-2.0));
}

TEST_CASE("semidefinite order") {
  CHECK(is_psd(HermitianMatrix::identity(2), 0.0));
  CHECK(is_psd(HermitianMatrix::diagonal({1.0, -1e-15}), 1e-9));
  CHECK_FALSE(is_psd(HermitianMatrix::diagonal({1.0, -1.0}), 1e-9));

  const auto a = HermitianMatrix::diagonal({0.5, -3.0});
  CHECK(psd_order(a, a));
  CHECK(psd_order(HermitianMatrix::zero(2), HermitianMatrix::identity(2)));
  CHECK_FALSE(psd_order(HermitianMatrix::identity(2), HermitianMatrix::zero(2)));
  CHECK_THROWS_AS(psd_order(HermitianMatrix::identity(2), HermitianMatrix::identity(3)), DimensionError);

  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(3), y(3);
    bool entrywise = true;
    for (int i = 0; i < 3; ++i) {
      x[i] = std::round(4.0 * rng.normal()) / 4.0;
      y[i] = std::round(4.0 * rng.normal()) / 4.0;
      entrywise = entrywise && x[i] <= y[i];
    }
    CHECK(psd_order(HermitianMatrix::diagonal(x), HermitianMatrix::diagonal(y)) == entrywise);
  }
}

TEST_CASE("self-adjoint dilation") {
  ComplexMatrix one(1, 1);
  one << 1.0;
  CHECK((dilation(one).matrix() - real2(0, 1, 1, 0).matrix()).norm() == 0.0);
  CHECK(dilation(ComplexMatrix::Zero(2, 3)).matrix().norm() == 0.0);
  ComplexMatrix row(1, 2);
  row << 0.0, 2.0;
  const auto d = dilation(row);
  CHECK(d.dim() == 3);
  CHECK(op_norm(d) == doctest::Approx(2.0));

  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 1 + trial % 3, c = 1 + (trial / 3) % 4;
    ComplexMatrix h(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) h(i, j) = Complex(rng.normal(), rng.normal());
    const Eigen::JacobiSVD<ComplexMatrix> svd(h);
    for (double q : {1.0, 1.5, 2.0}) {
      double expected = 0.0;
      for (int i = 0; i < svd.singularValues().size(); ++i) expected += 2.0 * std::pow(svd.singularValues()(i), 2 * q);
      CHECK(trace_power_abs(dilation(h), 2 * q) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("matrix literal round trip") {
  Rng rng(4);
  const auto a = random_hermitian(3, rng);
  const auto back = hermitian_from_json(json::parse(matrix_to_json(a.matrix()).dump()));
  CHECK((back.matrix() - a.matrix()).norm() == 0.0);
  const auto real = matrix_to_json(HermitianMatrix::diagonal({1.0, 2.0}).matrix());
  CHECK_FALSE(real.contains("im"));
  CHECK_THROWS_AS(matrix_from_json(json::parse(R"({"d": 2, "re": [[1, 2]]})")), ConfigError);
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 7.0 * 1e-300, 6.02214076e23}) CHECK(std::stod(format_double(x)) == x);
}
