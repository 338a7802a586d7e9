#include <algorithm>
#include <cmath>

#include "matconc/verify.hpp"

namespace matconc {

const char* to_string(TailBranch b) {
  switch (b) {
    case TailBranch::LambdaMax: return "lambda_max";
    case TailBranch::LambdaMin: return "lambda_min";
    case TailBranch::Norm: return "norm";
  }
  return "lambda_max";
}

TailBranch tail_branch_from_string(const std::string& s) {
  if (s == "lambda_max" || s == "max") return TailBranch::LambdaMax;
  if (s == "lambda_min" || s == "min") return TailBranch::LambdaMin;
  if (s == "norm") return TailBranch::Norm;
  throw ConfigError("unknown tail branch \"" + s + "\" (expected lambda_max, lambda_min or norm)");
}

std::vector<double> default_tail_grid(const ConcentrationModel& m, double pilot_stderr, std::size_t points) {
  double t0 = 5.0 * pilot_stderr * std::sqrt(static_cast<double>(m.dim));
  if (!(t0 > 0.0)) t0 = 1e-3;
  double t1 = std::sqrt(2.0 * m.c * m.v * std::log(m.dim * 1e4));
  if (!(t1 > t0)) t1 = t0 + 1.0;
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = points == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

TailCurve mc_tail_curve(const ConcentrationModel& m, std::size_t samples, std::vector<double> t_grid,
                        std::uint64_t seed, TailBranch branch) {
  if (samples < 2) throw DomainError("mc_tail_curve: need at least 2 samples");
  const int d = m.dim;
  const double n = static_cast<double>(samples);

  auto pilot = m.make_sampler(Rng::stream(seed, 0));
  std::vector<ComplexMatrix> draws;
  draws.reserve(samples);
  ComplexMatrix mean = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < samples; ++k) {
    draws.push_back(pilot->draw().matrix());
    mean += draws.back();
  }
  mean /= n;
  double ss = 0.0;
  for (const auto& x : draws) ss += (x - mean).squaredNorm();
  draws.clear();
  const double pilot_stderr = std::sqrt(ss / (n - 1.0) / n);

  auto main = m.make_sampler(Rng::stream(seed, 1));
  std::vector<double> stat(samples);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto e = eig(HermitianMatrix::hermitian_part(main->draw().matrix() - mean));
    const double lo = e.values(0), hi = e.values(d - 1);
    switch (branch) {
      case TailBranch::LambdaMax: stat[k] = hi; break;
      case TailBranch::LambdaMin: stat[k] = -lo; break;
      case TailBranch::Norm: stat[k] = std::max(std::abs(lo), std::abs(hi)); break;
    }
    sum += stat[k];
    sum2 += stat[k] * stat[k];
  }
  TailCurve out;
  out.samples = samples;
  out.seed = seed;
  out.pilot_stderr = pilot_stderr;
  const double smean = sum / n;
  out.statistic_mean = {smean, std::sqrt(std::max(0.0, (sum2 - n * smean * smean) / (n - 1.0)) / n), samples, seed};
  if (t_grid.empty()) t_grid = default_tail_grid(m, pilot_stderr);
  std::sort(stat.begin(), stat.end());
  for (double t : t_grid) {
    const auto first = std::lower_bound(stat.begin(), stat.end(), t);
    const double p = static_cast<double>(stat.end() - first) / n;
    out.points.push_back({t, {p, std::sqrt(p * (1.0 - p) / n), samples, seed}});
  }
  return out;
}

double model_tail_bound(const ConcentrationModel& m, TailBranch branch, double t) {
  const double one = subgaussian_tail(m.dim, m.c, m.v, t);
  return branch == TailBranch::Norm ? two_sided(one) : one;
}

VerificationReport check_tail_dominance(const ConcentrationModel& m, const TailCurve& curve, TailBranch branch) {
  MarginTracker tr;
  json points = json::array();
  for (const auto& p : curve.points) {
    const double bound = model_tail_bound(m, branch, p.t);
    const double margin = bound - (p.tail.value - 4.0 * p.tail.stderr_);
    points.push_back({{"t", p.t}, {"empirical", p.tail.value}, {"stderr", p.tail.stderr_}, {"bound", bound}});
    tr.observe(margin, [&] {
      return json{{"t", p.t}, {"empirical", p.tail.value}, {"stderr", p.tail.stderr_}, {"bound", bound}};
    });
  }
  auto r = tr.finish(std::string("tail-dominance"), CheckKind::MonteCarlo, 0.0, curve.samples, curve.seed);
  r.details = {{"model", m.kind}, {"branch", to_string(branch)}, {"c", m.c}, {"v", m.v}, {"d", m.dim},
               {"pilot_stderr", curve.pilot_stderr}, {"points", points}};
  return r;
}

VerificationReport check_tail_dominance(const ConcentrationModel& m, std::size_t samples,
                                        const std::vector<double>& t_grid, std::uint64_t seed, TailBranch branch) {
  return check_tail_dominance(m, mc_tail_curve(m, samples, t_grid, seed, branch), branch);
}

VerificationReport check_expectation_bound(const ConcentrationModel& m, std::size_t samples, std::uint64_t seed) {
  const auto curve = mc_tail_curve(m, samples, {0.0}, seed, TailBranch::LambdaMax);
  const double bound = expectation_bound(m.dim, m.c, m.v);
  const auto& est = curve.statistic_mean;
  MarginTracker tr;
  tr.observe(bound - (est.value - 4.0 * est.stderr_),
             [&] { return json{{"empirical", est.value}, {"stderr", est.stderr_}, {"bound", bound}}; });
  auto r = tr.finish("expectation-bound", CheckKind::MonteCarlo, 0.0, samples, seed);
  r.details = {{"model", m.kind}, {"c", m.c}, {"v", m.v}, {"d", m.dim}};
  return r;
}

namespace {

std::vector<HermitianMatrix> random_coefficients(int count, int d, Rng& rng) {
  std::vector<HermitianMatrix> a;
  for (int i = 0; i < count; ++i) a.push_back(random_hermitian(d, rng));
  return a;
}

RealMatrix random_symmetric(int d, Rng& rng) {
  RealMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  return 0.5 * (g + g.transpose());
}

}  // namespace

VerificationReport check_sphere_gamma(int n, int dim, std::size_t trials, std::uint64_t seed, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    const SphereModel s{random_coefficients(n + 1, dim, rng)};
    const RealVector x = sphere_sample(n, rng);
    const auto lin = gamma_sphere_linear(s, x);
    const auto lin_oracle = gamma_from_gradient(sphere_tangential_gradient(linear_map(s.a, Domain::Sphere), x), dim);
    double m = identity_margin(lin.matrix(), lin_oracle.matrix());
    tr.observe(m, [&] { return json{{"trial", k}, {"model", "sphere-linear"}}; });
    const auto quad = gamma_sphere_quadratic(s, x);
    const auto quad_oracle = gamma_from_gradient(sphere_tangential_gradient(squares_map(s.a), x), dim);
    m = identity_margin(quad.matrix(), quad_oracle.matrix());
    tr.observe(m, [&] { return json{{"trial", k}, {"model", "sphere-quadratic"}}; });
  }
  auto r = tr.finish("sphere-gamma-oracle", CheckKind::Identity, tol, trials, seed);
  r.details = {{"n", n}, {"d", dim}};
  return r;
}

VerificationReport check_so_gamma(int d, int n, std::size_t trials, std::uint64_t seed, double rel_tol) {
  MarginTracker tr;
  double commutator_err = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    SOConjugationModel s;
    std::vector<RealMatrix> o;
    for (int i = 0; i < n; ++i) s.a.push_back(random_symmetric(d, rng));
    for (int i = 0; i < n; ++i) o.push_back(so_sample_haar(d, rng));
    const auto closed = gamma_so_conjugation(s, o);
    const auto fd = gamma_geodesic_fd(s, o);
    const auto comm = gamma_so_commutators(s, o);
    const double scale = std::max(closed.matrix().norm(), 1e-300);
    const double rel = (closed.matrix() - fd.matrix()).norm() / scale;
    commutator_err = std::max(commutator_err, (closed.matrix() - comm.matrix()).norm() / scale);
    tr.observe(-rel, [&] { return json{{"trial", k}, {"relative_error", rel}}; });
  }
  auto r = tr.finish("so-gamma-oracle", CheckKind::Identity, rel_tol, trials, seed);
  r.details = {{"d", d}, {"n", n}, {"h", 1e-5}, {"commutator_max_relative_error", commutator_err}};
  return r;
}

VerificationReport check_skew_basis(int d, std::size_t trials, std::uint64_t seed, double tol) {
  MarginTracker tr;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    RealMatrix m(d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) m(i, j) = rng.normal();
    const double err = (skew_basis_sum(m) - skew_basis_sum_closed_form(m)).cwiseAbs().maxCoeff();
    tr.observe(-err, [&] { return json{{"trial", k}, {"max_abs_error", err}}; });
  }
  auto r = tr.finish("skew-basis", CheckKind::Identity, tol, trials, seed);
  r.details = {{"d", d}};
  return r;
}

VerificationReport check_haar(int d, std::size_t trials, std::uint64_t seed, double tol) {
  MarginTracker tr;
  Rng rng(seed);
  double first = 0.0, first2 = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const RealMatrix o = so_sample_haar(d, rng);
    const double orth = (o.transpose() * o - RealMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
    const double det = std::abs(o.determinant() - 1.0);
    tr.observe(-std::max(orth, det), [&] { return json{{"trial", k}, {"orthogonality", orth}, {"determinant", det}}; });
    first += o(0, 0);
    first2 += o(0, 0) * o(0, 0);
  }
  auto r = tr.finish("haar-invariants", CheckKind::Identity, tol, trials, seed);
  const double n = static_cast<double>(trials);
  if (trials >= 2) {
    const double mean = first / n;
    r.details = {{"d", d}, {"mean_o11", mean},
                 {"stderr_o11", std::sqrt(std::max(0.0, (first2 - n * mean * mean) / (n - 1.0)) / n)}};
  }
  return r;
}

}  // namespace matconc
