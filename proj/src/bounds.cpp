#include "matconc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matconc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

double clip_tail(int d, double x) {
  if (std::isnan(x)) return static_cast<double>(d);
  return std::clamp(x, 0.0, static_cast<double>(d));
}

double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

}  // namespace

bool admissible_moment_order(double q) { return q == 1.0 || q >= 1.5; }

double poly_moment_bound(double c, double q, double gamma_moment) {
  require(c > 0.0, "poly_moment_bound: c must be > 0");
  if (!admissible_moment_order(q)) {
    std::ostringstream os;
    os << "poly_moment_bound: q = " << q
       << " is not supported; the moment inequality is available for q = 1 and q >= 1.5 only";
    throw DomainError(os.str());
  }
  require(gamma_moment >= 0.0, "poly_moment_bound: gamma moment must be >= 0");
  return std::sqrt(c * (2.0 * q - 1.0)) * std::pow(gamma_moment, 1.0 / (2.0 * q));
}

double poly_moment_bound_uniform(double c, double q, int d, double v) {
  require(d >= 1, "poly_moment_bound_uniform: d must be >= 1");
  require(v >= 0.0, "poly_moment_bound_uniform: v must be >= 0");
  if (!admissible_moment_order(q)) return poly_moment_bound(c, q, 0.0);  // throws
  require(c > 0.0, "poly_moment_bound_uniform: c must be > 0");
  return std::pow(static_cast<double>(d), 1.0 / (2.0 * q)) * std::sqrt(c * (2.0 * q - 1.0) * v);
}

RCurve RCurve::constant(double v) { return {[v](double) { return v; }, v}; }

std::vector<double> default_beta_grid(double c) {
  require(c > 0.0, "beta grid: c must be > 0");
  std::vector<double> g(64);
  const double lo = std::log(1e-3), hi = std::log(1e6);
  for (int k = 0; k < 64; ++k) g[k] = std::exp(lo + (hi - lo) * k / 63.0) / c;
  return g;
}

double exp_tail_bound(int d, double c, const RCurve& r, double t, const std::vector<double>& beta_grid) {
  require(d >= 1, "exp_tail_bound: d must be >= 1");
  require(c > 0.0, "exp_tail_bound: c must be > 0");
  require(t >= 0.0, "exp_tail_bound: t must be >= 0");
  if (beta_grid.empty() && !r.constant_majorant) throw DomainError("exp_tail_bound: empty beta grid");
  if (t == 0.0) return d;
  double best = std::numeric_limits<double>::infinity();
  for (double beta : beta_grid) {
    require(beta > 0.0, "exp_tail_bound: beta grid must be positive");
    const double denom = 2.0 * c * r.r(beta) + 2.0 * t * std::sqrt(c / beta);
    best = std::min(best, denom > 0.0 ? std::exp(-t * t / denom) : 0.0);
  }
  if (r.constant_majorant) {
    const double v = *r.constant_majorant;
    best = std::min(best, v > 0.0 ? std::exp(-t * t / (2.0 * c * v)) : 0.0);
  }
  return clip_tail(d, d * best);
}

double exp_tail_bound(int d, double c, const RCurve& r, double t) {
  return exp_tail_bound(d, c, r, t, default_beta_grid(c));
}

double subgaussian_tail(int d, double c, double v, double t) {
  require(d >= 1, "subgaussian_tail: d must be >= 1");
  require(c > 0.0 && v >= 0.0 && t >= 0.0, "subgaussian_tail: need c > 0, v >= 0, t >= 0");
  if (t == 0.0) return d;
  if (v == 0.0) return 0.0;
  return clip_tail(d, d * std::exp(-t * t / (2.0 * c * v)));
}

double two_sided(double one_sided) { return std::min(1.0, 2.0 * one_sided); }

double expectation_bound(int d, double c, double v) {
  require(d >= 1 && c > 0.0 && v >= 0.0, "expectation_bound: need d >= 1, c > 0, v >= 0");
  return std::sqrt(2.0 * c * v * std::log(static_cast<double>(d)));
}

double mgf_bound(double c, double theta, double beta, double r) {
  require(c > 0.0 && beta > 0.0, "mgf_bound: need c > 0 and beta > 0");
  const double ct2 = c * theta * theta;
  if (!(ct2 < beta)) {
    std::ostringstream os;
    os << "mgf_bound: theta = " << theta << " outside the open interval (-" << std::sqrt(beta / c) << ", "
       << std::sqrt(beta / c) << ")";
    throw DomainError(os.str());
  }
  return ct2 * r / (2.0 * (1.0 - ct2 / beta));
}

double mgf_bound_limit(double c, double theta, double v) { return c * v * theta * theta / 2.0; }

double matrix_chebyshev(double t, double p, double pth_moment) {
  require(t > 0.0, "matrix_chebyshev: t must be > 0");
  require(p >= 1.0, "matrix_chebyshev: p must be >= 1");
  require(pth_moment >= 0.0, "matrix_chebyshev: moment must be >= 0");
  return std::pow(t, -p) * pth_moment;
}

double matrix_chebyshev_inf(double t, const std::map<double, double>& moments) {
  if (moments.empty()) throw DomainError("matrix_chebyshev_inf: empty moment table");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [p, m] : moments) best = std::min(best, matrix_chebyshev(t, p, m));
  return best;
}

const std::vector<double>& default_chebyshev_orders() {
  static const std::vector<double> orders = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  return orders;
}

double laplace_tail(int d, double c1, double c2, double t) {
  require(d >= 1 && c1 >= 0.0 && c2 >= 0.0 && t >= 0.0, "laplace_tail: need d >= 1, c1, c2, t >= 0");
  if (t == 0.0) return d;
  const double denom = 2.0 * c1 + 2.0 * c2 * t;
  if (denom == 0.0) return 0.0;
  return clip_tail(d, d * std::exp(-t * t / denom));
}

double laplace_expectation(int d, double c1, double c2) {
  require(d >= 1 && c1 >= 0.0 && c2 >= 0.0, "laplace_expectation: need d >= 1, c1, c2 >= 0");
  const double ld = std::log(static_cast<double>(d));
  return std::sqrt(2.0 * c1 * ld) + c2 * ld;
}

namespace {

struct MeanValueTraces {
  double diff;   // tr[(A-B)^2 (psi A + psi B)]
  double c;      // tr[C^2 (psi A + psi B)]
};

MeanValueTraces mean_value_traces(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                                  const std::function<double(double)>& psi) {
  if (a.dim() != b.dim() || a.dim() != c.dim()) throw DimensionError("mean_value: dimension mismatch");
  auto checked = [&](double x) {
    const double y = psi(x);
    if (y < 0.0) {
      std::ostringstream os;
      os << "mean_value: psi is negative (" << y << ") at eigenvalue " << x;
      throw DomainError(os.str());
    }
    return y;
  };
  const ComplexMatrix w = matrix_function(a, checked).matrix() + matrix_function(b, checked).matrix();
  const ComplexMatrix dm = a.matrix() - b.matrix();
  return {std::max(0.0, real_trace(dm * dm * w)), std::max(0.0, real_trace(c.matrix() * c.matrix() * w))};
}

}  // namespace

double mean_value_rhs(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                      const std::function<double(double)>& psi) {
  const auto t = mean_value_traces(a, b, c, psi);
  if (t.diff == 0.0 || t.c == 0.0) return 0.0;
  return 0.5 * std::sqrt(t.diff * t.c);
}

double mean_value_objective(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                            const std::function<double(double)>& psi, double s) {
  require(s > 0.0, "mean_value_objective: s must be > 0");
  const auto t = mean_value_traces(a, b, c, psi);
  return 0.25 * (s * t.diff + t.c / s);
}

double mean_value_lhs(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                      const std::function<double(double)>& phi) {
  const ComplexMatrix diff = matrix_function(a, phi).matrix() - matrix_function(b, phi).matrix();
  return real_trace(c.matrix() * diff);
}

YoungSides young_entropy_check(const std::vector<HermitianMatrix>& x, const std::vector<HermitianMatrix>& y,
                               const std::vector<double>& weights) {
  if (x.size() != y.size() || x.size() != weights.size() || x.empty()) {
    throw DimensionError("young_entropy_check: ensembles must be nonempty and of equal size");
  }
  double lhs = 0.0, ent = 0.0;
  std::vector<double> logs;
  std::vector<double> lw;
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const int d = x[k].dim();
    if (y[k].dim() != d) throw DimensionError("young_entropy_check: X and Y dimensions differ");
    const auto ey = eig(y[k]);
    const double scale = std::max(1.0, std::abs(ey.values(d - 1)));
    if (ey.values(0) < -1e-12 * scale) throw DomainError("young_entropy_check: Y is not psd");
    if (std::abs(y[k].trace() / d - 1.0) > 1e-10) throw DomainError("young_entropy_check: trbar Y must be 1");
    lhs += weights[k] * real_trace(x[k].matrix() * y[k].matrix()) / d;
    const auto ylogy = matrix_function(ey, [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; });
    ent += weights[k] * ylogy.trace() / d;
    const RealVector lam = eig(x[k]).values;
    for (int i = 0; i < d; ++i) {
      logs.push_back(lam(i));
      lw.push_back(weights[k] / d);
      mx = std::max(mx, lam(i));
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) s += lw[i] * std::exp(logs[i] - mx);
  return {lhs, mx + std::log(s) + ent};
}

YoungSides young_entropy_check(const HermitianMatrix& x, const HermitianMatrix& y) {
  return young_entropy_check(std::vector<HermitianMatrix>{x}, std::vector<HermitianMatrix>{y}, {1.0});
}

HermitianMatrix gibbs_density(const HermitianMatrix& x) {
  const auto e = eig(x);
  const int d = x.dim();
  const double mx = e.values(d - 1);
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += std::exp(e.values(i) - mx);
  const double norm = s / d;
  return matrix_function(e, [mx, norm](double v) { return std::exp(v - mx) / norm; });
}

}  // namespace matconc
