#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "matconc/hermitian.hpp"

namespace matconc {

// q is admissible when q == 1 or q >= 1.5.
bool admissible_moment_order(double q);

// sqrt(c (2q - 1)) * gamma_moment^{1/(2q)}
double poly_moment_bound(double c, double q, double gamma_moment);
// d^{1/(2q)} sqrt(c (2q - 1) v)
double poly_moment_bound_uniform(double c, double q, int d, double v);

// beta -> r(beta), optionally with a constant majorant v >= r(beta) for all beta.
struct RCurve {
  std::function<double(double)> r;
  std::optional<double> constant_majorant;

  static RCurve constant(double v);
};

// 64 log-spaced points over [1e-3, 1e6] / c.
std::vector<double> default_beta_grid(double c);

// d * inf_beta exp(-t^2 / (2 c r(beta) + 2 t sqrt(c / beta))), including the
// beta -> infinity limit d exp(-t^2 / (2 c v)) when a constant majorant exists.
double exp_tail_bound(int d, double c, const RCurve& r, double t, const std::vector<double>& beta_grid);
double exp_tail_bound(int d, double c, const RCurve& r, double t);

// d exp(-t^2 / (2 c v)), clipped to [0, d]
double subgaussian_tail(int d, double c, double v, double t);
// min(1, 2 * one_sided)
double two_sided(double one_sided);
// sqrt(2 c v log d)
double expectation_bound(int d, double c, double v);
// c theta^2 r / (2 (1 - c theta^2 / beta)) for |theta| < sqrt(beta / c)
double mgf_bound(double c, double theta, double beta, double r);
// c v theta^2 / 2
double mgf_bound_limit(double c, double theta, double v);

// t^{-p} E tr|X|^p
double matrix_chebyshev(double t, double p, double pth_moment);
// inf over the table entries
double matrix_chebyshev_inf(double t, const std::map<double, double>& moments);
const std::vector<double>& default_chebyshev_orders();

// d exp(-t^2 / (2 c1 + 2 c2 t))
double laplace_tail(int d, double c1, double c2, double t);
// sqrt(2 c1 log d) + c2 log d
double laplace_expectation(int d, double c1, double c2);

// 1/2 sqrt(tr[(A-B)^2 (psi A + psi B)] tr[C^2 (psi A + psi B)])
double mean_value_rhs(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                      const std::function<double(double)>& psi);
// 1/4 tr[(s (A-B)^2 + C^2 / s)(psi A + psi B)] at a given s
double mean_value_objective(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                            const std::function<double(double)>& psi, double s);
// tr[C (phi(A) - phi(B))]
double mean_value_lhs(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                      const std::function<double(double)>& phi);

struct YoungSides {
  double lhs;
  double rhs;
};
// lhs = E trbar[X Y], rhs = log E trbar e^X + E trbar[Y log Y], expectations over
// the weighted ensemble. Each Y must be psd with trbar Y = 1 within 1e-10.
YoungSides young_entropy_check(const std::vector<HermitianMatrix>& x, const std::vector<HermitianMatrix>& y,
                               const std::vector<double>& weights);
YoungSides young_entropy_check(const HermitianMatrix& x, const HermitianMatrix& y);
// e^X / trbar e^X
HermitianMatrix gibbs_density(const HermitianMatrix& x);

}  // namespace matconc
