#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "matconc/hermitian.hpp"

namespace matconc {

enum class Domain { Euclidean, Sphere, SpecialOrthogonalProduct };

// f : R^N (or a submanifold of it) -> H_d. Partials are with respect to the
// ambient coordinates; second_partials is row-major N x N.
struct MatrixValuedMap {
  Domain domain = Domain::Euclidean;
  int coordinates = 0;
  int dim = 0;
  std::function<HermitianMatrix(const RealVector&)> evaluate;
  std::function<std::vector<HermitianMatrix>(const RealVector&)> partials;
  std::function<std::vector<HermitianMatrix>(const RealVector&)> second_partials;
};

// z -> sum_i z_i A_i
MatrixValuedMap linear_map(std::vector<HermitianMatrix> a, Domain domain = Domain::Euclidean);
// z -> A0 + sum_i z_i B_i + 1/2 sum_ij z_i z_j C_ij with C symmetric (row-major n x n).
MatrixValuedMap quadratic_map(HermitianMatrix a0, std::vector<HermitianMatrix> b,
                              std::vector<HermitianMatrix> c);
// x -> sum_i x_i^2 A_i
MatrixValuedMap squares_map(std::vector<HermitianMatrix> a, Domain domain = Domain::Sphere);
// Drops analytic derivatives so the finite-difference fallback is used.
MatrixValuedMap without_derivatives(MatrixValuedMap f);

// Analytic partials if present, else central differences with step 1e-5 (1 + |z_i|).
std::vector<HermitianMatrix> partial_derivatives(const MatrixValuedMap& f, const RealVector& z);
// Analytic if present, else central differences of the first partials
// (or of f itself, step 1e-4 (1 + |z_i|), when no partials exist).
std::vector<HermitianMatrix> second_partial_derivatives(const MatrixValuedMap& f, const RealVector& z);

// mu proportional to exp(-W) on R^n with Hess W >= eta I.
struct LogConcaveModel {
  int n = 0;
  double eta = 1.0;
  bool exact_gaussian = false;
  std::function<RealVector(const RealVector&)> gradient;
  std::function<RealMatrix(const RealVector&)> hessian;

  static LogConcaveModel standard_gaussian(int n);
  // W(z) = eta |z|^2 / 2 + |z|^4 / 4
  static LogConcaveModel quartic(int n, double eta);
};

struct MatrixEstimate {
  HermitianMatrix mean;
  RealMatrix stderr_abs;  // entrywise standard error of the complex mean
  std::size_t samples;
  std::uint64_t seed;
};

// Monte Carlo Mehler formula: E f(e^-t z + sqrt(1 - e^-2t) xi).
MatrixEstimate ou_semigroup_estimate(const MatrixValuedMap& f, const RealVector& z, double t,
                                     std::size_t samples, std::uint64_t seed);

// Euler-Maruyama: z - h grad W(z) + sqrt(2h) xi
RealVector langevin_step(const LogConcaveModel& m, const RealVector& z, double h, Rng& rng);

// Thinned Euler-Maruyama chain. Defaults: burn-in 10/(eta h), thinning ceil(1/h).
class LangevinChain {
 public:
  LangevinChain(LogConcaveModel model, double h, Rng rng, long burn_in = -1, long thinning = -1);
  const RealVector& next();
  long burn_in() const { return burn_in_; }
  long thinning() const { return thinning_; }

 private:
  LogConcaveModel model_;
  double h_;
  Rng rng_;
  long burn_in_, thinning_;
  RealVector z_;
};

// sum_i (d_i f)^2
HermitianMatrix gamma_euclidean(const MatrixValuedMap& f, const RealVector& z);
// sum_ij d_ij W d_i f d_j f + sum_ij (d_ij f)^2
HermitianMatrix gamma2_euclidean(const MatrixValuedMap& f, const LogConcaveModel& m, const RealVector& z);

// Uniform point on S^n in R^{n+1}.
RealVector sphere_sample(int n, Rng& rng);
// Tangent Gaussian with per-direction variance 2h followed by the exact geodesic move.
RealVector sphere_brownian_step(const RealVector& x, double h, Rng& rng);
// Ambient components of (I - x x^T) grad f(x).
std::vector<HermitianMatrix> sphere_tangential_gradient(const MatrixValuedMap& f, const RealVector& x);
// sum_j c_j^2 over tangential components
HermitianMatrix gamma_from_gradient(const std::vector<HermitianMatrix>& components, int dim);

struct SphereModel {
  std::vector<HermitianMatrix> a;  // n + 1 coefficients for S^n
  int n() const { return static_cast<int>(a.size()) - 1; }
  int dim() const { return a.front().dim(); }
};

// f(x) = sum x_i A_i ; Gamma = sum A_i^2 - (sum x_i A_i)^2
HermitianMatrix gamma_sphere_linear(const SphereModel& m, const RealVector& x);
// f(x) = sum x_i^2 A_i ; Gamma = 2 sum_ij x_i^2 x_j^2 (A_i - A_j)^2
HermitianMatrix gamma_sphere_quadratic(const SphereModel& m, const RealVector& x);

// Haar-distributed element of SO(d).
RealMatrix so_sample_haar(int d, Rng& rng);
// S_kl with (S_kl)_kl = 1/sqrt2, (S_kl)_lk = -1/sqrt2, ordered by k < l.
std::vector<RealMatrix> skew_basis(int d);
// sum_{k<l} S_kl M S_kl by direct summation
RealMatrix skew_basis_sum(const RealMatrix& m);
// -1/2 (tr M I - M^T)
RealMatrix skew_basis_sum_closed_form(const RealMatrix& m);
// exp(h S) for real skew-symmetric S, via the Hermitian eigendecomposition of iS.
RealMatrix expm_skew(const RealMatrix& s, double h = 1.0);

struct SOConjugationModel {
  std::vector<RealMatrix> a;  // real symmetric d x d
  int d() const { return static_cast<int>(a.front().rows()); }
  int n() const { return static_cast<int>(a.size()); }
};

void validate(const SOConjugationModel& m);
// sum_i O_i A_i O_i^T
HermitianMatrix so_conjugation_value(const SOConjugationModel& m, const std::vector<RealMatrix>& o);
// 1/2 sum_i O_i [(tr A_i^2 - tr[A_i]^2 / d) I + d (A_i - tr[A_i]/d I)^2] O_i^T.
// Throws DomainError if some O_i is not orthogonal within 1e-10.
HermitianMatrix gamma_so_conjugation(const SOConjugationModel& m, const std::vector<RealMatrix>& o);
// sum_i sum_{k<l} (S_kl B_i - B_i S_kl)^2 with B_i = O_i A_i O_i^T
HermitianMatrix gamma_so_commutators(const SOConjugationModel& m, const std::vector<RealMatrix>& o);
// sum_i sum_{k<l} ((f(.., exp(h S_kl) O_i, ..) - f) / h)^2
HermitianMatrix gamma_geodesic_fd(const SOConjugationModel& m, const std::vector<RealMatrix>& o,
                                  double h = 1e-5);

// ||sum A_i^2||
double variance_proxy_sphere_linear(const SphereModel& m);
struct SphereQuadraticProxy {
  double a;       // max_ij ||A_i - A_j||
  double b;       // upper estimate of min_B max_i ||A_i - B||
  double value;   // min(2 a^2, 4 b^2)
};
SphereQuadraticProxy variance_proxy_sphere_quadratic(const SphereModel& m);
// 1/2 sum_i [tr A_i^2 - tr[A_i]^2/d + d ||A_i - tr[A_i]/d I||^2]
double variance_proxy_so(const SOConjugationModel& m);

}  // namespace matconc
