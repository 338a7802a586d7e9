#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "matconc/hermitian.hpp"

namespace matconc {

inline constexpr std::size_t kDefaultEnumerationCap = 100000;
inline constexpr int kMaxSemigroupFactors = 20;

// Omega = Omega_1 x ... x Omega_n with product measure mu = mu_1 x ... x mu_n.
// States are indexed in mixed radix with the last factor varying fastest.
class FiniteProductSpace {
 public:
  // Weights must be > 0 and sum to 1 within 1e-12; they are renormalized exactly.
  explicit FiniteProductSpace(std::vector<std::vector<double>> factor_weights,
                              std::size_t enumeration_cap = kDefaultEnumerationCap);

  static std::shared_ptr<const FiniteProductSpace> uniform(const std::vector<int>& sizes);
  static std::shared_ptr<const FiniteProductSpace> make(std::vector<std::vector<double>> w);

  int num_factors() const { return static_cast<int>(weights_.size()); }
  int factor_size(int i) const { return static_cast<int>(weights_[i].size()); }
  const std::vector<double>& weights(int i) const { return weights_[i]; }
  double weight(int i, int w) const { return weights_[i][w]; }
  std::size_t num_states() const { return probability_.size(); }
  double probability(std::size_t state) const { return probability_[state]; }

  int coordinate(std::size_t state, int i) const {
    return static_cast<int>((state / stride_[i]) % weights_[i].size());
  }
  // (z; w)_i : replace coordinate i of z by w
  std::size_t with_coordinate(std::size_t state, int i, int w) const {
    return state + (static_cast<std::ptrdiff_t>(w) - coordinate(state, i)) *
                       static_cast<std::ptrdiff_t>(stride_[i]);
  }
  std::size_t stride(int i) const { return stride_[i]; }
  std::vector<int> digits(std::size_t state) const;

  bool same_shape(const FiniteProductSpace& o) const;

 private:
  std::vector<std::vector<double>> weights_;
  std::vector<std::size_t> stride_;
  std::vector<double> probability_;
};

using SpacePtr = std::shared_ptr<const FiniteProductSpace>;

// Matrix-valued function on a finite product space. Values are general complex
// matrices because bilinear quantities such as Gamma(f, g) need not be Hermitian.
class MatrixField {
 public:
  MatrixField(SpacePtr space, int dim, std::vector<ComplexMatrix> values);

  static MatrixField constant(SpacePtr space, const ComplexMatrix& value);
  static MatrixField from_function(SpacePtr space, int dim,
                                   const std::function<ComplexMatrix(std::span<const int>)>& f);
  static MatrixField from_hermitian(SpacePtr space, const std::vector<HermitianMatrix>& values);

  const FiniteProductSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  const ComplexMatrix& operator[](std::size_t z) const { return values_[z]; }
  const std::vector<ComplexMatrix>& values() const { return values_; }

  HermitianMatrix hermitian_at(std::size_t z) const;
  bool is_hermitian(double tol = 1e-12) const;

  // E_i f(z) = sum_w mu_i(w) f((z; w)_i); computed once per field and coordinate.
  const std::vector<ComplexMatrix>& coordinate_average(int i) const;

  MatrixField operator+(const MatrixField& o) const;
  MatrixField operator-(const MatrixField& o) const;
  MatrixField operator*(Complex s) const;
  MatrixField adjoint() const;
  // Pointwise matrix product.
  friend MatrixField product(const MatrixField& f, const MatrixField& g);
  // Pointwise phi(f(z)); f must be Hermitian.
  MatrixField map(const std::function<double(double)>& phi) const;

 private:
  void check_compatible(const MatrixField& o) const;

  struct Cache {
    std::mutex mutex;
    std::vector<std::unique_ptr<std::vector<ComplexMatrix>>> averages;
  };

  SpacePtr space_;
  int dim_;
  std::vector<ComplexMatrix> values_;
  std::shared_ptr<Cache> cache_;
};

MatrixField product(const MatrixField& f, const MatrixField& g);

ComplexMatrix expectation(const MatrixField& f);
// Expectation of f under another measure on the same state set.
ComplexMatrix expectation(const MatrixField& f, const FiniteProductSpace& measure);

// f - E_i f
MatrixField coordinate_difference(const MatrixField& f, int i);

// Lf = -sum_i (f - E_i f)
MatrixField generator_apply(const MatrixField& f);

// P_t f via the subset expansion sum_I (1 - e^-t)^|I| e^{-t(n-|I|)} E_I f.
MatrixField semigroup_apply_subset(const MatrixField& f, double t);
// P_t f as the product of one-coordinate kernels e^-t Id + (1 - e^-t) E_i.
MatrixField semigroup_apply_factorized(const MatrixField& f, double t);
// Subset expansion for n <= 12, factorized beyond; ResourceError for n > 20.
MatrixField semigroup_apply(const MatrixField& f, double t);

// Gamma(f,g)(z) = 1/2 sum_i E_Z[(f(z) - f((z;Z)_i)) (g(z) - g((z;Z)_i))]
MatrixField carre_du_champ(const MatrixField& f, const MatrixField& g);
MatrixField carre_du_champ(const MatrixField& f);
// 1/2 [L(fg) - f Lg - (Lf) g]
MatrixField carre_du_champ_from_generator(const MatrixField& f, const MatrixField& g);

// Explicit resampling formula for the iterated carre du champ.
MatrixField carre_du_champ2(const MatrixField& f, const MatrixField& g);
MatrixField carre_du_champ2(const MatrixField& f);
// 1/2 [L Gamma(f,g) - Gamma(f, Lg) - Gamma(Lf, g)] with Gamma taken from the generator.
MatrixField carre_du_champ2_from_generator(const MatrixField& f, const MatrixField& g);

// E_mu Gamma(f, g)
ComplexMatrix dirichlet_form(const MatrixField& f, const MatrixField& g);
// -E_mu[f Lg]
ComplexMatrix dirichlet_form_from_generator(const MatrixField& f, const MatrixField& g);

// E f^2 - (E f)^2
HermitianMatrix matrix_variance(const MatrixField& f);

// E tr |f - E f|^p
double trace_moment(const MatrixField& f, double p);
// E trbar exp(theta (f - E f))
double trace_mgf(const MatrixField& f, double theta);
// log E trbar exp(theta (f - E f)), evaluated without overflow
double log_trace_mgf(const MatrixField& f, double theta);
// E tr Gamma(f)^q
double gamma_trace_moment(const MatrixField& f, double q);
// max_z ||Gamma(f)(z)||
double variance_proxy(const MatrixField& f);
// (1/beta) log E trbar exp(beta Gamma(f))
double r_beta(const MatrixField& f, double beta);

// Values are standard-normal complex matrices Hermitized pointwise.
MatrixField random_field(SpacePtr space, int dim, Rng& rng);
// Scalar (1x1) field z -> Re or Im of u* f(z) e_j.
MatrixField entry_field(const MatrixField& f, const Eigen::VectorXcd& u, int j, bool imaginary);

}  // namespace matconc
