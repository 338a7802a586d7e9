#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "matconc/errors.hpp"
#include "matconc/random.hpp"

namespace matconc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

class HermitianMatrix {
 public:
  // Validates A == A* to 1e-12 * max|entry|, then stores (A + A*)/2.
  explicit HermitianMatrix(const ComplexMatrix& m);
  explicit HermitianMatrix(const RealMatrix& m);

  // For matrices that are Hermitian in exact arithmetic but carry rounding
  // asymmetry (products, sums of products). No validation.
  static HermitianMatrix hermitian_part(const ComplexMatrix& m);

  static HermitianMatrix zero(int d);
  static HermitianMatrix identity(int d);
  static HermitianMatrix diagonal(const std::vector<double>& entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix squared() const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator-() const;
  HermitianMatrix& operator+=(const HermitianMatrix& o);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

struct EigenDecomposition {
  RealVector values;       // ascending
  ComplexMatrix vectors;   // columns are orthonormal eigenvectors
};

inline constexpr int kJacobiMaxSweeps = 30;

// Cyclic complex Jacobi. Throws NumericError if the off-diagonal Frobenius
// norm is still above 1e-13 * ||A||_HS after kJacobiMaxSweeps sweeps.
EigenDecomposition eig(const HermitianMatrix& a);

// U diag(phi(lambda)) U*. Throws DomainError if phi is non-finite at an eigenvalue.
HermitianMatrix matrix_function(const HermitianMatrix& a,
                                const std::function<double(double)>& phi);
HermitianMatrix matrix_function(const EigenDecomposition& e,
                                const std::function<double(double)>& phi);

// tr |A|^p for p >= 1.
double trace_power_abs(const HermitianMatrix& a, double p);

double lambda_min(const HermitianMatrix& a);
double lambda_max(const HermitianMatrix& a);
double op_norm(const HermitianMatrix& a);

// lambda_min(A) >= -tol * (1 + ||A||)
bool is_psd(const HermitianMatrix& a, double tol = 1e-9);
// A <= B in the semidefinite order, i.e. is_psd(B - A, tol).
bool psd_order(const HermitianMatrix& a, const HermitianMatrix& b, double tol = 1e-9);
// lambda_min(B - A) / (1 + ||B|| + ||A||); nonnegative iff A <= B.
double psd_margin(const HermitianMatrix& a, const HermitianMatrix& b);

struct Norms {
  double op;
  double hs;
  double trace;  // trace norm, sum of |lambda_i|
  double normalized_trace;
  double lambda_max;
  double lambda_min;
};
Norms norms(const HermitianMatrix& a);

// [[0, H], [H*, 0]]
HermitianMatrix dilation(const ComplexMatrix& h);

// Standard normal real and imaginary parts, then Hermitized.
HermitianMatrix random_hermitian(int d, Rng& rng);
// W W* normalized to unit normalized trace.
HermitianMatrix random_density(int d, Rng& rng);

}  // namespace matconc
