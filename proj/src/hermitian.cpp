#include "matconc/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace matconc {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("hermitian matrix must be square and nonempty");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || !std::isfinite(asym)) {
    throw DomainError("hermitian matrix has non-finite entries");
  }
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "matrix is not hermitian: max|A - A*| = " << asym << ", max|A| = " << scale;
    throw DomainError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix::HermitianMatrix(const RealMatrix& m)
    : HermitianMatrix(ComplexMatrix(m.cast<Complex>())) {}

HermitianMatrix HermitianMatrix::hermitian_part(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError("hermitian matrix must be square and nonempty");
  }
  return HermitianMatrix(0.5 * (m + m.adjoint()), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(int d) {
  return HermitianMatrix(ComplexMatrix::Zero(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(int d) {
  return HermitianMatrix(ComplexMatrix::Identity(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& entries) {
  const int d = static_cast<int>(entries.size());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = entries[i];
  return HermitianMatrix(std::move(m), Trusted{});
}

HermitianMatrix HermitianMatrix::squared() const { return hermitian_part(m_ * m_); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw DimensionError("dimension mismatch in +");
  return HermitianMatrix(m_ + o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw DimensionError("dimension mismatch in -");
  return HermitianMatrix(m_ - o.m_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator-() const { return HermitianMatrix(-m_, Trusted{}); }

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw DimensionError("dimension mismatch in +=");
  m_ += o.m_;
  return *this;
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.m_, HermitianMatrix::Trusted{});
}

namespace {

double off_diagonal_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (i != j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

// Zeroes m(p,q) with G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] acting on the (p,q) plane.
void jacobi_rotate(ComplexMatrix& m, ComplexMatrix& v, int p, int q) {
  const Complex b = m(p, q);
  const double absb = std::abs(b);
  if (absb == 0.0) return;
  const double a = m(p, p).real();
  const double d = m(q, q).real();
  const Complex phase = std::conj(b / absb);
  const double tau = (d - a) / (2.0 * absb);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex g00 = c, g01 = s, g10 = -s * phase, g11 = c * phase;

  const int n = static_cast<int>(m.rows());
  for (int k = 0; k < n; ++k) {
    const Complex mkp = m(k, p), mkq = m(k, q);
    m(k, p) = mkp * g00 + mkq * g10;
    m(k, q) = mkp * g01 + mkq * g11;
  }
  for (int k = 0; k < n; ++k) {
    const Complex mpk = m(p, k), mqk = m(q, k);
    m(p, k) = std::conj(g00) * mpk + std::conj(g10) * mqk;
    m(q, k) = std::conj(g01) * mpk + std::conj(g11) * mqk;
  }
  m(p, q) = 0.0;
  m(q, p) = 0.0;
  m(p, p) = m(p, p).real();
  m(q, q) = m(q, q).real();
  for (int k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * g00 + vkq * g10;
    v(k, q) = vkp * g01 + vkq * g11;
  }
}

}  // namespace

EigenDecomposition eig(const HermitianMatrix& a) {
  const int n = a.dim();
  ComplexMatrix m = a.matrix();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double hs = m.norm();
  if (!std::isfinite(hs)) throw NumericError("eig: non-finite matrix entries");
  const double threshold = 1e-13 * hs;

  int sweeps = 0;
  double off = off_diagonal_norm(m);
  while (off > threshold) {
    if (sweeps == kJacobiMaxSweeps) {
      std::ostringstream os;
      os << "eig: Jacobi did not converge after " << sweeps << " sweeps (dim " << n
         << ", off-diagonal norm " << off << ", ||A||_HS " << hs << ")";
      throw NumericError(os.str());
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) jacobi_rotate(m, v, p, q);
    ++sweeps;
    off = off_diagonal_norm(m);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return m(i, i).real() < m(j, j).real(); });
  EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values(k) = m(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

HermitianMatrix matrix_function(const EigenDecomposition& e,
                                const std::function<double(double)>& phi) {
  const int n = static_cast<int>(e.values.size());
  RealVector y(n);
  for (int k = 0; k < n; ++k) {
    y(k) = phi(e.values(k));
    if (!std::isfinite(y(k))) {
      std::ostringstream os;
      os << "matrix function undefined at eigenvalue " << e.values(k);
      throw DomainError(os.str());
    }
  }
  return HermitianMatrix::hermitian_part(e.vectors * y.cast<Complex>().asDiagonal() *
                                         e.vectors.adjoint());
}

HermitianMatrix matrix_function(const HermitianMatrix& a,
                                const std::function<double(double)>& phi) {
  return matrix_function(eig(a), phi);
}

double trace_power_abs(const HermitianMatrix& a, double p) {
  if (!(p >= 1.0)) throw DomainError("trace_power_abs requires p >= 1");
  const RealVector lam = eig(a).values;
  double s = 0.0;
  for (int k = 0; k < lam.size(); ++k) s += std::pow(std::abs(lam(k)), p);
  return s;
}

double lambda_min(const HermitianMatrix& a) { return eig(a).values(0); }

double lambda_max(const HermitianMatrix& a) {
  const RealVector lam = eig(a).values;
  return lam(lam.size() - 1);
}

double op_norm(const HermitianMatrix& a) {
  const RealVector lam = eig(a).values;
  return std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
}

bool is_psd(const HermitianMatrix& a, double tol) {
  const RealVector lam = eig(a).values;
  const double norm = std::max(std::abs(lam(0)), std::abs(lam(lam.size() - 1)));
  return lam(0) >= -tol * (1.0 + norm);
}

bool psd_order(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw DimensionError("psd_order: dimension mismatch");
  return is_psd(b - a, tol);
}

double psd_margin(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("psd_margin: dimension mismatch");
  return lambda_min(b - a) / (1.0 + op_norm(a) + op_norm(b));
}

Norms norms(const HermitianMatrix& a) {
  const RealVector lam = eig(a).values;
  const int n = static_cast<int>(lam.size());
  Norms out{};
  out.lambda_min = lam(0);
  out.lambda_max = lam(n - 1);
  out.op = std::max(std::abs(out.lambda_min), std::abs(out.lambda_max));
  out.hs = a.matrix().norm();
  out.trace = lam.cwiseAbs().sum();
  out.normalized_trace = a.trace() / n;
  return out;
}

HermitianMatrix dilation(const ComplexMatrix& h) {
  const int r = static_cast<int>(h.rows()), c = static_cast<int>(h.cols());
  ComplexMatrix m = ComplexMatrix::Zero(r + c, r + c);
  m.topRightCorner(r, c) = h;
  m.bottomLeftCorner(c, r) = h.adjoint();
  return HermitianMatrix::hermitian_part(m);
}

HermitianMatrix random_hermitian(int d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  return HermitianMatrix::hermitian_part(g);
}

HermitianMatrix random_density(int d, Rng& rng) {
  ComplexMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  ComplexMatrix w = g * g.adjoint();
  w *= static_cast<double>(d) / w.trace().real();
  return HermitianMatrix::hermitian_part(w);
}

}  // namespace matconc
