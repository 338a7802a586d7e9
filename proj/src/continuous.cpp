#include "matconc/continuous.hpp"

#include <cmath>
#include <sstream>

namespace matconc {

namespace {

void check_point(const MatrixValuedMap& f, const RealVector& z) {
  if (z.size() != f.coordinates) {
    throw DimensionError("point has " + std::to_string(z.size()) + " coordinates, map expects " +
                         std::to_string(f.coordinates));
  }
}

ComplexMatrix sum_of_squares(const std::vector<HermitianMatrix>& xs, int dim) {
  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (const auto& x : xs) acc += x.matrix() * x.matrix();
  return acc;
}

}  // namespace

MatrixValuedMap linear_map(std::vector<HermitianMatrix> a, Domain domain) {
  if (a.empty()) throw ConfigError("linear map needs coefficients");
  MatrixValuedMap f;
  f.domain = domain;
  f.coordinates = static_cast<int>(a.size());
  f.dim = a.front().dim();
  f.evaluate = [a](const RealVector& z) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.front().dim(), a.front().dim());
    for (std::size_t i = 0; i < a.size(); ++i) acc += z(i) * a[i].matrix();
    return HermitianMatrix::hermitian_part(acc);
  };
  f.partials = [a](const RealVector&) { return a; };
  const int n = f.coordinates, d = f.dim;
  f.second_partials = [n, d](const RealVector&) {
    return std::vector<HermitianMatrix>(n * n, HermitianMatrix::zero(d));
  };
  return f;
}

MatrixValuedMap quadratic_map(HermitianMatrix a0, std::vector<HermitianMatrix> b,
                              std::vector<HermitianMatrix> c) {
  const int n = static_cast<int>(b.size());
  if (static_cast<int>(c.size()) != n * n) throw DimensionError("quadratic map needs n*n second-order terms");
  MatrixValuedMap f;
  f.coordinates = n;
  f.dim = a0.dim();
  f.evaluate = [a0, b, c, n](const RealVector& z) {
    ComplexMatrix acc = a0.matrix();
    for (int i = 0; i < n; ++i) {
      acc += z(i) * b[i].matrix();
      for (int j = 0; j < n; ++j) acc += (0.5 * z(i) * z(j)) * c[i * n + j].matrix();
    }
    return HermitianMatrix::hermitian_part(acc);
  };
  f.partials = [b, c, n](const RealVector& z) {
    std::vector<HermitianMatrix> out;
    for (int k = 0; k < n; ++k) {
      ComplexMatrix acc = b[k].matrix();
      for (int j = 0; j < n; ++j) acc += z(j) * c[k * n + j].matrix();
      out.push_back(HermitianMatrix::hermitian_part(acc));
    }
    return out;
  };
  f.second_partials = [c](const RealVector&) { return c; };
  return f;
}

MatrixValuedMap squares_map(std::vector<HermitianMatrix> a, Domain domain) {
  if (a.empty()) throw ConfigError("squares map needs coefficients");
  MatrixValuedMap f;
  f.domain = domain;
  f.coordinates = static_cast<int>(a.size());
  f.dim = a.front().dim();
  f.evaluate = [a](const RealVector& x) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.front().dim(), a.front().dim());
    for (std::size_t i = 0; i < a.size(); ++i) acc += (x(i) * x(i)) * a[i].matrix();
    return HermitianMatrix::hermitian_part(acc);
  };
  f.partials = [a](const RealVector& x) {
    std::vector<HermitianMatrix> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back((2.0 * x(i)) * a[i]);
    return out;
  };
  const int n = f.coordinates, d = f.dim;
  f.second_partials = [a, n, d](const RealVector&) {
    std::vector<HermitianMatrix> out(n * n, HermitianMatrix::zero(d));
    for (int i = 0; i < n; ++i) out[i * n + i] = 2.0 * a[i];
    return out;
  };
  return f;
}

MatrixValuedMap without_derivatives(MatrixValuedMap f) {
  f.partials = nullptr;
  f.second_partials = nullptr;
  return f;
}

std::vector<HermitianMatrix> partial_derivatives(const MatrixValuedMap& f, const RealVector& z) {
  check_point(f, z);
  if (f.partials) return f.partials(z);
  std::vector<HermitianMatrix> out;
  for (int i = 0; i < f.coordinates; ++i) {
    const double h = 1e-5 * (1.0 + std::abs(z(i)));
    RealVector zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    out.push_back((0.5 / h) * (f.evaluate(zp) - f.evaluate(zm)));
  }
  return out;
}

std::vector<HermitianMatrix> second_partial_derivatives(const MatrixValuedMap& f, const RealVector& z) {
  check_point(f, z);
  if (f.second_partials) return f.second_partials(z);
  const int n = f.coordinates;
  std::vector<HermitianMatrix> out(n * n, HermitianMatrix::zero(f.dim));
  if (f.partials) {
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * (1.0 + std::abs(z(j)));
      RealVector zp = z, zm = z;
      zp(j) += h;
      zm(j) -= h;
      const auto gp = f.partials(zp), gm = f.partials(zm);
      for (int i = 0; i < n; ++i) out[i * n + j] = (0.5 / h) * (gp[i] - gm[i]);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double hi = 1e-4 * (1.0 + std::abs(z(i)));
        const double hj = 1e-4 * (1.0 + std::abs(z(j)));
        auto at = [&](double si, double sj) {
          RealVector w = z;
          w(i) += si * hi;
          w(j) += sj * hj;
          return f.evaluate(w);
        };
        out[i * n + j] = (0.25 / (hi * hj)) * (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1));
      }
    }
  }
  // symmetrize in (i, j)
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const HermitianMatrix s = 0.5 * (out[i * n + j] + out[j * n + i]);
      out[i * n + j] = s;
      out[j * n + i] = s;
    }
  return out;
}

LogConcaveModel LogConcaveModel::standard_gaussian(int n) {
  LogConcaveModel m;
  m.n = n;
  m.eta = 1.0;
  m.exact_gaussian = true;
  m.gradient = [](const RealVector& z) { return z; };
  m.hessian = [n](const RealVector&) { return RealMatrix(RealMatrix::Identity(n, n)); };
  return m;
}

LogConcaveModel LogConcaveModel::quartic(int n, double eta) {
  if (!(eta > 0.0)) throw DomainError("log-concave model needs eta > 0");
  LogConcaveModel m;
  m.n = n;
  m.eta = eta;
  m.gradient = [eta](const RealVector& z) { return RealVector(eta * z + z.squaredNorm() * z); };
  m.hessian = [n, eta](const RealVector& z) {
    RealMatrix h = (eta + z.squaredNorm()) * RealMatrix::Identity(n, n) + 2.0 * z * z.transpose();
    return h;
  };
  return m;
}

MatrixEstimate ou_semigroup_estimate(const MatrixValuedMap& f, const RealVector& z, double t,
                                     std::size_t samples, std::uint64_t seed) {
  check_point(f, z);
  if (!(t >= 0.0)) throw DomainError("ou_semigroup_estimate: t must be >= 0");
  const int d = f.dim;
  if (t == 0.0) return {f.evaluate(z), RealMatrix::Zero(d, d), 0, seed};
  if (samples < 2) throw DomainError("ou_semigroup_estimate: need at least 2 samples");
  Rng rng(seed);
  const double a = std::exp(-t), b = std::sqrt(-std::expm1(-2.0 * t));
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  RealMatrix sq = RealMatrix::Zero(d, d);
  RealVector xi(z.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
    const ComplexMatrix v = f.evaluate(a * z + b * xi).matrix();
    sum += v;
    sq += v.cwiseAbs2();
  }
  const double n = static_cast<double>(samples);
  const ComplexMatrix mean = sum / n;
  RealMatrix var = (sq - n * mean.cwiseAbs2()) / (n - 1.0);
  RealMatrix se = (var.cwiseMax(0.0) / n).cwiseSqrt();
  return {HermitianMatrix::hermitian_part(mean), se, samples, seed};
}

RealVector langevin_step(const LogConcaveModel& m, const RealVector& z, double h, Rng& rng) {
  if (!(h > 0.0)) throw DomainError("langevin_step: h must be > 0");
  RealVector out = z - h * m.gradient(z);
  const double s = std::sqrt(2.0 * h);
  for (int i = 0; i < out.size(); ++i) out(i) += s * rng.normal();
  return out;
}

LangevinChain::LangevinChain(LogConcaveModel model, double h, Rng rng, long burn_in, long thinning)
    : model_(std::move(model)), h_(h), rng_(std::move(rng)),
      burn_in_(burn_in >= 0 ? burn_in : static_cast<long>(std::ceil(10.0 / (model_.eta * h)))),
      thinning_(thinning >= 1 ? thinning : static_cast<long>(std::ceil(1.0 / h))),
      z_(RealVector::Zero(model_.n)) {
  if (!(h > 0.0)) throw DomainError("langevin chain: h must be > 0");
  for (long k = 0; k < burn_in_; ++k) z_ = langevin_step(model_, z_, h_, rng_);
}

const RealVector& LangevinChain::next() {
  for (long k = 0; k < thinning_; ++k) z_ = langevin_step(model_, z_, h_, rng_);
  return z_;
}

HermitianMatrix gamma_euclidean(const MatrixValuedMap& f, const RealVector& z) {
  return HermitianMatrix::hermitian_part(sum_of_squares(partial_derivatives(f, z), f.dim));
}

HermitianMatrix gamma2_euclidean(const MatrixValuedMap& f, const LogConcaveModel& m, const RealVector& z) {
  if (m.n != f.coordinates) throw DimensionError("gamma2_euclidean: model and map dimensions differ");
  const int n = f.coordinates;
  const auto g = partial_derivatives(f, z);
  const auto h = second_partial_derivatives(f, z);
  RealMatrix hw;
  if (m.hessian) {
    hw = m.hessian(z);
  } else {
    hw.resize(n, n);
    for (int j = 0; j < n; ++j) {
      const double s = 1e-5 * (1.0 + std::abs(z(j)));
      RealVector zp = z, zm = z;
      zp(j) += s;
      zm(j) -= s;
      hw.col(j) = (m.gradient(zp) - m.gradient(zm)) / (2.0 * s);
    }
    hw = 0.5 * (hw + hw.transpose()).eval();
  }
  ComplexMatrix acc = ComplexMatrix::Zero(f.dim, f.dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      acc += hw(i, j) * (g[i].matrix() * g[j].matrix());
      acc += h[i * n + j].matrix() * h[i * n + j].matrix();
    }
  return HermitianMatrix::hermitian_part(acc);
}

RealVector sphere_sample(int n, Rng& rng) {
  if (n < 1) throw DomainError("sphere dimension must be >= 1");
  RealVector x(n + 1);
  double norm = 0.0;
  do {
    for (int i = 0; i <= n; ++i) x(i) = rng.normal();
    norm = x.norm();
  } while (norm == 0.0);
  return x / norm;
}

RealVector sphere_brownian_step(const RealVector& x, double h, Rng& rng) {
  if (!(h >= 0.0)) throw DomainError("sphere_brownian_step: h must be >= 0");
  if (h == 0.0) return x;
  const double s = std::sqrt(2.0 * h);
  RealVector xi(x.size());
  for (int i = 0; i < xi.size(); ++i) xi(i) = s * rng.normal();
  const RealVector v = xi - x.dot(xi) * x;
  const double r = v.norm();
  if (r == 0.0) return x;
  RealVector y = std::cos(r) * x + (std::sin(r) / r) * v;
  return y / y.norm();
}

std::vector<HermitianMatrix> sphere_tangential_gradient(const MatrixValuedMap& f, const RealVector& x) {
  const auto g = partial_derivatives(f, x);
  const int n = static_cast<int>(g.size());
  std::vector<HermitianMatrix> out;
  for (int j = 0; j < n; ++j) {
    ComplexMatrix acc = ComplexMatrix::Zero(f.dim, f.dim);
    for (int i = 0; i < n; ++i) {
      const double p = (i == j ? 1.0 : 0.0) - x(i) * x(j);
      acc += p * g[i].matrix();
    }
    out.push_back(HermitianMatrix::hermitian_part(acc));
  }
  return out;
}

HermitianMatrix gamma_from_gradient(const std::vector<HermitianMatrix>& components, int dim) {
  return HermitianMatrix::hermitian_part(sum_of_squares(components, dim));
}

namespace {

void check_sphere(const SphereModel& m, const RealVector& x) {
  if (m.a.size() < 2) throw ConfigError("sphere model needs at least two coefficients");
  if (x.size() != static_cast<int>(m.a.size())) throw DimensionError("sphere point has the wrong dimension");
}

}  // namespace

HermitianMatrix gamma_sphere_linear(const SphereModel& m, const RealVector& x) {
  check_sphere(m, x);
  const int d = m.dim();
  ComplexMatrix sq = ComplexMatrix::Zero(d, d), lin = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < m.a.size(); ++i) {
    sq += m.a[i].matrix() * m.a[i].matrix();
    lin += x(i) * m.a[i].matrix();
  }
  return HermitianMatrix::hermitian_part(sq - lin * lin);
}

HermitianMatrix gamma_sphere_quadratic(const SphereModel& m, const RealVector& x) {
  check_sphere(m, x);
  const int d = m.dim();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  const int k = static_cast<int>(m.a.size());
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const ComplexMatrix diff = m.a[i].matrix() - m.a[j].matrix();
      acc += (4.0 * x(i) * x(i) * x(j) * x(j)) * (diff * diff);
    }
  return HermitianMatrix::hermitian_part(acc);
}

RealMatrix so_sample_haar(int d, Rng& rng) {
  if (d < 1) throw DomainError("SO(d) needs d >= 1");
  RealMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  const RealMatrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

std::vector<RealMatrix> skew_basis(int d) {
  std::vector<RealMatrix> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      RealMatrix m = RealMatrix::Zero(d, d);
      m(k, l) = s;
      m(l, k) = -s;
      out.push_back(m);
    }
  return out;
}

RealMatrix skew_basis_sum(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("skew_basis_sum needs a square matrix");
  RealMatrix acc = RealMatrix::Zero(m.rows(), m.cols());
  for (const auto& s : skew_basis(static_cast<int>(m.rows()))) acc += s * m * s;
  return acc;
}

RealMatrix skew_basis_sum_closed_form(const RealMatrix& m) {
  return -0.5 * (m.trace() * RealMatrix::Identity(m.rows(), m.cols()) - m.transpose());
}

RealMatrix expm_skew(const RealMatrix& s, double h) {
  const ComplexMatrix is = Complex(0.0, 1.0) * s.cast<Complex>();
  const auto e = eig(HermitianMatrix::hermitian_part(is));
  Eigen::VectorXcd ph(e.values.size());
  for (int k = 0; k < ph.size(); ++k) ph(k) = std::exp(Complex(0.0, -h * e.values(k)));
  return (e.vectors * ph.asDiagonal() * e.vectors.adjoint()).real();
}

void validate(const SOConjugationModel& m) {
  if (m.a.empty()) throw ConfigError("SO conjugation model needs coefficients");
  for (const auto& a : m.a) {
    if (a.rows() != m.d() || a.cols() != m.d()) throw DimensionError("SO coefficients must share dimension d");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw DomainError("SO conjugation coefficients must be symmetric");
    }
  }
}

namespace {

void check_rotations(const SOConjugationModel& m, const std::vector<RealMatrix>& o) {
  validate(m);
  if (o.size() != m.a.size()) throw DimensionError("need one rotation per coefficient");
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o[i].rows() != m.d() || o[i].cols() != m.d()) throw DimensionError("rotation has wrong dimension");
    const double err = (o[i].transpose() * o[i] - RealMatrix::Identity(m.d(), m.d())).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
      std::ostringstream os;
      os << "rotation " << i << " is not orthogonal (max |O^T O - I| = " << err << ")";
      throw DomainError(os.str());
    }
  }
}

HermitianMatrix to_hermitian(const RealMatrix& m) { return HermitianMatrix::hermitian_part(m.cast<Complex>()); }

}  // namespace

HermitianMatrix so_conjugation_value(const SOConjugationModel& m, const std::vector<RealMatrix>& o) {
  if (o.size() != m.a.size()) throw DimensionError("need one rotation per coefficient");
  RealMatrix acc = RealMatrix::Zero(m.d(), m.d());
  for (std::size_t i = 0; i < o.size(); ++i) acc += o[i] * m.a[i] * o[i].transpose();
  return to_hermitian(acc);
}

HermitianMatrix gamma_so_conjugation(const SOConjugationModel& m, const std::vector<RealMatrix>& o) {
  check_rotations(m, o);
  const int d = m.d();
  const RealMatrix id = RealMatrix::Identity(d, d);
  RealMatrix acc = RealMatrix::Zero(d, d);
  for (std::size_t i = 0; i < o.size(); ++i) {
    const RealMatrix& a = m.a[i];
    const double tr = a.trace();
    const RealMatrix c = a - (tr / d) * id;
    const RealMatrix inner = ((a * a).trace() - tr * tr / d) * id + d * (c * c);
    acc += 0.5 * o[i] * inner * o[i].transpose();
  }
  return to_hermitian(acc);
}

HermitianMatrix gamma_so_commutators(const SOConjugationModel& m, const std::vector<RealMatrix>& o) {
  check_rotations(m, o);
  const auto basis = skew_basis(m.d());
  RealMatrix acc = RealMatrix::Zero(m.d(), m.d());
  for (std::size_t i = 0; i < o.size(); ++i) {
    const RealMatrix b = o[i] * m.a[i] * o[i].transpose();
    for (const auto& s : basis) {
      const RealMatrix c = s * b - b * s;
      acc += c * c;
    }
  }
  return to_hermitian(acc);
}

HermitianMatrix gamma_geodesic_fd(const SOConjugationModel& m, const std::vector<RealMatrix>& o, double h) {
  check_rotations(m, o);
  if (!(h > 0.0)) throw DomainError("gamma_geodesic_fd: h must be > 0");
  const auto basis = skew_basis(m.d());
  RealMatrix acc = RealMatrix::Zero(m.d(), m.d());
  for (std::size_t i = 0; i < o.size(); ++i) {
    const RealMatrix b = o[i] * m.a[i] * o[i].transpose();
    for (const auto& s : basis) {
      const RealMatrix oi = expm_skew(s, h) * o[i];
      const RealMatrix diff = (oi * m.a[i] * oi.transpose() - b) / h;
      acc += diff * diff;
    }
  }
  return to_hermitian(acc);
}

double variance_proxy_sphere_linear(const SphereModel& m) {
  return op_norm(HermitianMatrix::hermitian_part(sum_of_squares(m.a, m.dim())));
}

SphereQuadraticProxy variance_proxy_sphere_quadratic(const SphereModel& m) {
  const int k = static_cast<int>(m.a.size());
  double a = 0.0;
  int p = 0, q = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double v = op_norm(m.a[i] - m.a[j]);
      if (v > a) {
        a = v;
        p = i;
        q = j;
      }
    }
  auto radius = [&](const HermitianMatrix& b, int* arg) {
    double r = -1.0;
    for (int i = 0; i < k; ++i) {
      const double v = op_norm(m.a[i] - b);
      if (v > r) {
        r = v;
        if (arg) *arg = i;
      }
    }
    return r;
  };
  HermitianMatrix centre = 0.5 * (m.a[p] + m.a[q]);
  double best = radius(centre, nullptr);
  HermitianMatrix cur = centre;
  for (int it = 0; it < 200 && best > 0.0; ++it) {
    int arg = 0;
    radius(cur, &arg);
    const auto e = eig(m.a[arg] - cur);
    const int last = static_cast<int>(e.values.size()) - 1;
    const int top = std::abs(e.values(0)) > std::abs(e.values(last)) ? 0 : last;
    const double sign = e.values(top) >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXcd u = e.vectors.col(top);
    const double step = 0.25 * a / (it + 1.0);
    cur = cur + HermitianMatrix::hermitian_part((sign * step) * (u * u.adjoint()));
    const double r = radius(cur, nullptr);
    if (r < best) best = r;
  }
  return {a, best, std::min(2.0 * a * a, 4.0 * best * best)};
}

double variance_proxy_so(const SOConjugationModel& m) {
  validate(m);
  const int d = m.d();
  double acc = 0.0;
  for (const auto& a : m.a) {
    const double tr = a.trace();
    const RealMatrix c = a - (tr / d) * RealMatrix::Identity(d, d);
    const double nc = op_norm(to_hermitian(c));
    acc += 0.5 * ((a * a).trace() - tr * tr / d + d * nc * nc);
  }
  return acc;
}

}  // namespace matconc
