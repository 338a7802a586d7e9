#include "matconc/finite_engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace matconc {

FiniteProductSpace::FiniteProductSpace(std::vector<std::vector<double>> factor_weights,
                                       std::size_t enumeration_cap)
    : weights_(std::move(factor_weights)) {
  if (weights_.empty()) throw ConfigError("product space needs at least one factor");
  std::size_t total = 1;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    auto& w = weights_[i];
    if (w.empty()) throw ConfigError("product space factor " + std::to_string(i) + " is empty");
    double sum = 0.0;
    for (double x : w) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw ConfigError("product space factor " + std::to_string(i) +
                          " has a non-positive weight");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "product space factor " << i << " weights sum to " << sum << ", not 1";
      throw ConfigError(os.str());
    }
    for (double& x : w) x /= sum;
    if (total > enumeration_cap / w.size()) {
      throw ResourceError("product space exceeds the enumeration cap of " +
                          std::to_string(enumeration_cap) + " states");
    }
    total *= w.size();
  }
  if (total > enumeration_cap) {
    throw ResourceError("product space exceeds the enumeration cap of " +
                        std::to_string(enumeration_cap) + " states");
  }
  const int n = num_factors();
  stride_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * weights_[i + 1].size();
  probability_.assign(total, 1.0);
  for (std::size_t z = 0; z < total; ++z)
    for (int i = 0; i < n; ++i) probability_[z] *= weights_[i][coordinate(z, i)];
}

std::shared_ptr<const FiniteProductSpace> FiniteProductSpace::uniform(
    const std::vector<int>& sizes) {
  std::vector<std::vector<double>> w;
  for (int s : sizes) {
    if (s < 1) throw ConfigError("factor size must be >= 1");
    w.emplace_back(s, 1.0 / s);
  }
  return std::make_shared<const FiniteProductSpace>(std::move(w));
}

std::shared_ptr<const FiniteProductSpace> FiniteProductSpace::make(
    std::vector<std::vector<double>> w) {
  return std::make_shared<const FiniteProductSpace>(std::move(w));
}

std::vector<int> FiniteProductSpace::digits(std::size_t state) const {
  std::vector<int> d(num_factors());
  for (int i = 0; i < num_factors(); ++i) d[i] = coordinate(state, i);
  return d;
}

bool FiniteProductSpace::same_shape(const FiniteProductSpace& o) const {
  if (o.num_factors() != num_factors()) return false;
  for (int i = 0; i < num_factors(); ++i)
    if (o.factor_size(i) != factor_size(i)) return false;
  return true;
}

MatrixField::MatrixField(SpacePtr space, int dim, std::vector<ComplexMatrix> values)
    : space_(std::move(space)), dim_(dim), values_(std::move(values)),
      cache_(std::make_shared<Cache>()) {
  if (!space_) throw ConfigError("matrix field needs a space");
  if (values_.size() != space_->num_states()) {
    throw DimensionError("matrix field has " + std::to_string(values_.size()) +
                         " values for " + std::to_string(space_->num_states()) + " states");
  }
  for (const auto& v : values_) {
    if (v.rows() != dim_ || v.cols() != dim_) throw DimensionError("matrix field value has wrong shape");
  }
  cache_->averages.resize(space_->num_factors());
}

MatrixField MatrixField::constant(SpacePtr space, const ComplexMatrix& value) {
  const std::size_t n = space->num_states();
  return MatrixField(std::move(space), static_cast<int>(value.rows()),
                     std::vector<ComplexMatrix>(n, value));
}

MatrixField MatrixField::from_function(SpacePtr space, int dim,
                                       const std::function<ComplexMatrix(std::span<const int>)>& f) {
  std::vector<ComplexMatrix> values;
  values.reserve(space->num_states());
  for (std::size_t z = 0; z < space->num_states(); ++z) {
    const auto d = space->digits(z);
    values.push_back(f(d));
  }
  return MatrixField(std::move(space), dim, std::move(values));
}

MatrixField MatrixField::from_hermitian(SpacePtr space, const std::vector<HermitianMatrix>& values) {
  if (values.empty()) throw DimensionError("matrix field needs values");
  std::vector<ComplexMatrix> m;
  for (const auto& v : values) m.push_back(v.matrix());
  return MatrixField(std::move(space), values.front().dim(), std::move(m));
}

HermitianMatrix MatrixField::hermitian_at(std::size_t z) const {
  return HermitianMatrix::hermitian_part(values_[z]);
}

bool MatrixField::is_hermitian(double tol) const {
  for (const auto& v : values_) {
    const double scale = v.cwiseAbs().maxCoeff();
    if ((v - v.adjoint()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

namespace {

std::vector<ComplexMatrix> average_coordinate(const FiniteProductSpace& s,
                                              const std::vector<ComplexMatrix>& v, int i) {
  std::vector<ComplexMatrix> out(v.size());
  const int k = s.factor_size(i);
  for (std::size_t z = 0; z < v.size(); ++z) {
    if (s.coordinate(z, i) != 0) continue;
    ComplexMatrix acc = s.weight(i, 0) * v[z];
    for (int w = 1; w < k; ++w) acc += s.weight(i, w) * v[s.with_coordinate(z, i, w)];
    for (int w = 0; w < k; ++w) out[s.with_coordinate(z, i, w)] = acc;
  }
  return out;
}

}  // namespace

const std::vector<ComplexMatrix>& MatrixField::coordinate_average(int i) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto& slot = cache_->averages.at(i);
  if (!slot) slot = std::make_unique<std::vector<ComplexMatrix>>(average_coordinate(*space_, values_, i));
  return *slot;
}

void MatrixField::check_compatible(const MatrixField& o) const {
  if (o.space_ != space_ && !(o.space_->same_shape(*space_))) {
    throw DimensionError("fields live on different spaces");
  }
  if (o.dim_ != dim_) throw DimensionError("fields have different matrix dimensions");
}

MatrixField MatrixField::operator+(const MatrixField& o) const {
  check_compatible(o);
  std::vector<ComplexMatrix> v(values_.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = values_[z] + o.values_[z];
  return MatrixField(space_, dim_, std::move(v));
}

MatrixField MatrixField::operator-(const MatrixField& o) const {
  check_compatible(o);
  std::vector<ComplexMatrix> v(values_.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = values_[z] - o.values_[z];
  return MatrixField(space_, dim_, std::move(v));
}

MatrixField MatrixField::operator*(Complex s) const {
  std::vector<ComplexMatrix> v(values_.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = s * values_[z];
  return MatrixField(space_, dim_, std::move(v));
}

MatrixField MatrixField::adjoint() const {
  std::vector<ComplexMatrix> v(values_.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = values_[z].adjoint();
  return MatrixField(space_, dim_, std::move(v));
}

MatrixField product(const MatrixField& f, const MatrixField& g) {
  f.check_compatible(g);
  std::vector<ComplexMatrix> v(f.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = f[z] * g[z];
  return MatrixField(f.space_ptr(), f.dim(), std::move(v));
}

MatrixField MatrixField::map(const std::function<double(double)>& phi) const {
  std::vector<ComplexMatrix> v(values_.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = matrix_function(hermitian_at(z), phi).matrix();
  return MatrixField(space_, dim_, std::move(v));
}

ComplexMatrix expectation(const MatrixField& f) { return expectation(f, f.space()); }

ComplexMatrix expectation(const MatrixField& f, const FiniteProductSpace& measure) {
  if (!measure.same_shape(f.space())) throw DimensionError("measure does not match the field's space");
  ComplexMatrix acc = ComplexMatrix::Zero(f.dim(), f.dim());
  for (std::size_t z = 0; z < f.size(); ++z) acc += measure.probability(z) * f[z];
  return acc;
}

MatrixField coordinate_difference(const MatrixField& f, int i) {
  const auto& avg = f.coordinate_average(i);
  std::vector<ComplexMatrix> v(f.size());
  for (std::size_t z = 0; z < v.size(); ++z) v[z] = f[z] - avg[z];
  return MatrixField(f.space_ptr(), f.dim(), std::move(v));
}

MatrixField generator_apply(const MatrixField& f) {
  const int n = f.space().num_factors();
  std::vector<ComplexMatrix> v(f.size(), ComplexMatrix::Zero(f.dim(), f.dim()));
  for (int i = 0; i < n; ++i) {
    const auto& avg = f.coordinate_average(i);
    for (std::size_t z = 0; z < v.size(); ++z) v[z] -= f[z] - avg[z];
  }
  return MatrixField(f.space_ptr(), f.dim(), std::move(v));
}

namespace {

void check_semigroup_args(const MatrixField& f, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("semigroup time must be finite and >= 0");
  if (f.space().num_factors() > kMaxSemigroupFactors) {
    throw ResourceError("semigroup supports at most " + std::to_string(kMaxSemigroupFactors) +
                        " factors");
  }
}

void subset_sum(const FiniteProductSpace& s, const std::vector<ComplexMatrix>& cur, int k,
                double coeff, double keep, double resample, std::vector<ComplexMatrix>& acc) {
  if (k == s.num_factors()) {
    for (std::size_t z = 0; z < acc.size(); ++z) acc[z] += coeff * cur[z];
    return;
  }
  if (keep > 0.0) subset_sum(s, cur, k + 1, coeff * keep, keep, resample, acc);
  if (resample > 0.0) {
    const auto next = average_coordinate(s, cur, k);
    subset_sum(s, next, k + 1, coeff * resample, keep, resample, acc);
  }
}

}  // namespace

MatrixField semigroup_apply_subset(const MatrixField& f, double t) {
  check_semigroup_args(f, t);
  const double keep = std::exp(-t);
  const double resample = -std::expm1(-t);
  std::vector<ComplexMatrix> acc(f.size(), ComplexMatrix::Zero(f.dim(), f.dim()));
  subset_sum(f.space(), f.values(), 0, 1.0, keep, resample, acc);
  return MatrixField(f.space_ptr(), f.dim(), std::move(acc));
}

MatrixField semigroup_apply_factorized(const MatrixField& f, double t) {
  check_semigroup_args(f, t);
  const double keep = std::exp(-t);
  const double resample = -std::expm1(-t);
  std::vector<ComplexMatrix> cur = f.values();
  for (int i = 0; i < f.space().num_factors(); ++i) {
    const auto avg = average_coordinate(f.space(), cur, i);
    for (std::size_t z = 0; z < cur.size(); ++z) cur[z] = keep * cur[z] + resample * avg[z];
  }
  return MatrixField(f.space_ptr(), f.dim(), std::move(cur));
}

MatrixField semigroup_apply(const MatrixField& f, double t) {
  check_semigroup_args(f, t);
  if (f.space().num_factors() <= 12) return semigroup_apply_subset(f, t);
  return semigroup_apply_factorized(f, t);
}

MatrixField carre_du_champ(const MatrixField& f, const MatrixField& g) {
  const auto& s = f.space();
  if (!s.same_shape(g.space()) || f.dim() != g.dim()) throw DimensionError("carre_du_champ: incompatible fields");
  std::vector<ComplexMatrix> v(f.size(), ComplexMatrix::Zero(f.dim(), f.dim()));
  for (std::size_t z = 0; z < f.size(); ++z) {
    for (int i = 0; i < s.num_factors(); ++i) {
      for (int w = 0; w < s.factor_size(i); ++w) {
        const std::size_t zw = s.with_coordinate(z, i, w);
        if (zw == z) continue;
        v[z] += (0.5 * s.weight(i, w)) * ((f[z] - f[zw]) * (g[z] - g[zw]));
      }
    }
  }
  return MatrixField(f.space_ptr(), f.dim(), std::move(v));
}

MatrixField carre_du_champ(const MatrixField& f) { return carre_du_champ(f, f); }

MatrixField carre_du_champ_from_generator(const MatrixField& f, const MatrixField& g) {
  const auto lfg = generator_apply(product(f, g));
  const auto flg = product(f, generator_apply(g));
  const auto lfg2 = product(generator_apply(f), g);
  return (lfg - flg - lfg2) * 0.5;
}

MatrixField carre_du_champ2(const MatrixField& f, const MatrixField& g) {
  const auto& s = f.space();
  if (!s.same_shape(g.space()) || f.dim() != g.dim()) throw DimensionError("carre_du_champ2: incompatible fields");
  const int n = s.num_factors();
  std::vector<ComplexMatrix> v(f.size(), ComplexMatrix::Zero(f.dim(), f.dim()));
  for (std::size_t z = 0; z < f.size(); ++z) {
    ComplexMatrix acc = ComplexMatrix::Zero(f.dim(), f.dim());
    for (int i = 0; i < n; ++i) {
      const int ki = s.factor_size(i);
      for (int w = 0; w < ki; ++w) {
        const std::size_t zw = s.with_coordinate(z, i, w);
        const double mw = s.weight(i, w);
        acc += mw * ((f[z] - f[zw]) * (g[z] - g[zw]));
        for (int u = 0; u < ki; ++u) {
          const std::size_t zu = s.with_coordinate(z, i, u);
          acc += (mw * s.weight(i, u)) * ((f[zu] - f[zw]) * (g[zu] - g[zw]));
        }
      }
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int u = 0; u < ki; ++u) {
          const std::size_t zi = s.with_coordinate(z, i, u);
          for (int w = 0; w < s.factor_size(j); ++w) {
            const std::size_t zj = s.with_coordinate(z, j, w);
            const std::size_t zij = s.with_coordinate(zi, j, w);
            const double m = s.weight(i, u) * s.weight(j, w);
            acc += m * ((f[z] - f[zi] - f[zj] + f[zij]) * (g[z] - g[zi] - g[zj] + g[zij]));
          }
        }
      }
    }
    v[z] = 0.25 * acc;
  }
  return MatrixField(f.space_ptr(), f.dim(), std::move(v));
}

MatrixField carre_du_champ2(const MatrixField& f) { return carre_du_champ2(f, f); }

MatrixField carre_du_champ2_from_generator(const MatrixField& f, const MatrixField& g) {
  const auto gfg = carre_du_champ_from_generator(f, g);
  const auto a = generator_apply(gfg);
  const auto b = carre_du_champ_from_generator(f, generator_apply(g));
  const auto c = carre_du_champ_from_generator(generator_apply(f), g);
  return (a - b - c) * 0.5;
}

ComplexMatrix dirichlet_form(const MatrixField& f, const MatrixField& g) {
  return expectation(carre_du_champ(f, g));
}

ComplexMatrix dirichlet_form_from_generator(const MatrixField& f, const MatrixField& g) {
  return -expectation(product(f, generator_apply(g)));
}

HermitianMatrix matrix_variance(const MatrixField& f) {
  const ComplexMatrix m = expectation(f);
  return HermitianMatrix::hermitian_part(expectation(product(f, f)) - m * m);
}

namespace {

MatrixField centered(const MatrixField& f) {
  return f - MatrixField::constant(f.space_ptr(), expectation(f));
}

}  // namespace

double trace_moment(const MatrixField& f, double p) {
  const auto c = centered(f);
  double acc = 0.0;
  for (std::size_t z = 0; z < c.size(); ++z) acc += c.space().probability(z) * trace_power_abs(c.hermitian_at(z), p);
  return acc;
}

namespace {

// log E trbar exp(s * g) for a Hermitian field g.
double log_mean_trace_exp(const MatrixField& g, double s) {
  std::vector<double> x;
  std::vector<double> p;
  const double d = g.dim();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < g.size(); ++z) {
    const RealVector lam = eig(g.hermitian_at(z)).values;
    for (int k = 0; k < lam.size(); ++k) {
      x.push_back(s * lam(k));
      p.push_back(g.space().probability(z) / d);
      mx = std::max(mx, x.back());
    }
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += p[k] * std::exp(x[k] - mx);
  return mx + std::log(acc);
}

}  // namespace

double log_trace_mgf(const MatrixField& f, double theta) { return log_mean_trace_exp(centered(f), theta); }

double trace_mgf(const MatrixField& f, double theta) { return std::exp(log_trace_mgf(f, theta)); }

double gamma_trace_moment(const MatrixField& f, double q) {
  const auto g = carre_du_champ(f);
  double acc = 0.0;
  for (std::size_t z = 0; z < g.size(); ++z) {
    const RealVector lam = eig(g.hermitian_at(z)).values;
    double s = 0.0;
    for (int k = 0; k < lam.size(); ++k) s += std::pow(std::max(lam(k), 0.0), q);
    acc += g.space().probability(z) * s;
  }
  return acc;
}

double variance_proxy(const MatrixField& f) {
  const auto g = carre_du_champ(f);
  double v = 0.0;
  for (std::size_t z = 0; z < g.size(); ++z) v = std::max(v, op_norm(g.hermitian_at(z)));
  return v;
}

double r_beta(const MatrixField& f, double beta) {
  if (!(beta > 0.0)) throw DomainError("r_beta requires beta > 0");
  return log_mean_trace_exp(carre_du_champ(f), beta) / beta;
}

MatrixField random_field(SpacePtr space, int dim, Rng& rng) {
  std::vector<ComplexMatrix> v;
  v.reserve(space->num_states());
  for (std::size_t z = 0; z < space->num_states(); ++z) v.push_back(random_hermitian(dim, rng).matrix());
  return MatrixField(std::move(space), dim, std::move(v));
}

MatrixField entry_field(const MatrixField& f, const Eigen::VectorXcd& u, int j, bool imaginary) {
  std::vector<ComplexMatrix> v(f.size(), ComplexMatrix(1, 1));
  for (std::size_t z = 0; z < f.size(); ++z) {
    const Complex x = u.dot(f[z].col(j));  // u* f(z) e_j
    v[z](0, 0) = imaginary ? x.imag() : x.real();
  }
  return MatrixField(f.space_ptr(), 1, std::move(v));
}

}  // namespace matconc
