#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "matconc/bounds.hpp"
#include "matconc/continuous.hpp"
#include "matconc/finite_engine.hpp"
#include "matconc/matrix_io.hpp"
#include "matconc/models.hpp"

namespace matconc {

enum class CheckStatus { Pass, PassMarginal, Fail };
// Identity checks have margin -error <= 0, so "pass-marginal" only applies to inequalities.
enum class CheckKind { Inequality, Identity, MonteCarlo };

const char* to_string(CheckStatus s);

struct VerificationReport {
  std::string name;
  CheckKind kind = CheckKind::Inequality;
  CheckStatus status = CheckStatus::Pass;
  double margin = 0.0;
  double tolerance = 0.0;
  json witness;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
  bool negative_control = false;
  json details = json::object();

  bool passed() const { return status != CheckStatus::Fail; }
};

// One JSON object per report; elapsed_s is null unless include_timing.
json report_to_json(const VerificationReport& r, bool include_timing);

struct MCEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Running minimum of signed margins with the witness of the worst one.
class MarginTracker {
 public:
  MarginTracker();
  void observe(double margin, const std::function<json()>& witness);
  double worst() const { return worst_; }
  std::size_t observations() const { return count_; }
  VerificationReport finish(std::string name, CheckKind kind, double tolerance, std::size_t trials,
                            std::uint64_t seed) const;

 private:
  double worst_;
  json witness_;
  std::size_t count_ = 0;
  std::chrono::steady_clock::time_point start_;
};

// lambda_min(rhs - lhs) / (1 + ||lhs|| + ||rhs||)
double psd_slack(const HermitianMatrix& lhs, const HermitianMatrix& rhs);
// (rhs - lhs) / (1 + |lhs| + |rhs|)
double scalar_slack(double lhs, double rhs);
// -||a - b||_HS / (1 + ||a||_HS + ||b||_HS)
double identity_margin(const ComplexMatrix& a, const ComplexMatrix& b);

// Source of fields for the finite-engine checks. Trial k, slot j draws from
// Rng::stream(seed, 8k + j) unless explicit fields are supplied.
struct FieldBatch {
  SpacePtr space;
  int dim = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::vector<MatrixField> fields;
  // Expectations in identity checks are taken under this measure when set.
  SpacePtr audit_measure;

  MatrixField draw(std::size_t trial, int slot) const;
  std::size_t count() const { return fields.empty() ? trials : fields.size(); }
  const FiniteProductSpace& measure() const { return audit_measure ? *audit_measure : *space; }
};

// Default space for exact checks: n = 3 with factor sizes {2, 3, 2}, uniform weights.
SpacePtr default_check_space();
// Same shape, weights multiplied by (1 + strength (-1)^w) and renormalized.
SpacePtr perturbed_measure(const FiniteProductSpace& s, double strength);

// Gamma(f) <= c Gamma2(f) pointwise; margin lambda_min(c Gamma2 - Gamma) / (1 + ||Gamma2||).
VerificationReport check_bakry_emery(const FieldBatch& b, double c, double tol);
// Random quadratic maps under the standard Gaussian (or quartic log-concave) model.
VerificationReport check_bakry_emery(const LogConcaveModel& m, int dim, std::size_t trials, std::uint64_t seed,
                                     double c, double tol);
// Throws DomainError for models without an implemented Gamma2 (sphere, SO(d)).
VerificationReport check_bakry_emery(const ConcentrationModel& m, std::size_t trials, std::uint64_t seed,
                                     double c, double tol);

VerificationReport check_local_ergodicity(const FieldBatch& b, const std::vector<double>& t_grid, double c,
                                          double tol);
VerificationReport check_local_poincare(const FieldBatch& b, const std::vector<double>& t_grid, double c,
                                        double tol);
VerificationReport check_variance_ergodicity(const FieldBatch& b, const std::vector<double>& t_grid, double alpha,
                                             double tol);
VerificationReport check_matrix_poincare(const FieldBatch& b, double alpha, double tol);
VerificationReport check_jensen(const FieldBatch& b, const std::vector<double>& t_grid,
                                const std::vector<double>& q_list, double tol);

struct ScalarFunction {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> psi;  // |phi'|
};
// identity, x^3, x|x|, sgn(x)|x|^3, sgn(x)|x|^5, exp(+-theta x)
std::vector<ScalarFunction> admissible_functions();
// erf scaled so psi = exp(-x^2), which is not convex
ScalarFunction concave_psi_function();

VerificationReport check_chain_rule(const FieldBatch& b, const std::vector<ScalarFunction>& family, double tol);

VerificationReport check_poly_theorem(const FieldBatch& b, const std::vector<double>& q_list, double c, double tol);
// theta = k/6 * sqrt(beta/c), k = -5..5
VerificationReport check_mgf_theorem(const FieldBatch& b, const std::vector<double>& betas, double c, double tol);

VerificationReport check_reversibility(const FieldBatch& b, const std::vector<double>& t_grid, double tol);
VerificationReport check_generator_symmetry(const FieldBatch& b, double tol);
VerificationReport check_triple_product(const FieldBatch& b, double tol);
VerificationReport check_dimension_reduction(const FieldBatch& b, double tol);
VerificationReport check_dissipation(const FieldBatch& b, const std::vector<double>& t_grid, double tol);
VerificationReport check_semigroup_law(const FieldBatch& b, double tol);
// Gamma and Gamma2 explicit formulas against their generator definitions,
// E Gamma2 = E (Lf)^2 and E Gamma(f,g) = -E f Lg.
VerificationReport check_gamma_identities(const FieldBatch& b, double tol);

VerificationReport check_mean_value(std::size_t trials, int dim, std::uint64_t seed,
                                    const std::vector<ScalarFunction>& family, double tol);
VerificationReport check_young_entropy(std::size_t trials, int dim, std::uint64_t seed, double tol);

enum class TailBranch { LambdaMax, LambdaMin, Norm };
const char* to_string(TailBranch b);
TailBranch tail_branch_from_string(const std::string& s);

struct TailPoint {
  double t;
  MCEstimate tail;
};
struct TailCurve {
  std::vector<TailPoint> points;
  MCEstimate statistic_mean;  // mean of the branch statistic
  double pilot_stderr = 0.0;  // HS-norm standard error of the pilot mean
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Pilot run on stream (seed, 0) estimates E f; the main run on stream (seed, 1)
// records the branch statistic of f - E f. An empty t-grid requests the default grid.
TailCurve mc_tail_curve(const ConcentrationModel& m, std::size_t samples, std::vector<double> t_grid,
                        std::uint64_t seed, TailBranch branch = TailBranch::LambdaMax);
// 20 points from 5 pilot_stderr sqrt(d) to where the subgaussian bound drops below 1e-4.
std::vector<double> default_tail_grid(const ConcentrationModel& m, double pilot_stderr, std::size_t points = 20);

// d exp(-t^2/(2cv)) for lambda branches, two_sided(.) for the norm branch.
double model_tail_bound(const ConcentrationModel& m, TailBranch branch, double t);

VerificationReport check_tail_dominance(const ConcentrationModel& m, std::size_t samples,
                                        const std::vector<double>& t_grid, std::uint64_t seed, TailBranch branch);
VerificationReport check_tail_dominance(const ConcentrationModel& m, const TailCurve& curve, TailBranch branch);
// mean lambda_max(f - E f) - 4 stderr <= sqrt(2 c v log d)
VerificationReport check_expectation_bound(const ConcentrationModel& m, std::size_t samples, std::uint64_t seed);

VerificationReport check_sphere_gamma(int n, int dim, std::size_t trials, std::uint64_t seed, double tol);
VerificationReport check_so_gamma(int d, int n, std::size_t trials, std::uint64_t seed, double rel_tol);
VerificationReport check_skew_basis(int d, std::size_t trials, std::uint64_t seed, double tol);
VerificationReport check_haar(int d, std::size_t trials, std::uint64_t seed, double tol);

}  // namespace matconc
