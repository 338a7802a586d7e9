#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "matconc/continuous.hpp"
#include "matconc/matrix_io.hpp"

namespace matconc {

// Draws f(Z) for Z ~ mu.
class MatrixSampler {
 public:
  virtual ~MatrixSampler() = default;
  virtual HermitianMatrix draw() = 0;
};

// A random matrix model with its Bakry-Emery constant and variance proxy.
struct ConcentrationModel {
  std::string kind;
  int dim = 0;
  int n = 0;
  double c = 1.0;
  double v = 0.0;
  std::vector<HermitianMatrix> coefficients;
  std::function<std::unique_ptr<MatrixSampler>(Rng)> make_sampler;
};

ConcentrationModel gaussian_series_model(std::vector<HermitianMatrix> a);
ConcentrationModel sphere_linear_model(SphereModel m);
ConcentrationModel sphere_quadratic_model(SphereModel m);
ConcentrationModel so_conjugation_model(SOConjugationModel m);
// f(z) = sum z_i A_i under the quartic log-concave measure, sampled by a thinned Langevin chain.
ConcentrationModel langevin_model(std::vector<HermitianMatrix> a, double eta, double h,
                                  long burn_in = -1, long thinning = -1);

// {"kind": ..., "coefficients": [matrix literal...], "eta": real, "n": int, "h": real}
ConcentrationModel model_from_json(const json& j);

const std::vector<std::string>& model_kinds();

}  // namespace matconc
