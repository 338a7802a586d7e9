#include "matconc/field_io.hpp"

namespace matconc {

json space_to_json(const FiniteProductSpace& s) {
  json factors = json::array();
  for (int i = 0; i < s.num_factors(); ++i) factors.push_back(s.weights(i));
  return {{"factors", factors}};
}

SpacePtr space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("factors") || !j.at("factors").is_array()) {
    throw ConfigError("space needs a \"factors\" array");
  }
  std::vector<std::vector<double>> w;
  for (const auto& f : j.at("factors")) {
    if (!f.is_array()) throw ConfigError("each factor must be an array of weights");
    w.push_back(f.get<std::vector<double>>());
  }
  return FiniteProductSpace::make(std::move(w));
}

json field_to_json(const MatrixField& f) {
  json values = json::array();
  for (const auto& v : f.values()) values.push_back(matrix_to_json(v));
  return {{"space", space_to_json(f.space())}, {"d", f.dim()}, {"values", values}};
}

MatrixField field_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space") || !j.contains("d") || !j.contains("values")) {
    throw ConfigError("field needs \"space\", \"d\" and \"values\"");
  }
  auto space = space_from_json(j.at("space"));
  const int d = j.at("d").get<int>();
  std::vector<ComplexMatrix> values;
  for (const auto& v : j.at("values")) {
    ComplexMatrix m = matrix_from_json(v);
    if (m.rows() != d) throw ConfigError("field value dimension does not match \"d\"");
    values.push_back(HermitianMatrix(m).matrix());
  }
  if (values.size() != space->num_states()) {
    throw ConfigError("field has " + std::to_string(values.size()) + " values for " +
                      std::to_string(space->num_states()) + " states");
  }
  return MatrixField(std::move(space), d, std::move(values));
}

}  // namespace matconc
