#include "matconc/matrix_io.hpp"

#include <cstdio>
#include <cstdlib>

namespace matconc {

json matrix_to_json(const ComplexMatrix& m) {
  const int d = static_cast<int>(m.rows());
  json re = json::array(), im = json::array();
  bool has_im = false;
  for (int i = 0; i < d; ++i) {
    json rr = json::array(), ir = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
      has_im = has_im || m(i, j).imag() != 0.0;
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  json out = {{"d", d}, {"re", re}};
  if (has_im) out["im"] = im;
  return out;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("re")) {
    throw ConfigError("matrix literal needs \"d\" and \"re\"");
  }
  const int d = j.at("d").get<int>();
  if (d < 1) throw ConfigError("matrix literal: d must be >= 1");
  const json& re = j.at("re");
  const bool has_im = j.contains("im");
  auto check_shape = [d](const json& a, const char* what) {
    if (!a.is_array() || static_cast<int>(a.size()) != d) {
      throw ConfigError(std::string("matrix literal: \"") + what + "\" must have d rows");
    }
    for (const auto& row : a) {
      if (!row.is_array() || static_cast<int>(row.size()) != d) {
        throw ConfigError(std::string("matrix literal: \"") + what + "\" rows must have d entries");
      }
    }
  };
  check_shape(re, "re");
  if (has_im) check_shape(j.at("im"), "im");
  ComplexMatrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      m(r, c) = Complex(re[r][c].get<double>(), has_im ? j.at("im")[r][c].get<double>() : 0.0);
  return m;
}

HermitianMatrix hermitian_from_json(const json& j) {
  return HermitianMatrix(matrix_from_json(j));
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace matconc
