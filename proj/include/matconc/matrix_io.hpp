#pragma once

#include <string>

#include "json.hpp"
#include "matconc/hermitian.hpp"

namespace matconc {

using json = nlohmann::json;

// {"d": int, "re": [[...]], "im": [[...]]}; "im" may be omitted for real matrices.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);
HermitianMatrix hermitian_from_json(const json& j);

// Round-trip text for a double (shortest representation that parses back exactly).
std::string format_double(double x);

}  // namespace matconc
