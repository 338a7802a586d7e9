#pragma once

#include "matconc/finite_engine.hpp"
#include "matconc/matrix_io.hpp"

namespace matconc {

// {"factors": [[w, ...], ...]}
json space_to_json(const FiniteProductSpace& s);
SpacePtr space_from_json(const json& j);

// {"space": {...}, "d": int, "values": [matrix literal, ...]} in state order.
json field_to_json(const MatrixField& f);
MatrixField field_from_json(const json& j);

}  // namespace matconc
