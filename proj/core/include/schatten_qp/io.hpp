#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "schatten_qp/linalg.hpp"

namespace sqp::io {

using nlohmann::json;

// {"rows","cols","dims"?,"re","im"} with row-major real arrays.
json matrix_to_json(const Matrix& m, const Dims& dims = {});
Matrix matrix_from_json(const json& j, Dims* dims = nullptr);

BipartiteOperator operator_from_json(const json& j);

// Parses JSON text, throwing ParseError with a readable message on failure.
json parse_json(const std::string& text);
json read_json_file(const std::string& path);

// Doubles rendered with 12 significant digits, as a JSON number token.
std::string format_number(double v);
// Serializes with every floating-point number rounded to 12 significant digits.
std::string dump_rounded(const json& j, int indent = 2);

}  // namespace sqp::io
