#include "schatten_qp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sqp::io {

json matrix_to_json(const Matrix& m, const Dims& dims) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (!dims.empty()) j["dims"] = dims;
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

Matrix matrix_from_json(const json& j, Dims* dims) {
  try {
    if (!j.is_object()) throw ParseError("matrix must be a JSON object");
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im;
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (rows < 0 || cols < 0) throw ParseError("negative matrix shape");
    const size_t n = static_cast<size_t>(rows) * cols;
    if (re.size() != n) throw ParseError("\"re\" has " + std::to_string(re.size()) + " entries, expected " + std::to_string(n));
    if (!im.empty() && im.size() != n) throw ParseError("\"im\" length does not match \"re\"");
    std::vector<Complex> entries(n);
    for (size_t k = 0; k < n; ++k) entries[k] = Complex(re[k], im.empty() ? 0.0 : im[k]);
    if (dims) {
      dims->clear();
      if (j.contains("dims")) *dims = j.at("dims").get<Dims>();
    }
    return make_matrix(rows, cols, entries);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad matrix JSON: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw ParseError(e.what());
  } catch (const NonFinite& e) {
    throw ParseError(e.what());
  }
}

BipartiteOperator operator_from_json(const json& j) {
  Dims dims;
  Matrix m = matrix_from_json(j, &dims);
  if (dims.empty()) throw ParseError("operator JSON needs a \"dims\" list");
  try {
    return BipartiteOperator(std::move(m), dims);
  } catch (const ShapeMismatch& e) {
    throw ParseError(e.what());
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

json round_numbers(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(round_numbers(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(it.value());
    return out;
  }
  return j;
}

}  // namespace

std::string dump_rounded(const json& j, int indent) { return round_numbers(j).dump(indent); }

}  // namespace sqp::io
