#include "opradius/matrix_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace opradius {

namespace {

using nlohmann::json;

void check_grid(const json& grid, Eigen::Index n, const char* field) {
  if (!grid.is_array() || static_cast<Eigen::Index>(grid.size()) != n)
    throw ParseError(std::string("matrix JSON: \"") + field + "\" must be an n x n array");
  for (const auto& row : grid) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ParseError(std::string("matrix JSON: \"") + field + "\" must be an n x n array");
    for (const auto& v : row) {
      if (!v.is_number())
        throw ParseError(std::string("matrix JSON: \"") + field + "\" entries must be numbers");
      double d = v.get<double>();
      if (!std::isfinite(d))
        throw ParseError(std::string("matrix JSON: \"") + field + "\" entries must be finite");
    }
  }
}

}  // namespace

CMatrix matrix_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("re"))
    throw ParseError("matrix JSON: expected object with \"n\" and \"re\"");
  if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1)
    throw ParseError("matrix JSON: \"n\" must be a positive integer");
  const Eigen::Index n = doc["n"].get<Eigen::Index>();
  check_grid(doc["re"], n, "re");
  const bool has_im = doc.contains("im");
  if (has_im) check_grid(doc["im"], n, "im");

  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double re = doc["re"][i][j].get<double>();
      double im = has_im ? doc["im"][i][j].get<double>() : 0.0;
      a(i, j) = Complex(re, im);
    }
  return a;
}

CMatrix matrix_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return matrix_from_json_text(buf.str());
}

std::string matrix_to_json_text(const CMatrix& a) {
  require_square(a, "matrix_to_json_text");
  const Eigen::Index n = a.rows();
  nlohmann::ordered_json doc;
  doc["n"] = n;
  json re = json::array();
  json im = json::array();
  bool any_im = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index j = 0; j < n; ++j) {
      re_row.push_back(a(i, j).real());
      im_row.push_back(a(i, j).imag());
      any_im = any_im || a(i, j).imag() != 0.0;
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  doc["re"] = re;
  if (any_im) doc["im"] = im;
  return doc.dump();
}

std::string matrix_digest(std::initializer_list<const CMatrix*> mats,
                          std::initializer_list<double> params) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const CMatrix* m : mats) {
    std::int64_t n = m->rows();
    mix(&n, sizeof n);
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        double re = (*m)(i, j).real(), im = (*m)(i, j).imag();
        mix(&re, sizeof re);
        mix(&im, sizeof im);
      }
  }
  for (double p : params) mix(&p, sizeof p);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace opradius
