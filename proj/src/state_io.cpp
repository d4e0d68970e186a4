#include "lueq/state_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lueq {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return doc;
}

std::vector<std::vector<double>> read_grid(const json& doc, const char* key,
                                           const std::string& path) {
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ParseError(path + ": \"" + key + "\" must be a 2-D array");
  std::vector<std::vector<double>> grid;
  for (const json& row : arr) {
    if (!row.is_array()) throw ParseError(path + ": \"" + key + "\" must be a 2-D array");
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) throw ParseError(path + ": \"" + key + "\" entries must be numbers");
      r.push_back(v.get<double>());
    }
    grid.push_back(std::move(r));
  }
  return grid;
}

// %.17g round trips IEEE doubles exactly through decimal.
void print_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void print_grid(std::string& out, const char* key, const ComplexMatrix& m, bool imaginary) {
  out += "  \"";
  out += key;
  out += "\": [\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += "    [";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      print_number(out, imaginary ? m(r, c).imag() : m(r, c).real());
    }
    out += r + 1 < m.rows() ? "],\n" : "]\n";
  }
  out += "  ]";
}

}  // namespace

MatrixFile parse_matrix_file(const std::string& path) {
  const json doc = load_json(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be a JSON object");
  if (!doc.contains("dims")) throw ParseError(path + ": missing \"dims\"");
  if (!doc.contains("re")) throw ParseError(path + ": missing \"re\"");

  MatrixFile out;
  if (!doc["dims"].is_array() || doc["dims"].empty())
    throw ParseError(path + ": \"dims\" must be a nonempty integer array");
  long total = 1;
  for (const json& v : doc["dims"]) {
    if (!v.is_number_integer() || v.get<long>() < 1)
      throw ParseError(path + ": \"dims\" entries must be positive integers");
    out.dims.push_back(v.get<int>());
    total *= out.dims.back();
  }

  if (doc.contains("mode")) {
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "density")
      out.mode = StateMode::Density;
    else if (mode == "hermitian")
      out.mode = StateMode::Hermitian;
    else
      throw ParseError(path + ": \"mode\" must be \"density\" or \"hermitian\"");
  }

  const auto re = read_grid(doc, "re", path);
  if (static_cast<long>(re.size()) != total)
    throw ParseError(path + ": \"re\" has " + std::to_string(re.size()) + " rows, expected " +
                     std::to_string(total));
  for (const auto& row : re)
    if (static_cast<long>(row.size()) != total)
      throw ParseError(path + ": \"re\" rows must have " + std::to_string(total) + " entries");

  std::vector<std::vector<double>> im;
  if (doc.contains("im")) {
    im = read_grid(doc, "im", path);
    if (im.size() != re.size()) throw ParseError(path + ": \"im\" shape differs from \"re\"");
    for (const auto& row : im)
      if (row.size() != re.front().size())
        throw ParseError(path + ": \"im\" shape differs from \"re\"");
  }

  out.matrix.resize(total, total);
  for (long r = 0; r < total; ++r)
    for (long c = 0; c < total; ++c)
      out.matrix(r, c) = Complex(re[r][c], im.empty() ? 0.0 : im[r][c]);
  return out;
}

MultipartiteState parse_state(const std::string& path) {
  const MatrixFile file = parse_matrix_file(path);
  return MultipartiteState(file.matrix, MultipartiteDims(file.dims), file.mode);
}

void write_matrix_file(const ComplexMatrix& m, const std::vector<int>& dims, StateMode mode,
                       const std::string& path) {
  std::string out = "{\n  \"dims\": [";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(dims[i]);
  }
  out += "],\n  \"mode\": \"";
  out += mode == StateMode::Density ? "density" : "hermitian";
  out += "\",\n";
  print_grid(out, "re", m, false);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) {
    out += ",\n";
    print_grid(out, "im", m, true);
  }
  out += "\n}\n";

  std::ofstream file(path);
  if (!file) throw ParseError(path + ": cannot open file for writing");
  file << out;
  if (!file) throw ParseError(path + ": write failed");
}

void write_state(const MultipartiteState& s, const std::string& path) {
  std::vector<int> dims;
  for (int k = 1; k <= s.dims().n(); ++k) dims.push_back(s.dims().dim(k));
  write_matrix_file(s.matrix(), dims, s.mode(), path);
}

}  // namespace lueq
