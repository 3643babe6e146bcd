#include "sphertess/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sphertess {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const UnitVec& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < x.coords().size(); ++i) arr.push_back(x.coords()[i]);
  return arr;
}

nlohmann::json to_json(const HPolytope& P) {
  nlohmann::json j{{"dim", P.dim()}, {"normals", nlohmann::json::array()}, {"vertices", nlohmann::json::array()}};
  for (const auto& n : P.normals()) j["normals"].push_back(to_json(n));
  if (P.witness()) j["witness"] = to_json(*P.witness());
  if (!P.is_whole_sphere()) {
    try {
      const VertexEnumeration ve = enumerate_vertices(P);
      if (ve.line_free) {
        for (const auto& v : ve.vertices) j["vertices"].push_back(to_json(v));
      }
    } catch (const GeometryError&) {
    }
  }
  return j;
}

nlohmann::json to_json(const VPolytope& K) {
  nlohmann::json j{{"dim", K.dim()}, {"vertices", nlohmann::json::array()}};
  for (const auto& v : K.vertices()) j["vertices"].push_back(to_json(v));
  return j;
}

nlohmann::json to_json(const Tessellation& tess) {
  nlohmann::json j{{"dim", tess.dim},
                   {"kind", tess.kind == TessellationKind::Hyperplane ? "hyperplane" : "voronoi"},
                   {"generators", nlohmann::json::array()},
                   {"cells", nlohmann::json::array()}};
  for (const auto& g : tess.generators) j["generators"].push_back(to_json(g));
  for (const auto& c : tess.cells) j["cells"].push_back(to_json(c));
  return j;
}

nlohmann::json to_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"n", e.n}, {"seed", e.seed}};
}

nlohmann::json to_json(const Proportion& p) {
  return {{"successes", p.successes}, {"trials", p.trials}, {"p", p.p},
          {"stderr", p.std_error},    {"ci_lo", p.lo},      {"ci_hi", p.hi}};
}

nlohmann::json to_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"stderr", m.std_error}, {"n", m.n}}; }

UnitVec unit_vec_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("point must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument("point must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return UnitVec(v);
}

HPolytope hpolytope_from_json(const nlohmann::json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<UnitVec> normals;
  for (const auto& n : j.at("normals")) normals.push_back(unit_vec_from_json(n));
  std::optional<UnitVec> witness;
  if (j.contains("witness")) witness = unit_vec_from_json(j.at("witness"));
  if (normals.empty()) return HPolytope(d);
  return HPolytope(d, std::move(normals), std::move(witness));
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i]);
  }
  out += '\n';
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::body() const {
  std::string out;
  append_line(out, header_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace sphertess
