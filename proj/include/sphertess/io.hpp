#pragma once

// JSON and CSV helpers shared by the command-line front end.

#include <string>
#include <vector>

#include <json.hpp>

#include "sphertess/estimators.hpp"
#include "sphertess/processes.hpp"

namespace sphertess {

/// 17 significant digits, "nan"/"inf" spelled out.
std::string format_double(double v);

nlohmann::json to_json(const UnitVec& x);
nlohmann::json to_json(const HPolytope& P);
nlohmann::json to_json(const VPolytope& K);
nlohmann::json to_json(const Tessellation& tess);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const Proportion& p);
nlohmann::json to_json(const MeanEstimate& m);

UnitVec unit_vec_from_json(const nlohmann::json& j);
HPolytope hpolytope_from_json(const nlohmann::json& j);

/// RFC-4180 table with a fixed header; cells are quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }

  /// Header plus rows, each line terminated by "\n".
  std::string body() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

}  // namespace sphertess
