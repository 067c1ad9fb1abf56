#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "curres/lattice.hpp"
#include "curres/measure.hpp"

namespace curres {

/// Shortest round-trippable-enough decimal form used in every CSV (%.12g).
std::string format_number(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

/// CSV file: a units comment line, a header row, then data rows.
struct CsvTable {
  std::string name;
  std::string units;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  std::string render() const;
};

nlohmann::json measure_to_json(const MeasureU& u);
MeasureU measure_from_json(const nlohmann::json& j);

/// (r, rho(r), F(r)) at cell midpoints plus the node values of F.
CsvTable measure_table(const MeasureU& u, const std::string& name);

/// {"kind": "linear", "mass", "j"} | {"kind": "uniform", "value"} |
/// {"kind": "table", "points": [[r, rho], ...]}.
ProfileSpec profile_from_json(const nlohmann::json& j, double default_current = 1.0);

/// Writes bytes to path, creating parent directories.
void write_file(const std::string& path, const std::string& content);

/// Lower-case hex SHA-256 of the content.
std::string sha256_hex(const std::string& content);

}  // namespace curres
