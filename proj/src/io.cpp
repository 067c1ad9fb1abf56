#include "curres/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <openssl/evp.h>

#include "curres/barriers.hpp"
#include "curres/errors.hpp"

namespace curres {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header.size()) throw ShapeError("row width does not match CSV header of " + name);
  rows.push_back(std::move(row));
}

namespace {

std::string render_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace

std::string CsvTable::render() const {
  std::string out = "# " + units + "\n";
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + render_cell(row[k]);
    out += "\n";
  }
  return out;
}

nlohmann::json measure_to_json(const MeasureU& u) { return {{"atom", u.atom}, {"cells", u.density}}; }

MeasureU measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cells") || !j["cells"].is_array()) {
    throw ValidationError("measure JSON needs an array field 'cells'");
  }
  auto cells = j["cells"].get<std::vector<double>>();
  const double atom = j.value("atom", 0.0);
  if (atom < 0.0) throw ValidationError("measure atom must be non-negative");
  for (double v : cells) {
    if (!(v >= 0.0)) throw ValidationError("measure density must be non-negative");
  }
  const Grid grid(static_cast<int>(cells.size()));
  return MeasureU(grid, atom, std::move(cells));
}

CsvTable measure_table(const MeasureU& u, const std::string& name) {
  CsvTable t{name, "r: macroscopic position; rho: density per unit length; F: suffix mass", {"r", "rho", "F"}, {}};
  const auto F = suffix_table(u);
  const Grid& g = u.grid;
  for (int i = 0; i < g.cells(); ++i) {
    t.add({g.midpoint(i), u.density[i], F[i + 1] + 0.5 * u.density[i] * g.width()});
  }
  return t;
}

ProfileSpec profile_from_json(const nlohmann::json& j, double default_current) {
  if (!j.is_object() || !j.contains("kind")) throw ValidationError("profile needs a 'kind' field");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "uniform") return ProfileSpec::uniform(j.at("value").get<double>());
  if (kind == "linear") return ProfileSpec::linear(j.at("mass").get<double>(), j.value("j", default_current));
  if (kind == "table") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw ValidationError("table points must be [r, rho] pairs");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return ProfileSpec::table(std::move(pts));
  }
  throw ValidationError("unknown profile kind '" + kind + "'");
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

std::string sha256_hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

}  // namespace curres
