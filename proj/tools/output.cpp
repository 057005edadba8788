#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bdsde::tools {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const nlohmann::json& meta) {
  auto f = open_or_throw(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) f << ',';
      f << cells[k];
    }
    f << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!f) throw std::runtime_error("write failed for '" + path + "'");

  nlohmann::json sidecar = meta;
  sidecar["columns"] = header;
  sidecar["rows"] = rows.size();
  write_json(path + ".meta.json", sidecar);
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  auto f = open_or_throw(path);
  f << doc.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace bdsde::tools
