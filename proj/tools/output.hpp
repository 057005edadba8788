#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace bdsde::tools {

/// %.17g; non-finite values as nan / inf / -inf.
std::string format_number(double v);

/// Writes `path` with a header row and `path + ".meta.json"` next to it.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const nlohmann::json& meta);

/// Writes pretty-printed JSON followed by a newline.
void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace bdsde::tools
