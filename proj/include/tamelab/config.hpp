#pragma once

#include <string>

#include "json.hpp"

namespace tamelab {

// Small TOML subset: comments, [table.sub] headers, key = value with dotted
// keys, values being strings, numbers, booleans or (nested) arrays of those.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin = "<string>");
nlohmann::json parse_config_file(const std::string& path);

}  // namespace tamelab
