#pragma once

#include <string>

#include "json.hpp"

namespace ggames::cli {

/// Parses a config file as JSON or TOML (by extension, falling back to a
/// content sniff). Throws std::domain_error with the offending detail on
/// malformed input.
nlohmann::json load_config_file(const std::string& path);

/// Minimal TOML subset: [section.sub] tables, key = value with strings,
/// booleans, numbers and flat arrays, # comments.
nlohmann::json parse_toml(const std::string& text);

/// Validates an experiment config tree against the documented schema;
/// throws std::domain_error naming the first unknown key.
void validate_config(const nlohmann::json& cfg);

/// JSON text with every floating-point value at 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Reads j[key] as T when present, else returns fallback.
template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (j.is_object() && j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

}  // namespace ggames::cli
