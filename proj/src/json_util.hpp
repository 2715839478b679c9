#pragma once

// Internal helpers for path-annotated JSON access. Not installed.

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "xview/errors.hpp"

namespace xview::jsonu {

using Json = nlohmann::ordered_json;

inline Json parse_text(const std::string& text, const std::string& what) {
  try {
    // ignore_comments=true: configs may carry // comments
    return Json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

inline const Json* member_opt(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline std::int64_t integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

inline bool bool_at(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return j.get<bool>();
}

inline std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

inline std::array<double, 3> triple_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path + ": expected an array of 3 numbers");
  std::array<double, 3> out{};
  for (std::size_t a = 0; a < 3; ++a)
    out[a] = number_at(j[a], path + "[" + std::to_string(a) + "]");
  return out;
}

}  // namespace xview::jsonu
