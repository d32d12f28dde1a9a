#pragma once

// Path-aware accessors for reading validated documents.

#include <cmath>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "relaydiff/errors.hpp"
#include "relaydiff/scenario.hpp"

namespace relaydiff::detail {

using Json = nlohmann::ordered_json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("<document>", std::string("malformed JSON: ") + e.what());
  }
}

inline const Json& member(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(join(path, key), "missing required field");
  return *it;
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path, "expected a finite number");
  return v;
}

inline std::uint64_t as_uint(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw ValidationError(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ValidationError(path, "expected a non-negative integer");
}

inline std::int64_t as_int(const Json& j, const std::string& path) {
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::int64_t>();
  throw ValidationError(path, "expected an integer");
}

inline bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, "expected a boolean");
  return j.get<bool>();
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError(path, "expected a string");
  return j.get<std::string>();
}

inline const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array");
  return j;
}

inline double number_at(const Json& obj, const std::string& key, const std::string& path) {
  return as_number(member(obj, key, path), join(path, key));
}

inline std::uint64_t uint_at(const Json& obj, const std::string& key, const std::string& path) {
  return as_uint(member(obj, key, path), join(path, key));
}

inline Point as_point(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(path, "expected [x, y]");
  return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

inline Json to_json(const Point& p) { return Json::array({p.x, p.y}); }

}  // namespace relaydiff::detail
