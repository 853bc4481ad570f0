#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tpreg/errors.hpp"

namespace tpreg::json_util {

inline void require_object(const nlohmann::json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

/// Throws ConfigError naming the first key of `j` not in `allowed`.
inline void reject_unknown(const nlohmann::json& j, std::string_view where,
                           std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view key : allowed) known = known || item.key() == key;
    if (!known) {
      throw ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
    }
  }
}

/// Overwrites `target` with j[key] when present, converting type errors to ConfigError.
template <typename T>
void read(const nlohmann::json& j, const char* key, T& target, std::string_view where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    target = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

}  // namespace tpreg::json_util
