#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include "popcheck/experiments.hpp"

namespace popcheck::detail {

std::string join(const std::vector<std::string>& names);

/// Rejects keys outside `allowed`, naming the offender and the valid keys.
void require_keys(const nlohmann::json& j, const std::string& where, const std::vector<std::string>& allowed);

template <class T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

}  // namespace popcheck::detail
