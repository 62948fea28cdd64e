// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atm/error.hpp"

namespace atmtool {

/// Levenshtein distance over bytes.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Up to `n` names closest to `query`, by edit distance then name.
inline std::vector<std::string> closest_names(std::string_view query,
                                              const std::vector<std::string>& names,
                                              std::size_t n = 5) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& name : names) scored.emplace_back(edit_distance(query, name), name);
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

/// Process exit status for each error kind.
inline int exit_code(atm::ErrorKind kind) {
  switch (kind) {
    case atm::ErrorKind::io: return 2;
    case atm::ErrorKind::data: return 3;
    case atm::ErrorKind::config: return 4;
    case atm::ErrorKind::format: return 5;
    case atm::ErrorKind::not_found: return 6;
    case atm::ErrorKind::usage: return 64;
  }
  return 1;
}

}  // namespace atmtool
