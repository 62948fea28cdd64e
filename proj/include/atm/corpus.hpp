// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "atm/error.hpp"
#include "atm/io.hpp"

namespace atm {

struct CorpusRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;  // canonical, unique within the record
  int year = 0;
  std::optional<std::string> venue;
};

/// Closed year interval [year_lo, year_hi] with a display label.
struct Window {
  std::string label;
  int year_lo = 0;
  int year_hi = 0;

  bool contains(int year) const { return year >= year_lo && year <= year_hi; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct CorpusConfig {
  std::vector<Window> windows;
  int min_year = 0;
  int max_year = 0;
};

/// The four five-year intervals 1997~2001 .. 2012~2016.
inline std::vector<Window> default_windows() {
  return {{"1997~2001", 1997, 2001},
          {"2002~2006", 2002, 2006},
          {"2007~2011", 2007, 2011},
          {"2012~2016", 2012, 2016}};
}

inline CorpusConfig default_corpus_config() { return {default_windows(), 1997, 2016}; }

struct Corpus {
  std::vector<CorpusRecord> records;
  std::vector<Window> windows;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

/// Canonical author list (sorted) and per-document author indices.
struct AuthorMap {
  std::vector<std::string> authors;
  std::vector<std::vector<std::size_t>> doc_authors;
};

/// Strips surrounding whitespace and collapses internal runs to one space.
inline std::string normalize_author(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : name) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(c);
  }
  if (out.empty()) throw Error(ErrorKind::data, "blank author name");
  return out;
}

/// Windows must be well-formed, ordered by year and pairwise disjoint.
inline void validate_windows(const std::vector<Window>& windows) {
  std::unordered_set<std::string> labels;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.label.empty()) throw Error(ErrorKind::config, "window with empty label");
    if (!labels.insert(w.label).second)
      throw Error(ErrorKind::config, "duplicate window label: " + w.label);
    if (w.year_lo > w.year_hi)
      throw Error(ErrorKind::config, "window " + w.label + " has year_lo > year_hi");
    if (i > 0 && windows[i - 1].year_hi >= w.year_lo)
      throw Error(ErrorKind::config,
                  "windows must be ordered and disjoint: " + windows[i - 1].label + ", " +
                      w.label);
  }
}

/// Parses "label:year_lo:year_hi" (the label itself may not contain ':').
inline Window parse_window(std::string_view spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3)
    throw Error(ErrorKind::usage,
                "window spec must be label:year_lo:year_hi, got '" + std::string(spec) + "'");
  try {
    return {parts[0], std::stoi(parts[1]), std::stoi(parts[2])};
  } catch (const std::exception&) {
    throw Error(ErrorKind::usage, "non-integer year in window spec '" + std::string(spec) + "'");
  }
}

/// Window config file: one `label,year_lo,year_hi` triple per line, `#` comments.
inline std::vector<Window> read_windows_file(const std::filesystem::path& path) {
  std::vector<Window> out;
  for (const auto& line : read_term_list(path)) {
    auto parts = split(line, ',');
    if (parts.size() != 3)
      throw Error(ErrorKind::format, path.string() + ": expected label,year_lo,year_hi: " + line);
    try {
      out.push_back({parts[0], std::stoi(parts[1]), std::stoi(parts[2])});
    } catch (const std::exception&) {
      throw Error(ErrorKind::format, path.string() + ": non-integer year: " + line);
    }
  }
  return out;
}

namespace detail {

inline CorpusRecord parse_record(const std::string& line, std::size_t line_no) {
  auto fail = [line_no](const std::string& why) {
    return Error(ErrorKind::format, "line " + std::to_string(line_no) + ": " + why);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw fail(std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw fail("record is not an object");

  CorpusRecord rec;
  auto get_string = [&](const char* key, bool required) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw fail(std::string("missing key '") + key + "'");
      return std::nullopt;
    }
    if (!it->is_string()) throw fail(std::string("key '") + key + "' is not a string");
    return it->get<std::string>();
  };
  rec.id = *get_string("id", true);
  rec.title = *get_string("title", true);
  rec.abstract = *get_string("abstract", true);
  rec.venue = get_string("venue", false);

  auto year = j.find("year");
  if (year == j.end() || !year->is_number_integer()) throw fail("missing or non-integer 'year'");
  rec.year = year->get<int>();

  auto authors = j.find("authors");
  if (authors == j.end() || !authors->is_array()) throw fail("missing 'authors' array");
  for (const auto& a : *authors) {
    if (!a.is_string()) throw fail("non-string author");
    std::string name;
    try {
      name = normalize_author(a.get<std::string>());
    } catch (const Error&) {
      throw Error(ErrorKind::data, "record " + rec.id + ": blank author name");
    }
    if (std::find(rec.authors.begin(), rec.authors.end(), name) == rec.authors.end())
      rec.authors.push_back(std::move(name));
  }
  if (rec.authors.empty()) throw Error(ErrorKind::data, "record " + rec.id + ": empty author list");
  return rec;
}

}  // namespace detail

/// Reads line-delimited JSON records. Blank lines are skipped; every other
/// line must be one record object.
inline Corpus load_corpus(std::istream& in, const CorpusConfig& config) {
  validate_windows(config.windows);
  if (config.min_year > config.max_year)
    throw Error(ErrorKind::config, "min_year exceeds max_year");

  Corpus corpus;
  corpus.windows = config.windows;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CorpusRecord rec = detail::parse_record(line, line_no);
    if (!ids.insert(rec.id).second)
      throw Error(ErrorKind::data, "record " + rec.id + ": duplicate id");
    if (rec.year < config.min_year || rec.year > config.max_year)
      throw Error(ErrorKind::data, "record " + rec.id + ": year " + std::to_string(rec.year) +
                                       " outside [" + std::to_string(config.min_year) + ", " +
                                       std::to_string(config.max_year) + "]");
    const bool covered = std::any_of(config.windows.begin(), config.windows.end(),
                                     [&](const Window& w) { return w.contains(rec.year); });
    if (!covered)
      throw Error(ErrorKind::data, "record " + rec.id + ": year " + std::to_string(rec.year) +
                                       " falls in no configured window");
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path, const CorpusConfig& config) {
  std::istringstream in(read_file(path));
  return load_corpus(in, config);
}

/// Records whose year lies in the labelled window, in corpus order.
inline Corpus window_slice(const Corpus& corpus, std::string_view label) {
  auto it = std::find_if(corpus.windows.begin(), corpus.windows.end(),
                         [&](const Window& w) { return w.label == label; });
  if (it == corpus.windows.end())
    throw Error(ErrorKind::not_found, "unknown window label: " + std::string(label));
  Corpus out;
  out.windows = corpus.windows;
  for (const auto& rec : corpus.records)
    if (it->contains(rec.year)) out.records.push_back(rec);
  return out;
}

inline AuthorMap build_author_map(const Corpus& corpus) {
  std::map<std::string, std::size_t> index;
  for (const auto& rec : corpus.records)
    for (const auto& a : rec.authors) index.emplace(a, 0);

  AuthorMap map;
  map.authors.reserve(index.size());
  for (auto& [name, idx] : index) {
    idx = map.authors.size();
    map.authors.push_back(name);
  }
  map.doc_authors.reserve(corpus.records.size());
  for (const auto& rec : corpus.records) {
    std::vector<std::size_t> ids;
    for (const auto& a : rec.authors) ids.push_back(index.at(a));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    map.doc_authors.push_back(std::move(ids));
  }
  return map;
}

}  // namespace atm
