// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <charconv>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "atm/error.hpp"
#include "atm/io.hpp"
#include "atm/textprep.hpp"

namespace atm {

// Text artifacts written by `prep`, one set per window:
//
//   vocab.tsv    id<TAB>term<TAB>doc_freq
//   authors.tsv  index<TAB>name<TAB>doc_count
//   bag.tsv      "# atm-bag v1" header, optional "# dropped<TAB>id" lines, then
//                doc_id<TAB>author,author,...<TAB>term:count term:count ...
inline constexpr std::string_view kBagHeader = "# atm-bag v1";

namespace detail {

inline std::size_t parse_index(std::string_view s, const std::string& where) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::format, where + ": expected a non-negative integer, got '" +
                                       std::string(s) + "'");
  return v;
}

inline void check_field(std::string_view s, const char* what) {
  if (s.find_first_of("\t\n\r") != std::string_view::npos)
    throw Error(ErrorKind::format, std::string(what) + " contains a tab or newline: " + std::string(s));
}

inline std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace detail

inline std::string vocabulary_tsv(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    detail::check_field(vocab.terms[v], "term");
    out += std::to_string(v) + '\t' + vocab.terms[v] + '\t' + std::to_string(vocab.doc_freq[v]) + '\n';
  }
  return out;
}

inline Vocabulary parse_vocabulary(const std::string& text, const std::string& where = "vocabulary") {
  Vocabulary vocab;
  std::size_t line_no = 0;
  for (const auto& line : detail::data_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string at = where + ":" + std::to_string(line_no);
    auto f = split(line, '\t');
    if (f.size() != 3) throw Error(ErrorKind::format, at + ": expected id<TAB>term<TAB>doc_freq");
    if (detail::parse_index(f[0], at) != vocab.terms.size())
      throw Error(ErrorKind::format, at + ": ids must be consecutive from 0");
    if (!vocab.term_to_id.emplace(f[1], vocab.terms.size()).second)
      throw Error(ErrorKind::format, at + ": duplicate term " + f[1]);
    vocab.terms.push_back(f[1]);
    vocab.doc_freq.push_back(detail::parse_index(f[2], at));
  }
  return vocab;
}

inline std::string authors_tsv(const BagCorpus& bag) {
  const auto counts = bag.author_doc_counts();
  std::string out;
  for (std::size_t a = 0; a < bag.num_authors(); ++a) {
    detail::check_field(bag.authors[a], "author");
    out += std::to_string(a) + '\t' + bag.authors[a] + '\t' + std::to_string(counts[a]) + '\n';
  }
  return out;
}

inline std::vector<std::string> parse_authors(const std::string& text,
                                              const std::string& where = "authors") {
  std::vector<std::string> authors;
  std::size_t line_no = 0;
  for (const auto& line : detail::data_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string at = where + ":" + std::to_string(line_no);
    auto f = split(line, '\t');
    if (f.size() != 3) throw Error(ErrorKind::format, at + ": expected index<TAB>name<TAB>doc_count");
    if (detail::parse_index(f[0], at) != authors.size())
      throw Error(ErrorKind::format, at + ": indices must be consecutive from 0");
    authors.push_back(f[1]);
  }
  return authors;
}

inline std::string bag_tsv(const BagCorpus& bag) {
  std::string out(kBagHeader);
  out += '\n';
  for (const auto& id : bag.dropped_doc_ids) {
    detail::check_field(id, "document id");
    out += "# dropped\t" + id + '\n';
  }
  for (std::size_t d = 0; d < bag.num_docs(); ++d) {
    detail::check_field(bag.doc_ids[d], "document id");
    out += bag.doc_ids[d];
    out += '\t';
    for (std::size_t i = 0; i < bag.doc_authors[d].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(bag.doc_authors[d][i]);
    }
    out += '\t';
    for (std::size_t i = 0; i < bag.docs[d].size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(bag.docs[d][i].term) + ':' + std::to_string(bag.docs[d][i].count);
    }
    out += '\n';
  }
  return out;
}

/// Rebuilds a BagCorpus from its three text artifacts, checking every index
/// and the sortedness rules that vectorize guarantees.
inline BagCorpus parse_bag(const std::string& bag_text, std::vector<std::string> terms,
                           std::vector<std::string> authors, const std::string& where = "bag") {
  BagCorpus bag;
  bag.terms = std::move(terms);
  bag.authors = std::move(authors);
  const auto lines = detail::data_lines(bag_text);
  if (lines.empty() || lines[0] != kBagHeader)
    throw Error(ErrorKind::format, where + ": missing '" + std::string(kBagHeader) + "' header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const std::string at = where + ":" + std::to_string(i + 1);
    if (line.empty()) continue;
    if (line.rfind("# dropped\t", 0) == 0) {
      bag.dropped_doc_ids.push_back(line.substr(10));
      continue;
    }
    if (line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() != 3) throw Error(ErrorKind::format, at + ": expected doc_id<TAB>authors<TAB>terms");
    std::vector<std::size_t> doc_authors;
    for (const auto& a : split(f[1], ',')) {
      const auto idx = detail::parse_index(a, at);
      if (idx >= bag.num_authors()) throw Error(ErrorKind::format, at + ": author index out of range");
      if (!doc_authors.empty() && idx <= doc_authors.back())
        throw Error(ErrorKind::format, at + ": author indices must be strictly increasing");
      doc_authors.push_back(idx);
    }
    std::vector<TermCount> row;
    for (const auto& pair : split(f[2], ' ')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw Error(ErrorKind::format, at + ": expected term:count");
      const TermCount tc{detail::parse_index(std::string_view(pair).substr(0, colon), at),
                         detail::parse_index(std::string_view(pair).substr(colon + 1), at)};
      if (tc.term >= bag.vocab_size()) throw Error(ErrorKind::format, at + ": term id out of range");
      if (tc.count == 0) throw Error(ErrorKind::format, at + ": zero count");
      if (!row.empty() && tc.term <= row.back().term)
        throw Error(ErrorKind::format, at + ": term ids must be strictly increasing");
      row.push_back(tc);
      bag.n_tokens += tc.count;
    }
    if (doc_authors.empty() || row.empty())
      throw Error(ErrorKind::format, at + ": document has no authors or no terms");
    bag.doc_ids.push_back(f[0]);
    bag.doc_authors.push_back(std::move(doc_authors));
    bag.docs.push_back(std::move(row));
  }
  if (bag.docs.empty()) throw Error(ErrorKind::data, where + ": bag corpus has no documents");
  const auto counts = bag.author_doc_counts();
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a] == 0) throw Error(ErrorKind::format, where + ": author " + bag.authors[a] + " has no document");
  return bag;
}

struct PrepPaths {
  std::filesystem::path vocab, authors, bag;

  static PrepPaths in(const std::filesystem::path& dir) {
    return {dir / "vocab.tsv", dir / "authors.tsv", dir / "bag.tsv"};
  }
};

inline void save_prep(const Vocabulary& vocab, const BagCorpus& bag, const PrepPaths& paths) {
  write_file_atomic(paths.vocab, vocabulary_tsv(vocab));
  write_file_atomic(paths.authors, authors_tsv(bag));
  write_file_atomic(paths.bag, bag_tsv(bag));
}

inline BagCorpus load_bag(const PrepPaths& paths) {
  auto vocab = parse_vocabulary(read_file(paths.vocab), paths.vocab.string());
  auto authors = parse_authors(read_file(paths.authors), paths.authors.string());
  return parse_bag(read_file(paths.bag), std::move(vocab.terms), std::move(authors), paths.bag.string());
}

}  // namespace atm
