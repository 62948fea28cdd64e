// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "atm/corpus.hpp"
#include "atm/error.hpp"
#include "atm/io.hpp"
#include "atm/porter.hpp"
#include "atm/stopwords.hpp"

namespace atm {

using TokenDoc = std::vector<std::string>;

struct PrepConfig {
  TermSet custom_stopwords;
  // Multi-word phrases (each already a list of raw words) promoted to
  // underscore-joined tokens, e.g. {"support","vector","machine"}.
  std::vector<std::vector<std::string>> phrases;
  std::size_t min_token_len = 2;
  std::size_t bigram_min_count = 20;
  double bigram_score_threshold = 10.0;
  std::size_t vocab_min_docs = 5;
  double vocab_max_doc_frac = 0.5;

  void validate() const {
    if (min_token_len < 1) throw Error(ErrorKind::config, "min_token_len must be >= 1");
    if (bigram_min_count < 1) throw Error(ErrorKind::config, "bigram_min_count must be >= 1");
    if (!(bigram_score_threshold >= 0.0))
      throw Error(ErrorKind::config, "bigram_score_threshold must be >= 0");
    if (vocab_min_docs < 1) throw Error(ErrorKind::config, "vocab_min_docs must be >= 1");
    if (!(vocab_max_doc_frac > 0.0 && vocab_max_doc_frac <= 1.0))
      throw Error(ErrorKind::config, "vocab_max_doc_frac must lie in (0, 1]");
  }
};

struct Vocabulary {
  std::vector<std::string> terms;  // sorted lexicographically
  std::unordered_map<std::string, std::size_t> term_to_id;
  std::vector<std::size_t> doc_freq;

  std::size_t size() const { return terms.size(); }

  std::optional<std::size_t> find(const std::string& term) const {
    auto it = term_to_id.find(term);
    if (it == term_to_id.end()) return std::nullopt;
    return it->second;
  }
};

struct TermCount {
  std::size_t term = 0;
  std::size_t count = 0;
  friend bool operator==(const TermCount&, const TermCount&) = default;
};

/// Integer-coded documents with their authors. Carries its own term and
/// author name lists so a trained model can be checked against it.
struct BagCorpus {
  std::vector<std::string> terms;
  std::vector<std::string> authors;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<TermCount>> docs;  // sorted by term, counts >= 1
  std::vector<std::vector<std::size_t>> doc_authors;
  std::size_t n_tokens = 0;
  std::vector<std::string> dropped_doc_ids;  // emptied by vectorize

  std::size_t num_docs() const { return docs.size(); }
  std::size_t vocab_size() const { return terms.size(); }
  std::size_t num_authors() const { return authors.size(); }

  /// Number of documents attributed to each author.
  std::vector<std::size_t> author_doc_counts() const {
    std::vector<std::size_t> counts(authors.size(), 0);
    for (const auto& ids : doc_authors)
      for (auto a : ids) ++counts[a];
    return counts;
  }
};

/// Lowercases, splits on whitespace and punctuation, drops every token that
/// contains a digit and every token shorter than min_token_len. Bytes >= 0x80
/// (UTF-8 continuation data) are kept as word characters.
inline TokenDoc tokenize(std::string_view text, std::size_t min_token_len = 2) {
  TokenDoc out;
  std::string cur;
  bool has_digit = false;
  auto flush = [&] {
    if (!cur.empty() && !has_digit && cur.size() >= min_token_len) out.push_back(cur);
    cur.clear();
    has_digit = false;
  };
  for (unsigned char c : text) {
    if (c >= 0x80 || std::isalpha(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (std::isdigit(c)) {
      cur += static_cast<char>(c);
      has_digit = true;
    } else {
      flush();  // whitespace and punctuation both separate tokens
    }
  }
  flush();
  return out;
}

inline TokenDoc remove_stopwords(const TokenDoc& tokens, const TermSet& smart,
                                 const TermSet& custom) {
  TokenDoc out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!smart.contains(t) && !custom.contains(t)) out.push_back(t);
  return out;
}

namespace detail {

inline bool is_ascii_lower_alpha(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

inline std::string join_underscore(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '_';
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Porter-stems every pure-ASCII token; other tokens pass through unchanged.
inline TokenDoc stem_tokens(const TokenDoc& tokens) {
  TokenDoc out;
  out.reserve(tokens.size());
  PorterStemmer stemmer;
  for (const auto& t : tokens) out.push_back(detail::is_ascii_lower_alpha(t) ? stemmer(t) : t);
  return out;
}

/// Appends the underscore-joined token of every occurrence of a
/// user-supplied phrase. Phrases are passed through the same
/// tokenize/stopword/stem chain as documents before matching.
inline std::vector<TokenDoc> merge_phrases(std::vector<TokenDoc> docs,
                                           const std::vector<std::vector<std::string>>& phrases) {
  for (const auto& phrase : phrases) {
    if (phrase.size() < 2) continue;
    const std::string joined = detail::join_underscore(phrase);
    for (auto& doc : docs) {
      const std::size_t n = doc.size();
      std::vector<std::string> added;
      for (std::size_t i = 0; i + phrase.size() <= n; ++i)
        if (std::equal(phrase.begin(), phrase.end(), doc.begin() + static_cast<long>(i)))
          added.push_back(joined);
      doc.insert(doc.end(), added.begin(), added.end());
    }
  }
  return docs;
}

struct Bigram {
  std::string first;
  std::string second;
  std::size_t count = 0;
  double score = 0.0;
};

/// Adjacent pairs passing both thresholds, in lexicographic (first, second)
/// order. score = (count(a,b) - min_count) * N_tok / (count(a) * count(b)).
inline std::vector<Bigram> detect_bigrams(const std::vector<TokenDoc>& docs,
                                          const PrepConfig& config) {
  std::map<std::string, std::size_t> unigram;
  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  std::size_t n_tok = 0;
  for (const auto& doc : docs) {
    n_tok += doc.size();
    for (std::size_t i = 0; i < doc.size(); ++i) {
      ++unigram[doc[i]];
      if (i + 1 < doc.size()) ++pairs[{doc[i], doc[i + 1]}];
    }
  }
  std::vector<Bigram> out;
  for (const auto& [key, count] : pairs) {
    if (count < config.bigram_min_count) continue;
    const double score = static_cast<double>(count - config.bigram_min_count) *
                         static_cast<double>(n_tok) /
                         (static_cast<double>(unigram.at(key.first)) *
                          static_cast<double>(unigram.at(key.second)));
    if (score >= config.bigram_score_threshold) out.push_back({key.first, key.second, count, score});
  }
  return out;
}

/// For every occurrence of a promoted pair (a, b), appends "a_b" to the
/// document. Original unigrams stay in place; overlapping occurrences
/// ("a b c" with both pairs promoted) each contribute a token.
inline std::vector<TokenDoc> promote_bigrams(std::vector<TokenDoc> docs, const PrepConfig& config) {
  const auto bigrams = detect_bigrams(docs, config);
  if (bigrams.empty()) return docs;
  std::set<std::pair<std::string, std::string>> promoted;
  for (const auto& b : bigrams) promoted.emplace(b.first, b.second);
  for (auto& doc : docs) {
    std::vector<std::string> added;
    for (std::size_t i = 0; i + 1 < doc.size(); ++i)
      if (promoted.contains({doc[i], doc[i + 1]})) added.push_back(doc[i] + "_" + doc[i + 1]);
    doc.insert(doc.end(), added.begin(), added.end());
  }
  return docs;
}

/// Keeps terms with vocab_min_docs <= doc_freq <= vocab_max_doc_frac * D.
inline Vocabulary build_vocabulary(const std::vector<TokenDoc>& docs, const PrepConfig& config) {
  config.validate();
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  const double max_docs = config.vocab_max_doc_frac * static_cast<double>(docs.size());
  Vocabulary vocab;
  for (const auto& [term, n] : df) {
    if (n < config.vocab_min_docs || static_cast<double>(n) > max_docs) continue;
    vocab.term_to_id.emplace(term, vocab.terms.size());
    vocab.terms.push_back(term);
    vocab.doc_freq.push_back(n);
  }
  if (vocab.terms.empty())
    throw Error(ErrorKind::data,
                "vocabulary is empty after pruning (" + std::to_string(df.size()) +
                    " candidate terms over " + std::to_string(docs.size()) +
                    " documents); relax vocab_min_docs or raise vocab_max_doc_frac");
  return vocab;
}

/// Counts in-vocabulary tokens per document. Documents left empty are
/// dropped (their ids recorded in dropped_doc_ids) and authors left without
/// any document are removed, with the remaining indices compacted in order.
inline BagCorpus vectorize(const std::vector<TokenDoc>& docs, const Vocabulary& vocab,
                           const AuthorMap& author_map,
                           const std::vector<std::string>& doc_ids = {}) {
  if (docs.empty()) throw Error(ErrorKind::data, "no documents to vectorize");
  if (author_map.doc_authors.size() != docs.size())
    throw Error(ErrorKind::data, "author map is not aligned with the token documents");
  if (!doc_ids.empty() && doc_ids.size() != docs.size())
    throw Error(ErrorKind::data, "doc id list is not aligned with the token documents");

  BagCorpus bag;
  bag.terms = vocab.terms;
  std::vector<std::vector<std::size_t>> kept_authors;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& t : docs[d])
      if (auto id = vocab.find(t)) ++counts[*id];
    const std::string id = doc_ids.empty() ? std::to_string(d) : doc_ids[d];
    if (counts.empty()) {
      bag.dropped_doc_ids.push_back(id);
      continue;
    }
    std::vector<TermCount> row;
    row.reserve(counts.size());
    for (auto [term, n] : counts) {
      row.push_back({term, n});
      bag.n_tokens += n;
    }
    bag.docs.push_back(std::move(row));
    bag.doc_ids.push_back(id);
    kept_authors.push_back(author_map.doc_authors[d]);
  }
  if (bag.docs.empty())
    throw Error(ErrorKind::data, "every document is empty after vocabulary filtering");

  std::vector<std::size_t> remap(author_map.authors.size(), static_cast<std::size_t>(-1));
  for (const auto& ids : kept_authors)
    for (auto a : ids) remap[a] = 0;
  for (std::size_t a = 0; a < remap.size(); ++a) {
    if (remap[a] == 0) {
      remap[a] = bag.authors.size();
      bag.authors.push_back(author_map.authors[a]);
    }
  }
  for (auto& ids : kept_authors)
    for (auto& a : ids) a = remap[a];
  bag.doc_authors = std::move(kept_authors);
  return bag;
}

struct PrepResult {
  Vocabulary vocab;
  BagCorpus bag;
  std::vector<Bigram> bigrams;
};

/// Runs tokenize -> stopwords -> stem -> phrases -> bigrams -> prune ->
/// vectorize over title + abstract of every record.
inline PrepResult prepare(const Corpus& corpus, const PrepConfig& config) {
  config.validate();
  const TermSet& smart = smart_stoplist();
  auto process = [&](std::string_view text) {
    return stem_tokens(remove_stopwords(tokenize(text, config.min_token_len), smart,
                                        config.custom_stopwords));
  };

  std::vector<TokenDoc> docs;
  std::vector<std::string> ids;
  docs.reserve(corpus.size());
  for (const auto& rec : corpus.records) {
    docs.push_back(process(rec.title + " " + rec.abstract));
    ids.push_back(rec.id);
  }

  std::vector<std::vector<std::string>> phrases;
  for (const auto& p : config.phrases) {
    std::string raw;
    for (const auto& w : p) raw += w + " ";
    auto toks = process(raw);
    if (toks.size() >= 2) phrases.push_back(std::move(toks));
  }
  docs = merge_phrases(std::move(docs), phrases);

  PrepResult result;
  result.bigrams = detect_bigrams(docs, config);
  docs = promote_bigrams(std::move(docs), config);
  result.vocab = build_vocabulary(docs, config);
  result.bag = vectorize(docs, result.vocab, build_author_map(corpus), ids);
  return result;
}

}  // namespace atm
