// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atm/corpus.hpp"
#include "atm/error.hpp"
#include "atm/matrix.hpp"
#include "atm/model.hpp"
#include "atm/rng.hpp"
#include "atm/textprep.hpp"

namespace atm {

/// Fixed distributions that replace the Dirichlet draws in sample_corpus.
struct SampleOverrides {
  std::optional<Matrix> theta;  // A x K
  std::optional<Matrix> beta;   // K x V
};

struct TokenDraw {
  std::size_t author = 0;
  std::size_t topic = 0;
  std::size_t word = 0;
};

struct SampledCorpus {
  BagCorpus bag;
  Matrix theta;
  Matrix beta;
  std::vector<std::vector<TokenDraw>> draws;  // per document, in generation order
};

/// Synthetic term names "w000", "w001", ... (zero padded so they sort by id).
inline std::vector<std::string> synthetic_terms(std::size_t vocab_size) {
  const int width = static_cast<int>(std::to_string(vocab_size > 0 ? vocab_size - 1 : 0).size());
  std::vector<std::string> out;
  for (std::size_t v = 0; v < vocab_size; ++v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%0*zu", width, v);
    out.emplace_back(buf);
  }
  return out;
}

/// Draws a corpus from the author-topic generative process:
///   theta_a ~ Dir(alpha), beta_k ~ Dir(eta) (unless overridden),
///   then per token: author uniform over A_d, topic ~ theta_author,
///   word ~ beta_topic.
/// Draw order is fixed (theta rows, beta rows, then tokens doc by doc), so the
/// output is a pure function of the seed.
inline SampledCorpus sample_corpus(const AtmHyperParams& hyper, const AuthorMap& author_map,
                                   const std::vector<std::size_t>& doc_lengths,
                                   std::size_t vocab_size, const SampleOverrides& overrides = {}) {
  hyper.validate();
  const std::size_t K = hyper.num_topics;
  const std::size_t A = author_map.authors.size();
  if (vocab_size < 1) throw Error(ErrorKind::config, "vocabulary size must be >= 1");
  if (doc_lengths.size() != author_map.doc_authors.size())
    throw Error(ErrorKind::config, "doc_lengths and author map disagree on document count");
  for (std::size_t d = 0; d < doc_lengths.size(); ++d) {
    if (doc_lengths[d] < 1) throw Error(ErrorKind::config, "document lengths must be >= 1");
    if (author_map.doc_authors[d].empty())
      throw Error(ErrorKind::config, "every document needs at least one author");
    for (auto a : author_map.doc_authors[d])
      if (a >= A) throw Error(ErrorKind::config, "author index out of range");
  }
  if (overrides.theta && (overrides.theta->rows() != A || overrides.theta->cols() != K))
    throw Error(ErrorKind::config, "theta override must be A x K");
  if (overrides.beta && (overrides.beta->rows() != K || overrides.beta->cols() != vocab_size))
    throw Error(ErrorKind::config, "beta override must be K x V");

  Rng rng(hyper.seed);
  SampledCorpus out;
  if (overrides.theta) {
    out.theta = *overrides.theta;
  } else {
    out.theta = Matrix(A, K);
    for (std::size_t a = 0; a < A; ++a) {
      auto row = rng.dirichlet(K, hyper.alpha);
      std::copy(row.begin(), row.end(), out.theta.row(a).begin());
    }
  }
  if (overrides.beta) {
    out.beta = *overrides.beta;
  } else {
    out.beta = Matrix(K, vocab_size);
    for (std::size_t k = 0; k < K; ++k) {
      auto row = rng.dirichlet(vocab_size, hyper.eta);
      std::copy(row.begin(), row.end(), out.beta.row(k).begin());
    }
  }

  BagCorpus& bag = out.bag;
  bag.terms = synthetic_terms(vocab_size);
  bag.authors = author_map.authors;
  bag.doc_authors = author_map.doc_authors;
  for (std::size_t d = 0; d < doc_lengths.size(); ++d) {
    const auto& authors = author_map.doc_authors[d];
    std::vector<TokenDraw> draws;
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t n = 0; n < doc_lengths[d]; ++n) {
      TokenDraw t;
      t.author = authors[rng.below(authors.size())];
      t.topic = rng.categorical(out.theta.row(t.author));
      t.word = rng.categorical(out.beta.row(t.topic));
      ++counts[t.word];
      draws.push_back(t);
    }
    std::vector<TermCount> row;
    for (auto [v, c] : counts) row.push_back({v, c});
    bag.docs.push_back(std::move(row));
    bag.doc_ids.push_back(std::to_string(d));
    bag.n_tokens += doc_lengths[d];
    out.draws.push_back(std::move(draws));
  }
  return out;
}

}  // namespace atm
