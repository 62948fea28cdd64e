// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "atm/error.hpp"
#include "atm/io.hpp"
#include "atm/matrix.hpp"
#include "atm/textprep.hpp"

namespace atm {

struct AtmHyperParams {
  std::size_t num_topics = 5;
  double alpha = 0.5;  // author-topic Dirichlet concentration
  double eta = 0.1;    // topic-word Dirichlet concentration
  std::size_t iterations = 2000;
  std::size_t burn_in = 200;
  std::size_t thinning = 10;
  std::uint64_t seed = 1;

  void validate() const {
    if (num_topics < 1) throw Error(ErrorKind::config, "number of topics K must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::config, "alpha must be > 0");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(ErrorKind::config, "eta must be > 0");
    if (iterations <= burn_in) throw Error(ErrorKind::config, "iterations must exceed burn_in");
    if (thinning < 1) throw Error(ErrorKind::config, "thinning must be >= 1");
  }

  friend bool operator==(const AtmHyperParams&, const AtmHyperParams&) = default;
};

/// A trained author-topic model: theta is A x K, beta is K x V, both
/// row-stochastic with strictly positive entries.
struct AtmModel {
  Matrix theta;
  Matrix beta;
  AtmHyperParams hyper;
  std::vector<std::string> terms;
  std::vector<std::string> authors;
  std::uint64_t retained_sweeps = 0;

  std::size_t num_topics() const { return beta.rows(); }
  std::size_t vocab_size() const { return beta.cols(); }
  std::size_t num_authors() const { return theta.rows(); }

  bool aligned_with(const BagCorpus& bag) const {
    return fingerprint(terms) == fingerprint(bag.terms) &&
           fingerprint(authors) == fingerprint(bag.authors);
  }

  friend bool operator==(const AtmModel&, const AtmModel&) = default;
};

/// Throws unless every row sums to 1 within tol and all entries are > 0.
inline void check_row_stochastic(const Matrix& m, const char* what, double tol = 1e-9) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (double v : m.row(r)) {
      if (!(v > 0.0)) throw Error(ErrorKind::format, std::string(what) + " has a non-positive entry");
      s += v;
    }
    if (std::abs(s - 1.0) > tol)
      throw Error(ErrorKind::format, std::string(what) + " row " + std::to_string(r) +
                                         " does not sum to 1");
  }
}

inline void validate_model(const AtmModel& model) {
  if (model.theta.cols() != model.beta.rows())
    throw Error(ErrorKind::format, "theta and beta disagree on the number of topics");
  if (model.terms.size() != model.beta.cols())
    throw Error(ErrorKind::format, "term list does not match beta width");
  if (model.authors.size() != model.theta.rows())
    throw Error(ErrorKind::format, "author list does not match theta height");
  check_row_stochastic(model.theta, "theta");
  check_row_stochastic(model.beta, "beta");
}

namespace detail {

// Indices of the n largest entries, descending, ties by ascending index.
inline std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t n) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  n = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] != values[b] ? values[a] > values[b] : a < b;
                    });
  idx.resize(n);
  return idx;
}

}  // namespace detail

inline std::vector<std::size_t> top_term_ids(const AtmModel& model, std::size_t topic,
                                             std::size_t n) {
  if (topic >= model.num_topics())
    throw Error(ErrorKind::usage, "topic " + std::to_string(topic) + " out of range");
  if (n < 1) throw Error(ErrorKind::usage, "requested term count must be >= 1");
  return detail::top_indices(model.beta.row(topic), n);
}

/// Top-n (term, beta_kv) pairs of a topic; n is clamped to V.
inline std::vector<std::pair<std::string, double>> top_terms(const AtmModel& model,
                                                             std::size_t topic, std::size_t n) {
  std::vector<std::pair<std::string, double>> out;
  for (auto v : top_term_ids(model, topic, n)) out.emplace_back(model.terms[v], model.beta(topic, v));
  return out;
}

/// Top-n (author index, theta_ak) pairs for topic k; n is clamped to A.
inline std::vector<std::pair<std::size_t, double>> top_authors_for_topic(const AtmModel& model,
                                                                         std::size_t topic,
                                                                         std::size_t n) {
  if (topic >= model.num_topics())
    throw Error(ErrorKind::usage, "topic " + std::to_string(topic) + " out of range");
  if (n < 1) throw Error(ErrorKind::usage, "requested author count must be >= 1");
  std::vector<double> column(model.num_authors());
  for (std::size_t a = 0; a < column.size(); ++a) column[a] = model.theta(a, topic);
  std::vector<std::pair<std::size_t, double>> out;
  for (auto a : detail::top_indices(column, n)) out.emplace_back(a, column[a]);
  return out;
}

/// Mean log-probability per token under the point estimates:
/// (1/N) sum_{d,n} log[(1/|A_d|) sum_{a in A_d} sum_k theta_ak beta_{k,w}].
inline double per_word_log_likelihood(const AtmModel& model, const BagCorpus& bag) {
  if (!model.aligned_with(bag))
    throw Error(ErrorKind::data, "corpus vocabulary or author list does not match the model");
  if (bag.n_tokens == 0) throw Error(ErrorKind::data, "corpus has no tokens");
  const std::size_t K = model.num_topics();
  double total = 0.0;
  std::vector<double> mix(K);
  for (std::size_t d = 0; d < bag.num_docs(); ++d) {
    const auto& authors = bag.doc_authors[d];
    std::fill(mix.begin(), mix.end(), 0.0);
    for (auto a : authors)
      for (std::size_t k = 0; k < K; ++k) mix[k] += model.theta(a, k);
    const double inv = 1.0 / static_cast<double>(authors.size());
    for (const auto& [v, count] : bag.docs[d]) {
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += mix[k] * model.beta(k, v);
      total += static_cast<double>(count) * std::log(p * inv);
    }
  }
  return std::min(0.0, total / static_cast<double>(bag.n_tokens));
}

}  // namespace atm
