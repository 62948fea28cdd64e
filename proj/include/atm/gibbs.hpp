// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "atm/error.hpp"
#include "atm/matrix.hpp"
#include "atm/model.hpp"
#include "atm/rng.hpp"
#include "atm/textprep.hpp"

namespace atm {

/// Latent assignments of every token and the tallies derived from them.
struct AssignmentState {
  std::vector<std::vector<std::size_t>> words;  // per doc, token word ids (term-id order)
  std::vector<std::vector<std::size_t>> x;      // author of each token
  std::vector<std::vector<std::size_t>> z;      // topic of each token
  std::vector<std::uint32_t> count_ak;          // A x K
  std::vector<std::uint32_t> count_kv;          // K x V
  std::vector<std::uint32_t> count_k;
  std::vector<std::uint32_t> count_a;
};

/// Collapsed Gibbs sampler for the author-topic model.
///
/// Each token's (author, topic) pair is resampled jointly from
///   p(x=a, z=k | rest) ∝ (n_ak + alpha)/(n_a + K alpha) * (n_kv + eta)/(n_k + V eta)
/// over a in A_d, with the token's own counts removed. The uniform author
/// prior is constant within a document and cancels.
class GibbsSampler {
 public:
  GibbsSampler(const BagCorpus& bag, const AtmHyperParams& hyper)
      : bag_(bag), hyper_(hyper), rng_(hyper.seed) {
    hyper_.validate();
    if (bag.num_docs() == 0 || bag.n_tokens == 0) throw Error(ErrorKind::data, "corpus is empty");
    if (bag.doc_authors.size() != bag.num_docs())
      throw Error(ErrorKind::data, "doc_authors is not aligned with docs");
    K_ = hyper.num_topics;
    V_ = bag.vocab_size();
    A_ = bag.num_authors();
    if (K_ > bag.n_tokens)
      warn("K = " + std::to_string(K_) + " exceeds the token count " +
           std::to_string(bag.n_tokens));

    auto& s = state_;
    s.count_ak.assign(A_ * K_, 0);
    s.count_kv.assign(K_ * V_, 0);
    s.count_k.assign(K_, 0);
    s.count_a.assign(A_, 0);
    for (std::size_t d = 0; d < bag.num_docs(); ++d) {
      const auto& authors = bag.doc_authors[d];
      if (authors.empty()) throw Error(ErrorKind::data, "document without authors");
      std::vector<std::size_t> words, xs, zs;
      for (const auto& [v, count] : bag.docs[d]) {
        if (v >= V_) throw Error(ErrorKind::data, "term id out of range");
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t a = authors[rng_.below(authors.size())];
          const std::size_t k = rng_.below(K_);
          if (a >= A_) throw Error(ErrorKind::data, "author index out of range");
          words.push_back(v);
          xs.push_back(a);
          zs.push_back(k);
          add(a, k, v);
        }
      }
      s.words.push_back(std::move(words));
      s.x.push_back(std::move(xs));
      s.z.push_back(std::move(zs));
    }
    weights_.resize(K_);
  }

  /// One full pass over every token in corpus order.
  void sweep() {
    auto& s = state_;
    const double alpha = hyper_.alpha, eta = hyper_.eta;
    const double k_alpha = static_cast<double>(K_) * alpha;
    const double v_eta = static_cast<double>(V_) * eta;
    std::vector<double> topic_word(K_);
    for (std::size_t d = 0; d < s.words.size(); ++d) {
      const auto& authors = bag_.doc_authors[d];
      weights_.resize(authors.size() * K_);
      for (std::size_t n = 0; n < s.words[d].size(); ++n) {
        const std::size_t v = s.words[d][n];
        remove(s.x[d][n], s.z[d][n], v);

        for (std::size_t k = 0; k < K_; ++k)
          topic_word[k] = (s.count_kv[k * V_ + v] + eta) / (s.count_k[k] + v_eta);
        double total = 0.0;
        for (std::size_t i = 0; i < authors.size(); ++i) {
          const std::size_t a = authors[i];
          const double denom = s.count_a[a] + k_alpha;
          for (std::size_t k = 0; k < K_; ++k) {
            const double w = (s.count_ak[a * K_ + k] + alpha) / denom * topic_word[k];
            weights_[i * K_ + k] = w;
            total += w;
          }
        }
        const std::size_t cell = rng_.categorical(weights_, total);
        s.x[d][n] = authors[cell / K_];
        s.z[d][n] = cell % K_;
        add(s.x[d][n], s.z[d][n], v);
      }
    }
    ++sweeps_;
  }

  /// (n_ak + alpha)/(n_a + K alpha) from the current state.
  Matrix theta_estimate() const {
    Matrix theta(A_, K_);
    const double k_alpha = static_cast<double>(K_) * hyper_.alpha;
    for (std::size_t a = 0; a < A_; ++a)
      for (std::size_t k = 0; k < K_; ++k)
        theta(a, k) = (state_.count_ak[a * K_ + k] + hyper_.alpha) / (state_.count_a[a] + k_alpha);
    return theta;
  }

  /// (n_kv + eta)/(n_k + V eta) from the current state.
  Matrix beta_estimate() const {
    Matrix beta(K_, V_);
    const double v_eta = static_cast<double>(V_) * hyper_.eta;
    for (std::size_t k = 0; k < K_; ++k)
      for (std::size_t v = 0; v < V_; ++v)
        beta(k, v) = (state_.count_kv[k * V_ + v] + hyper_.eta) / (state_.count_k[k] + v_eta);
    return beta;
  }

  /// True iff the incremental tables equal a fresh recount of (x, z).
  bool counts_consistent() const {
    std::vector<std::uint32_t> ak(A_ * K_, 0), kv(K_ * V_, 0), k_(K_, 0), a_(A_, 0);
    for (std::size_t d = 0; d < state_.words.size(); ++d) {
      const auto& authors = bag_.doc_authors[d];
      for (std::size_t n = 0; n < state_.words[d].size(); ++n) {
        const auto a = state_.x[d][n], k = state_.z[d][n], v = state_.words[d][n];
        if (k >= K_ || std::find(authors.begin(), authors.end(), a) == authors.end()) return false;
        ++ak[a * K_ + k];
        ++kv[k * V_ + v];
        ++k_[k];
        ++a_[a];
      }
    }
    return ak == state_.count_ak && kv == state_.count_kv && k_ == state_.count_k &&
           a_ == state_.count_a;
  }

  const AssignmentState& state() const { return state_; }
  std::size_t sweeps() const { return sweeps_; }

 private:
  void add(std::size_t a, std::size_t k, std::size_t v) {
    ++state_.count_ak[a * K_ + k];
    ++state_.count_kv[k * V_ + v];
    ++state_.count_k[k];
    ++state_.count_a[a];
  }
  void remove(std::size_t a, std::size_t k, std::size_t v) {
    --state_.count_ak[a * K_ + k];
    --state_.count_kv[k * V_ + v];
    --state_.count_k[k];
    --state_.count_a[a];
  }

  const BagCorpus& bag_;
  AtmHyperParams hyper_;
  Rng rng_;
  std::size_t K_ = 0, V_ = 0, A_ = 0;
  AssignmentState state_;
  std::vector<double> weights_;
  std::size_t sweeps_ = 0;
};

/// Sweep s (1-based) contributes to the posterior average when it is past
/// burn-in and lies on the thinning grid anchored at the final sweep.
inline bool is_retained_sweep(const AtmHyperParams& hyper, std::size_t s) {
  return s > hyper.burn_in && (hyper.iterations - s) % hyper.thinning == 0;
}

/// Runs the chain and returns theta/beta averaged over retained sweeps.
inline AtmModel fit(const BagCorpus& bag, const AtmHyperParams& hyper) {
  hyper.validate();
  GibbsSampler sampler(bag, hyper);
  AtmModel model;
  model.hyper = hyper;
  model.terms = bag.terms;
  model.authors = bag.authors;
  model.theta = Matrix(bag.num_authors(), hyper.num_topics);
  model.beta = Matrix(hyper.num_topics, bag.vocab_size());
  for (std::size_t s = 1; s <= hyper.iterations; ++s) {
    sampler.sweep();
    if (!is_retained_sweep(hyper, s)) continue;
    const Matrix theta = sampler.theta_estimate();
    const Matrix beta = sampler.beta_estimate();
    for (std::size_t i = 0; i < theta.data().size(); ++i) model.theta.data()[i] += theta.data()[i];
    for (std::size_t i = 0; i < beta.data().size(); ++i) model.beta.data()[i] += beta.data()[i];
    ++model.retained_sweeps;
  }
  const double n = static_cast<double>(model.retained_sweeps);
  for (auto& v : model.theta.data()) v /= n;
  for (auto& v : model.beta.data()) v /= n;
  return model;
}

}  // namespace atm
