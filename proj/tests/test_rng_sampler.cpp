// Apache License, Version 2.0, refer to LICENSE.txt

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "atm/rng.hpp"
#include "atm/sampler.hpp"

using namespace atm;

TEST(Rng, EngineIsStandardMt19937_64) {
  // The C++ standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformRangeAndMean) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, BelowIsBoundedAndRoughlyUniform) {
  Rng rng(2);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 400);
  EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, GammaMeanAndVariance) {
  for (double shape : {0.05, 0.5, 1.0, 3.5}) {
    Rng rng(4);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = std::exp(rng.log_gamma_variate(shape));
      s += g;
      s2 += g * g;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, shape, 0.02 * std::max(1.0, shape)) << shape;
    EXPECT_NEAR(var, shape, 0.06 * std::max(1.0, shape)) << shape;
  }
}

TEST(Rng, TinyShapeStaysFinite) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(std::isfinite(rng.log_gamma_variate(1e-3)));
}

TEST(Rng, DirichletSumsToOneWithCorrectMean) {
  Rng rng(6);
  std::vector<double> mean(4, 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto p = rng.dirichlet(4, 0.5);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (int k = 0; k < 4; ++k) mean[k] += p[k] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.25, 0.01);
}

TEST(Rng, CategoricalFrequencies) {
  Rng rng(7);
  const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
  std::vector<int> hist(4, 0);
  for (int i = 0; i < 100000; ++i) ++hist[rng.categorical(w)];
  EXPECT_EQ(hist[1], 0);
  EXPECT_NEAR(hist[0] / 1e5, 0.1, 0.005);
  EXPECT_NEAR(hist[2] / 1e5, 0.6, 0.005);
  EXPECT_NEAR(hist[3] / 1e5, 0.3, 0.005);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.log_gamma_variate(0.3), b.log_gamma_variate(0.3));
  }
}

namespace {

AuthorMap authors_per_doc(std::size_t A, std::size_t D, std::size_t per_doc) {
  AuthorMap m;
  for (std::size_t a = 0; a < A; ++a) m.authors.push_back("a" + std::to_string(a));
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < per_doc; ++i) ids.push_back((d + i * 3) % A);
    std::sort(ids.begin(), ids.end());
    m.doc_authors.push_back(ids);
  }
  return m;
}

}  // namespace

TEST(SampleCorpus, SingleTopicDegeneracy) {
  AtmHyperParams h;
  h.num_topics = 1;
  const auto s = sample_corpus(h, authors_per_doc(5, 10, 2), std::vector<std::size_t>(10, 8), 20);
  for (double v : s.theta.data()) EXPECT_EQ(v, 1.0);
  for (const auto& doc : s.draws)
    for (const auto& t : doc) EXPECT_EQ(t.topic, 0u);
}

TEST(SampleCorpus, PointMassChain) {
  AtmHyperParams h;
  h.num_topics = 3;
  const auto map = authors_per_doc(4, 6, 2);
  SampleOverrides o;
  o.theta = Matrix(4, 3, 0.0);
  for (std::size_t a = 0; a < 4; ++a) (*o.theta)(a, 2) = 1.0;
  o.beta = Matrix(3, 10, 0.1);
  for (std::size_t v = 0; v < 10; ++v) (*o.beta)(2, v) = v == 7 ? 1.0 : 0.0;
  const auto s = sample_corpus(h, map, std::vector<std::size_t>(6, 5), 10, o);
  for (const auto& doc : s.bag.docs) EXPECT_EQ(doc, (std::vector<TermCount>{{7, 5}}));
  EXPECT_EQ(s.bag.n_tokens, 30u);
}

TEST(SampleCorpus, SingleAuthorDocument) {
  AtmHyperParams h;
  AuthorMap m{{"only", "other"}, {{0}, {1}}};
  const auto s = sample_corpus(h, m, {50, 3}, 10);
  for (const auto& t : s.draws[0]) EXPECT_EQ(t.author, 0u);
  for (const auto& t : s.draws[1]) EXPECT_EQ(t.author, 1u);
}

TEST(SampleCorpus, BagMatchesDraws) {
  AtmHyperParams h;
  h.seed = 77;
  const auto s = sample_corpus(h, authors_per_doc(6, 12, 2), std::vector<std::size_t>(12, 15), 9);
  EXPECT_EQ(s.bag.terms, synthetic_terms(9));
  for (std::size_t d = 0; d < 12; ++d) {
    std::vector<std::size_t> counts(9, 0);
    for (const auto& t : s.draws[d]) ++counts[t.word];
    std::size_t i = 0;
    for (std::size_t v = 0; v < 9; ++v) {
      if (!counts[v]) continue;
      ASSERT_LT(i, s.bag.docs[d].size());
      EXPECT_EQ(s.bag.docs[d][i].term, v);
      EXPECT_EQ(s.bag.docs[d][i].count, counts[v]);
      ++i;
    }
    EXPECT_EQ(i, s.bag.docs[d].size());
  }
}

TEST(SampleCorpus, DeterministicAndStochastic) {
  AtmHyperParams h;
  h.seed = 9;
  const auto map = authors_per_doc(5, 8, 2);
  const auto a = sample_corpus(h, map, std::vector<std::size_t>(8, 10), 12);
  const auto b = sample_corpus(h, map, std::vector<std::size_t>(8, 10), 12);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.bag.docs, b.bag.docs);
  for (std::size_t r = 0; r < a.theta.rows(); ++r)
    EXPECT_NEAR(std::accumulate(a.theta.row(r).begin(), a.theta.row(r).end(), 0.0), 1.0, 1e-12);
  for (std::size_t r = 0; r < a.beta.rows(); ++r)
    EXPECT_NEAR(std::accumulate(a.beta.row(r).begin(), a.beta.row(r).end(), 0.0), 1.0, 1e-12);
}

TEST(SampleCorpus, UniformAuthorChoiceWithThreeAuthors) {
  AtmHyperParams h;
  h.seed = 31;
  const std::size_t D = 200;
  const auto s = sample_corpus(h, authors_per_doc(30, D, 3), std::vector<std::size_t>(D, 60), 50);
  std::vector<double> slot(3, 0.0);
  double total = 0.0;
  for (std::size_t d = 0; d < D; ++d)
    for (const auto& t : s.draws[d]) {
      const auto& ad = s.bag.doc_authors[d];
      slot[std::find(ad.begin(), ad.end(), t.author) - ad.begin()] += 1.0;
      total += 1.0;
    }
  EXPECT_GE(total, 1e4);
  for (double c : slot) EXPECT_NEAR(c / total, 1.0 / 3.0, 0.03);
}

TEST(SampleCorpus, Errors) {
  AtmHyperParams h;
  AuthorMap m{{"a"}, {{0}}};
  EXPECT_THROW(sample_corpus(h, m, {0}, 5), Error);
  EXPECT_THROW(sample_corpus(h, m, {3, 3}, 5), Error);
  EXPECT_THROW(sample_corpus(h, AuthorMap{{"a"}, {{}}}, {3}, 5), Error);
  EXPECT_THROW(sample_corpus(h, m, {3}, 0), Error);
  h.num_topics = 0;
  EXPECT_THROW(sample_corpus(h, m, {3}, 5), Error);
  h = {};
  SampleOverrides o;
  o.theta = Matrix(2, 5);
  EXPECT_THROW(sample_corpus(h, m, {3}, 5, o), Error);
}
