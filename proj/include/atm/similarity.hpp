// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "atm/error.hpp"
#include "atm/matrix.hpp"
#include "atm/model.hpp"

namespace atm {

namespace detail {

inline double checked_sum(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(ErrorKind::usage, "probability vector has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorKind::usage, "probability vector is not normalized");
  return s;
}

}  // namespace detail

/// Hellinger distance (1/sqrt 2) * ||sqrt(p) - sqrt(q)||_2, in [0, 1].
/// Inputs are checked to 1e-9 normalization and renormalized exactly.
inline double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorKind::usage, "hellinger: length mismatch");
  const double sp = detail::checked_sum(p);
  const double sq = detail::checked_sum(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i] / sp) - std::sqrt(q[i] / sq);
    acc += d * d;
  }
  return std::min(1.0, std::sqrt(acc) / std::sqrt(2.0));
}

/// Researcher similarity 1 / (1 + H), in [0.5, 1].
inline double similarity(std::span<const double> p, std::span<const double> q) {
  return 1.0 / (1.0 + hellinger(p, q));
}

struct SimilarityResult {
  std::size_t query_author = 0;
  std::vector<std::pair<std::size_t, double>> ranked;
};

/// The k authors most similar to `author` by descending score, ties by
/// ascending index. An optional eligibility mask (one byte per author)
/// restricts the candidates. k is clamped to the number of candidates.
inline SimilarityResult top_k_similar(const AtmModel& model, std::size_t author, std::size_t k,
                                      std::span<const std::uint8_t> eligible = {}) {
  const std::size_t A = model.num_authors();
  if (author >= A) throw Error(ErrorKind::not_found, "author index out of range");
  if (k < 1) throw Error(ErrorKind::usage, "k must be >= 1");
  if (!eligible.empty() && eligible.size() != A)
    throw Error(ErrorKind::usage, "eligibility mask length differs from the author count");
  SimilarityResult result{author, {}};
  for (std::size_t b = 0; b < A; ++b) {
    if (b == author || (!eligible.empty() && !eligible[b])) continue;
    result.ranked.emplace_back(b, similarity(model.theta.row(author), model.theta.row(b)));
  }
  std::sort(result.ranked.begin(), result.ranked.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (result.ranked.size() > k) result.ranked.resize(k);
  return result;
}

/// Symmetric matrix of Hellinger distances between rows; each pair is
/// computed once and mirrored, and the diagonal is exactly zero.
inline Matrix pairwise_hellinger(const Matrix& rows) {
  const std::size_t n = rows.rows();
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = out(j, i) = hellinger(rows.row(i), rows.row(j));
  return out;
}

inline Matrix pairwise_hellinger(const AtmModel& model) { return pairwise_hellinger(model.theta); }

}  // namespace atm
