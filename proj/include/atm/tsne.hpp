// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "atm/error.hpp"
#include "atm/io.hpp"
#include "atm/matrix.hpp"
#include "atm/model.hpp"
#include "atm/rng.hpp"
#include "atm/similarity.hpp"
#include "atm/textprep.hpp"

namespace atm {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iters = 250;  // also the momentum switch point
  double momentum_early = 0.5;
  double momentum_late = 0.8;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(perplexity > 1.0)) throw Error(ErrorKind::config, "perplexity must be > 1");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::config, "learning rate must be > 0");
    if (!(early_exaggeration >= 1.0)) throw Error(ErrorKind::config, "early exaggeration must be >= 1");
    if (iterations < exaggeration_iters)
      throw Error(ErrorKind::config, "iterations must be >= exaggeration_iters");
    for (double m : {momentum_early, momentum_late})
      if (!(m >= 0.0 && m < 1.0)) throw Error(ErrorKind::config, "momentum must lie in [0, 1)");
  }
};

inline constexpr double kAffinityFloor = 1e-12;

namespace detail {

inline void check_distance_matrix(const Matrix& d) {
  if (d.rows() != d.cols()) throw Error(ErrorKind::usage, "distance matrix must be square");
  if (d.rows() < 3) throw Error(ErrorKind::data, "t-SNE needs at least 3 points");
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw Error(ErrorKind::usage, "distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < d.cols(); ++j) {
      if (!(d(i, j) >= 0.0) || !std::isfinite(d(i, j)))
        throw Error(ErrorKind::usage, "distances must be finite and non-negative");
      if (d(i, j) != d(j, i)) throw Error(ErrorKind::usage, "distance matrix is not symmetric");
    }
  }
}

// Row i of the Gaussian conditional with precision `beta` over squared
// distances, shifted by the row minimum for stability. Returns entropy in bits.
inline double conditional_row(const Matrix& d, std::size_t i, double beta, std::vector<double>& row) {
  const std::size_t n = d.rows();
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j)
    if (j != i) dmin = std::min(dmin, d(i, j) * d(i, j));
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = j == i ? 0.0 : std::exp(-beta * (d(i, j) * d(i, j) - dmin));
    sum += row[j];
  }
  double h = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] /= sum;
    if (row[j] > 0.0) h -= row[j] * std::log2(row[j]);
  }
  return h;
}

}  // namespace detail

/// Per-row conditional probabilities p_{j|i} whose perplexity 2^H matches
/// the target. The precision is bisected in log space over [1e-20, 1e20]
/// for at most 50 steps, stopping once |2^H - target| <= 1e-5.
inline Matrix conditional_affinities(const Matrix& distances, double perplexity) {
  detail::check_distance_matrix(distances);
  if (!(perplexity >= 1.0)) throw Error(ErrorKind::config, "perplexity must be >= 1");
  const std::size_t n = distances.rows();
  Matrix cond(n, n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::log(1e-20), hi = std::log(1e20);
    double log_beta = 0.0;
    for (int step = 0; step < 50; ++step) {
      const double perp = std::exp2(detail::conditional_row(distances, i, std::exp(log_beta), row));
      if (std::abs(perp - perplexity) <= 1e-5) break;
      // Larger precision means a narrower kernel and lower perplexity.
      if (perp > perplexity) lo = log_beta;
      else hi = log_beta;
      log_beta = 0.5 * (lo + hi);
    }
    detail::conditional_row(distances, i, std::exp(log_beta), row);
    std::copy(row.begin(), row.end(), cond.row(i).begin());
  }
  return cond;
}

/// Joint input affinities P = (P_cond + P_cond^T) / (2n).
inline Matrix input_affinities(const Matrix& distances, double perplexity) {
  const Matrix cond = conditional_affinities(distances, perplexity);
  const std::size_t n = cond.rows();
  Matrix p(n, n, 0.0);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) p(i, j) = p(j, i) = (cond(i, j) + cond(j, i)) * scale;
  return p;
}

/// Student-t (one degree of freedom) output affinities of 2-D coordinates.
inline Matrix output_affinities(const Matrix& y) {
  const std::size_t n = y.rows();
  Matrix q(n, n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
      const double w = 1.0 / (1.0 + dx * dx + dy * dy);
      q(i, j) = q(j, i) = w;
      sum += 2.0 * w;
    }
  for (auto& v : q.data()) v /= sum;
  return q;
}

/// KL(P || Q) with both affinities floored at 1e-12 inside the log.
inline double kl_divergence(const Matrix& p, const Matrix& y) {
  const Matrix q = output_affinities(y);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      kl += p(i, j) * std::log(std::max(p(i, j), kAffinityFloor) / std::max(q(i, j), kAffinityFloor));
    }
  return kl;
}

/// dKL/dy_i = 4 sum_j (exaggeration * p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1
inline Matrix kl_gradient(const Matrix& p, const Matrix& y, double exaggeration = 1.0) {
  const std::size_t n = y.rows();
  Matrix w(n, n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
      w(i, j) = w(j, i) = 1.0 / (1.0 + dx * dx + dy * dy);
      sum += 2.0 * w(i, j);
    }
  Matrix grad(n, 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double mult = 4.0 * (exaggeration * p(i, j) - w(i, j) / sum) * w(i, j);
      grad(i, 0) += mult * (y(i, 0) - y(j, 0));
      grad(i, 1) += mult * (y(i, 1) - y(j, 1));
    }
  return grad;
}

/// Exact O(n^2) t-SNE into two dimensions. Gradient descent with momentum,
/// per-coordinate adaptive gains and early exaggeration; coordinates start
/// from N(0, 1e-4^2) drawn with config.seed and are re-centred every step.
/// When `kl_trace` is given, KL(P || Q) after each iteration is appended.
inline Matrix tsne(const Matrix& distances, TsneConfig config,
                   std::vector<double>* kl_trace = nullptr) {
  config.validate();
  detail::check_distance_matrix(distances);
  const std::size_t n = distances.rows();
  const double max_perp = std::max(1.0, static_cast<double>(n - 1) / 3.0);
  if (config.perplexity > max_perp) {
    warn("perplexity " + std::to_string(config.perplexity) + " clamped to " +
         std::to_string(max_perp) + " for " + std::to_string(n) + " points");
    config.perplexity = max_perp;
  }
  const Matrix p = input_affinities(distances, config.perplexity);

  Rng rng(config.seed);
  Matrix y(n, 2);
  for (auto& v : y.data()) v = 1e-4 * rng.normal();
  Matrix update(n, 2, 0.0), gains(n, 2, 1.0);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool early = it < config.exaggeration_iters;
    const Matrix grad = kl_gradient(p, y, early ? config.early_exaggeration : 1.0);
    const double momentum = early ? config.momentum_early : config.momentum_late;
    for (std::size_t i = 0; i < y.data().size(); ++i) {
      double& g = gains.data()[i];
      const double gr = grad.data()[i];
      double& u = update.data()[i];
      g = (gr > 0.0) != (u > 0.0) ? g + 0.2 : g * 0.8;
      g = std::max(g, 0.01);
      u = momentum * u - config.learning_rate * g * gr;
      y.data()[i] += u;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y(i, 0);
      my += y(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mx;
      y(i, 1) -= my;
    }
    if (kl_trace) kl_trace->push_back(kl_divergence(p, y));
  }
  return y;
}

struct Embedding {
  Matrix coords;                        // n x 2
  std::vector<std::size_t> point_sizes;  // documents per author
  std::vector<std::string> labels;
  std::vector<std::size_t> author_ids;   // model author index of each point
};

inline void validate_embedding(const Embedding& e) {
  const std::size_t n = e.labels.size();
  if (n == 0) throw Error(ErrorKind::data, "embedding has no points");
  if (e.coords.rows() != n || e.coords.cols() != 2 || e.point_sizes.size() != n)
    throw Error(ErrorKind::data, "embedding fields disagree on the number of points");
  for (double v : e.coords.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::data, "embedding has non-finite coordinates");
  for (auto s : e.point_sizes)
    if (s < 1) throw Error(ErrorKind::data, "embedding point size must be >= 1");
}

/// t-SNE of the author-topic rows under Hellinger distance. Authors with
/// fewer than min_docs documents in `bag` are left out.
inline Embedding embed_authors(const AtmModel& model, const BagCorpus& bag, const TsneConfig& config,
                               std::size_t min_docs = 0) {
  if (!model.aligned_with(bag))
    throw Error(ErrorKind::data, "corpus vocabulary or author list does not match the model");
  const auto counts = bag.author_doc_counts();
  Embedding e;
  for (std::size_t a = 0; a < model.num_authors(); ++a) {
    if (counts[a] < std::max<std::size_t>(min_docs, 1)) continue;
    e.author_ids.push_back(a);
    e.labels.push_back(model.authors[a]);
    e.point_sizes.push_back(counts[a]);
  }
  if (e.author_ids.size() < 3)
    throw Error(ErrorKind::data, "embedding needs at least 3 authors, have " +
                                     std::to_string(e.author_ids.size()));
  Matrix rows(e.author_ids.size(), model.num_topics());
  for (std::size_t i = 0; i < e.author_ids.size(); ++i) {
    auto src = model.theta.row(e.author_ids[i]);
    std::copy(src.begin(), src.end(), rows.row(i).begin());
  }
  e.coords = tsne(pairwise_hellinger(rows), config);
  return e;
}

/// CSV `author_name,x,y,doc_count` with a header row.
inline std::string coordinates_csv(const Embedding& e) {
  validate_embedding(e);
  std::string out = "author_name,x,y,doc_count\n";
  char buf[96];
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%zu\n", e.coords(i, 0), e.coords(i, 1),
                  e.point_sizes[i]);
    out += csv_field(e.labels[i]);
    out += buf;
  }
  return out;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline constexpr double kSvgSize = 800.0;
inline constexpr double kSvgMargin = 40.0;
inline constexpr double kSvgUnitRadius = 3.0;  // radius of a one-document author

/// Standalone SVG scatter: one circle per author with radius proportional to
/// sqrt(document count), coordinates scaled affinely into the view box.
inline std::string to_svg(const Embedding& e) {
  validate_embedding(e);
  double xmin = e.coords(0, 0), xmax = xmin, ymin = e.coords(0, 1), ymax = ymin;
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    xmin = std::min(xmin, e.coords(i, 0));
    xmax = std::max(xmax, e.coords(i, 0));
    ymin = std::min(ymin, e.coords(i, 1));
    ymax = std::max(ymax, e.coords(i, 1));
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double scale = (kSvgSize - 2.0 * kSvgMargin) / span;

  char buf[256];
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                kSvgSize, kSvgSize, kSvgSize, kSvgSize);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    const double cx = kSvgMargin + (e.coords(i, 0) - xmin) * scale;
    const double cy = kSvgSize - kSvgMargin - (e.coords(i, 1) - ymin) * scale;
    const double r = kSvgUnitRadius * std::sqrt(static_cast<double>(e.point_sizes[i]));
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"steelblue\" "
                  "fill-opacity=\"0.6\"><title>",
                  cx, cy, r);
    out += buf;
    out += detail::xml_escape(e.labels[i]);
    std::snprintf(buf, sizeof buf, " (%zu)</title></circle>\n", e.point_sizes[i]);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

inline void render_svg(const Embedding& e, const std::filesystem::path& out) {
  write_file_atomic(out, to_svg(e));
}

}  // namespace atm
