// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "atm/error.hpp"
#include "atm/model.hpp"
#include "atm/textprep.hpp"

namespace atm {

/// UMass coherence of an ordered word list (most probable first):
///   sum_{m=2..M} sum_{l<m} log[(D(v_m, v_l) + 1) / D(v_l)]
/// with document frequencies taken from the bag itself.
inline double umass_coherence(const BagCorpus& bag, std::span<const std::size_t> top_words) {
  if (top_words.empty()) throw Error(ErrorKind::usage, "coherence needs at least one word");
  const std::size_t M = top_words.size();
  for (auto v : top_words)
    if (v >= bag.vocab_size()) throw Error(ErrorKind::usage, "term id out of range");

  // presence[d * M + i]: doc d contains top_words[i]
  std::vector<std::size_t> df(M, 0);
  std::vector<std::size_t> co(M * M, 0);
  std::vector<char> present(M);
  for (const auto& doc : bag.docs) {
    for (std::size_t i = 0; i < M; ++i) {
      const auto v = top_words[i];
      present[i] = std::binary_search(doc.begin(), doc.end(), TermCount{v, 0},
                                      [](const TermCount& a, const TermCount& b) {
                                        return a.term < b.term;
                                      });
      df[i] += present[i];
    }
    for (std::size_t m = 1; m < M; ++m)
      if (present[m])
        for (std::size_t l = 0; l < m; ++l) co[m * M + l] += present[l];
  }

  double score = 0.0;
  for (std::size_t m = 1; m < M; ++m) {
    for (std::size_t l = 0; l < m; ++l) {
      if (df[l] == 0)
        throw Error(ErrorKind::data, "top word '" + bag.terms[top_words[l]] +
                                         "' occurs in no document (vocabulary mismatch?)");
      score += std::log((static_cast<double>(co[m * M + l]) + 1.0) / static_cast<double>(df[l]));
    }
  }
  return score;
}

struct CoherenceReport {
  std::vector<double> per_topic;
  double mean = 0.0;
  double sum = 0.0;
  std::size_t top_m = 0;
  std::vector<std::vector<std::size_t>> top_words;  // per topic, as scored
};

inline CoherenceReport coherence_report(const AtmModel& model, const BagCorpus& bag,
                                        std::size_t top_m = 10) {
  if (!model.aligned_with(bag))
    throw Error(ErrorKind::data, "corpus vocabulary or author list does not match the model");
  CoherenceReport report;
  report.top_m = top_m;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    auto words = top_term_ids(model, k, top_m);
    report.per_topic.push_back(umass_coherence(bag, words));
    report.top_words.push_back(std::move(words));
  }
  report.sum = std::accumulate(report.per_topic.begin(), report.per_topic.end(), 0.0);
  report.mean = report.sum / static_cast<double>(report.per_topic.size());
  return report;
}

/// One row per topic: topic_id, coherence, space-separated top words.
inline std::string coherence_tsv(const CoherenceReport& report, const AtmModel& model) {
  std::string out = "topic_id\tcoherence\ttop_words\n";
  char buf[64];
  for (std::size_t k = 0; k < report.per_topic.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t", k + 1, report.per_topic[k]);
    out += buf;
    for (std::size_t i = 0; i < report.top_words[k].size(); ++i) {
      if (i) out += ' ';
      out += model.terms[report.top_words[k][i]];
    }
    out += '\n';
  }
  std::snprintf(buf, sizeof buf, "mean\t%.6f\t\nsum\t%.6f\t\n", report.mean, report.sum);
  out += buf;
  return out;
}

inline nlohmann::json coherence_json(const CoherenceReport& report, const AtmModel& model) {
  nlohmann::json j;
  j["per_topic"] = report.per_topic;
  j["mean"] = report.mean;
  j["sum"] = report.sum;
  j["top_m"] = report.top_m;
  auto& words = j["top_words"] = nlohmann::json::array();
  for (const auto& ids : report.top_words) {
    auto row = nlohmann::json::array();
    for (auto v : ids) row.push_back(model.terms[v]);
    words.push_back(std::move(row));
  }
  return j;
}

}  // namespace atm
