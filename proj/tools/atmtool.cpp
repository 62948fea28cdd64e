// Apache License, Version 2.0, refer to LICENSE.txt
//
// atmtool: prep -> train -> topics / similar / coherence / embed, plus verify.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "atm/bag_io.hpp"
#include "atm/corpus.hpp"
#include "atm/eval.hpp"
#include "atm/gibbs.hpp"
#include "atm/model_io.hpp"
#include "atm/similarity.hpp"
#include "atm/textprep.hpp"
#include "atm/tsne.hpp"
#include "cli_util.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using atm::Error;
using atm::ErrorKind;

namespace {

std::string g_stage = "atmtool";

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void emit(const std::optional<fs::path>& out, const std::string& text, atmtool::Run& run) {
  if (!out) {
    std::cout << text;
    return;
  }
  atm::write_file_atomic(*out, text);
  run.output(*out);
}

fs::path manifest_path(const std::string& flag, const fs::path& beside) {
  if (!flag.empty()) return flag;
  return (beside.has_parent_path() ? beside.parent_path() : fs::path(".")) / "manifest.json";
}

std::optional<fs::path> config_file(const char* name) {
  const char* dir = std::getenv("ATM_CONFIG_DIR");
  if (!dir || !*dir) return std::nullopt;
  fs::path p = fs::path(dir) / name;
  if (fs::exists(p)) return p;
  return std::nullopt;
}

atm::BagCorpus load_prep_dir(const fs::path& dir, atmtool::Run& run) {
  const auto paths = atm::PrepPaths::in(dir);
  auto bag = atm::load_bag(paths);
  run.input(paths.vocab);
  run.input(paths.authors);
  run.input(paths.bag);
  return bag;
}

atm::AtmModel load_model_file(const fs::path& p, atmtool::Run& run) {
  auto m = atm::load_model(p);
  run.input(p);
  return m;
}

// ---- prep ----

struct PrepOpts {
  std::string corpus, out, windows_file, stopwords_file, phrases_file, only, manifest;
  std::vector<std::string> windows;
  std::optional<int> min_year, max_year;
  atm::PrepConfig cfg;
};

int cmd_prep(const PrepOpts& o) {
  atmtool::Run run("prep");
  std::vector<atm::Window> windows;
  std::optional<fs::path> wfile;
  if (!o.windows.empty()) {
    for (const auto& w : o.windows) windows.push_back(atm::parse_window(w));
  } else {
    wfile = o.windows_file.empty() ? config_file("windows.csv") : std::optional<fs::path>(o.windows_file);
    windows = wfile ? atm::read_windows_file(*wfile) : atm::default_windows();
  }
  atm::validate_windows(windows);
  if (windows.empty()) throw Error(ErrorKind::config, "no windows configured");
  for (const auto& w : windows)
    if (w.label.find_first_of("/\\") != std::string::npos || w.label == "." || w.label == "..")
      throw Error(ErrorKind::config, "window label is not usable as a directory name: " + w.label);
  if (wfile) run.input(*wfile);

  atm::CorpusConfig ccfg{windows, o.min_year.value_or(windows.front().year_lo),
                         o.max_year.value_or(windows.back().year_hi)};
  atm::PrepConfig cfg = o.cfg;
  auto sw = o.stopwords_file.empty() ? config_file("stopwords.txt") : std::optional<fs::path>(o.stopwords_file);
  if (sw) {
    for (auto t : atm::read_term_list(*sw)) {
      std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
      cfg.custom_stopwords.insert(t);
    }
    run.input(*sw);
  }
  auto ph = o.phrases_file.empty() ? config_file("phrases.txt") : std::optional<fs::path>(o.phrases_file);
  if (ph) {
    for (const auto& line : atm::read_term_list(*ph)) {
      std::vector<std::string> words;
      std::istringstream in(line);
      for (std::string w; in >> w;) words.push_back(w);
      cfg.phrases.push_back(std::move(words));
    }
    run.input(*ph);
  }
  cfg.validate();

  g_stage = "corpus";
  const atm::Corpus corpus = atm::load_corpus(fs::path(o.corpus), ccfg);
  run.input(o.corpus);

  auto& c = run.config();
  c["min_token_len"] = cfg.min_token_len;
  c["bigram_min_count"] = cfg.bigram_min_count;
  c["bigram_score_threshold"] = cfg.bigram_score_threshold;
  c["vocab_min_docs"] = cfg.vocab_min_docs;
  c["vocab_max_doc_frac"] = cfg.vocab_max_doc_frac;
  c["custom_stopwords"] = cfg.custom_stopwords.size();
  c["phrases"] = cfg.phrases.size();
  c["min_year"] = ccfg.min_year;
  c["max_year"] = ccfg.max_year;
  for (const auto& w : windows) c["windows"].push_back({w.label, w.year_lo, w.year_hi});

  g_stage = "textprep";
  std::size_t written = 0;
  for (const auto& w : windows) {
    if (!o.only.empty() && w.label != o.only) continue;
    const atm::Corpus slice = atm::window_slice(corpus, w.label);
    if (slice.empty()) {
      atm::warn("window " + w.label + " has no records; skipped");
      continue;
    }
    const auto result = atm::prepare(slice, cfg);
    for (const auto& id : result.bag.dropped_doc_ids)
      atm::warn("window " + w.label + ": document " + id + " is empty after filtering; dropped");
    const auto paths = atm::PrepPaths::in(fs::path(o.out) / w.label);
    atm::save_prep(result.vocab, result.bag, paths);
    run.output(paths.vocab);
    run.output(paths.authors);
    run.output(paths.bag);
    std::cerr << "prep: window " << w.label << ": " << result.bag.num_docs() << " docs, "
              << result.bag.num_authors() << " authors, V=" << result.bag.vocab_size()
              << ", tokens=" << result.bag.n_tokens << '\n';
    ++written;
  }
  if (!o.only.empty() && written == 0) {
    const bool known = std::any_of(windows.begin(), windows.end(),
                                   [&](const atm::Window& w) { return w.label == o.only; });
    if (!known) throw Error(ErrorKind::not_found, "unknown window label: " + o.only);
  }
  if (written == 0) throw Error(ErrorKind::data, "no window produced any artifacts");
  g_stage = "prep";
  run.commit(manifest_path(o.manifest, fs::path(o.out) / "x"));
  return 0;
}

// ---- train ----

struct TrainOpts {
  std::string prep, out, report, manifest;
  atm::AtmHyperParams hyper;
  std::size_t restarts = 5;
  std::size_t top_m = 10;
  std::size_t threads = 0;
};

struct Candidate {
  atm::AtmModel model;
  atm::CoherenceReport coherence;
  double pwll = 0.0;
};

int cmd_train(const TrainOpts& o) {
  atmtool::Run run("train");
  o.hyper.validate();
  if (o.restarts < 1) throw Error(ErrorKind::config, "restarts must be >= 1");
  if (o.top_m < 1) throw Error(ErrorKind::usage, "--top-m must be >= 1");
  const atm::BagCorpus bag = load_prep_dir(o.prep, run);

  g_stage = "atm";
  std::vector<Candidate> cands(o.restarts);
  std::vector<std::optional<Error>> errors(o.restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < o.restarts;) {
      try {
        atm::AtmHyperParams h = o.hyper;
        h.seed = o.hyper.seed + i;
        cands[i].model = atm::fit(bag, h);
        cands[i].coherence = atm::coherence_report(cands[i].model, bag, o.top_m);
        cands[i].pwll = atm::per_word_log_likelihood(cands[i].model, bag);
      } catch (const Error& e) {
        errors[i] = e;
      }
    }
  };
  std::size_t nthreads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, o.restarts);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) throw *e;

  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].coherence.mean > cands[best].coherence.mean) best = i;

  std::string report = "seed\tmean_coherence\tsum_coherence\tper_word_log_likelihood\tselected\n";
  for (std::size_t i = 0; i < cands.size(); ++i) {
    report += std::to_string(cands[i].model.hyper.seed) + '\t' +
              fmt("%.6f", cands[i].coherence.mean) + '\t' + fmt("%.6f", cands[i].coherence.sum) +
              '\t' + fmt("%.6f", cands[i].pwll) + '\t' + (i == best ? "yes" : "no") + '\n';
  }

  g_stage = "train";
  const fs::path out = o.out;
  const fs::path report_path = o.report.empty() ? fs::path(out.string() + ".restarts.tsv") : fs::path(o.report);
  atm::save_model(cands[best].model, out);
  atm::write_file_atomic(report_path, report);
  run.output(out);
  run.output(report_path);

  auto& c = run.config();
  c["num_topics"] = o.hyper.num_topics;
  c["alpha"] = o.hyper.alpha;
  c["eta"] = o.hyper.eta;
  c["iterations"] = o.hyper.iterations;
  c["burn_in"] = o.hyper.burn_in;
  c["thinning"] = o.hyper.thinning;
  c["restarts"] = o.restarts;
  c["top_m"] = o.top_m;
  c["selected_seed"] = cands[best].model.hyper.seed;
  for (const auto& cand : cands) run.seed(cand.model.hyper.seed);
  run.commit(manifest_path(o.manifest, out));
  std::cerr << "train: best seed " << cands[best].model.hyper.seed << " mean coherence "
            << fmt("%.6f", cands[best].coherence.mean) << '\n';
  return 0;
}

// ---- topics ----

struct TopicsOpts {
  std::string model, out, manifest;
  std::size_t top_words = 10;
  std::size_t top_authors = 1;
};

int cmd_topics(const TopicsOpts& o) {
  atmtool::Run run("topics");
  if (o.top_words < 1) throw Error(ErrorKind::usage, "--top-words must be >= 1");
  if (o.top_authors < 1) throw Error(ErrorKind::usage, "--top-authors must be >= 1");
  const auto model = load_model_file(o.model, run);
  std::string text;
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    text += "# topic " + std::to_string(k + 1) + '\n';
    std::size_t r = 0;
    for (const auto& [term, p] : atm::top_terms(model, k, o.top_words))
      text += "word\t" + std::to_string(++r) + '\t' + term + '\t' + fmt("%.6f", p) + '\n';
    r = 0;
    for (const auto& [a, share] : atm::top_authors_for_topic(model, k, o.top_authors))
      text += "author\t" + std::to_string(++r) + '\t' + model.authors[a] + '\t' + fmt("%.4f", share) + '\n';
  }
  run.config()["top_words"] = o.top_words;
  run.config()["top_authors"] = o.top_authors;
  std::optional<fs::path> out;
  if (!o.out.empty()) out = o.out;
  emit(out, text, run);
  run.commit(manifest_path(o.manifest, out ? *out : fs::path(o.model)));
  return 0;
}

// ---- similar ----

struct SimilarOpts {
  std::string model, author, prep, out, matrix, manifest;
  std::size_t k = 5;
  std::size_t min_docs = 0;
};

int cmd_similar(const SimilarOpts& o) {
  atmtool::Run run("similar");
  if (o.k < 1) throw Error(ErrorKind::usage, "--k must be >= 1");
  const auto model = load_model_file(o.model, run);

  std::vector<std::uint8_t> eligible;
  if (o.min_docs > 0) {
    if (o.prep.empty()) throw Error(ErrorKind::usage, "--min-docs needs --prep for document counts");
    const auto bag = load_prep_dir(o.prep, run);
    if (!model.aligned_with(bag))
      throw Error(ErrorKind::data, "corpus vocabulary or author list does not match the model");
    for (auto n : bag.author_doc_counts()) eligible.push_back(n >= o.min_docs);
  }

  if (!o.matrix.empty()) {
    const atm::Matrix h = atm::pairwise_hellinger(model);
    std::string csv = "author";
    for (const auto& a : model.authors) csv += ',' + atm::csv_field(a);
    csv += '\n';
    for (std::size_t i = 0; i < model.num_authors(); ++i) {
      csv += atm::csv_field(model.authors[i]);
      for (std::size_t j = 0; j < model.num_authors(); ++j) csv += ',' + fmt("%.6f", h(i, j));
      csv += '\n';
    }
    atm::write_file_atomic(o.matrix, csv);
    run.output(o.matrix);
  }

  g_stage = "similarity";
  const auto it = std::find(model.authors.begin(), model.authors.end(), o.author);
  if (it == model.authors.end()) {
    std::string msg = "unknown author '" + o.author + "'; closest matches:";
    for (const auto& n : atmtool::closest_names(o.author, model.authors)) msg += "\n  " + n;
    throw Error(ErrorKind::not_found, msg);
  }
  const std::size_t query = static_cast<std::size_t>(it - model.authors.begin());
  const auto result = atm::top_k_similar(model, query, o.k, eligible);
  std::string text = "# query\t" + o.author + "\nrank\tauthor_name\tsimilarity\n";
  for (std::size_t r = 0; r < result.ranked.size(); ++r)
    text += std::to_string(r + 1) + '\t' + model.authors[result.ranked[r].first] + '\t' +
            fmt("%.6f", result.ranked[r].second) + '\n';

  g_stage = "similar";
  run.config()["author"] = o.author;
  run.config()["k"] = o.k;
  run.config()["min_docs"] = o.min_docs;
  std::optional<fs::path> out;
  if (!o.out.empty()) out = o.out;
  emit(out, text, run);
  run.commit(manifest_path(o.manifest, out ? *out : fs::path(o.model)));
  return 0;
}

// ---- coherence ----

struct CoherenceOpts {
  std::string model, prep, out, json, manifest;
  std::size_t top_m = 10;
};

int cmd_coherence(const CoherenceOpts& o) {
  atmtool::Run run("coherence");
  if (o.top_m < 1) throw Error(ErrorKind::usage, "--top-m must be >= 1");
  const auto model = load_model_file(o.model, run);
  const auto bag = load_prep_dir(o.prep, run);
  g_stage = "eval";
  const auto report = atm::coherence_report(model, bag, o.top_m);
  g_stage = "coherence";
  run.config()["top_m"] = o.top_m;
  std::optional<fs::path> out;
  if (!o.out.empty()) out = o.out;
  emit(out, atm::coherence_tsv(report, model), run);
  if (!o.json.empty()) {
    auto j = atm::coherence_json(report, model);
    j["per_word_log_likelihood"] = atm::per_word_log_likelihood(model, bag);
    atm::write_file_atomic(o.json, j.dump(2) + "\n");
    run.output(o.json);
  }
  run.commit(manifest_path(o.manifest, out ? *out : fs::path(o.model)));
  return 0;
}

// ---- embed ----

struct EmbedOpts {
  std::string model, prep, out, svg, manifest;
  std::size_t min_docs = 0;
  atm::TsneConfig tsne;
};

int cmd_embed(const EmbedOpts& o) {
  atmtool::Run run("embed");
  o.tsne.validate();
  const auto model = load_model_file(o.model, run);
  const auto bag = load_prep_dir(o.prep, run);
  g_stage = "embed";
  const auto e = atm::embed_authors(model, bag, o.tsne, o.min_docs);
  atm::write_file_atomic(o.out, atm::coordinates_csv(e));
  run.output(o.out);
  if (!o.svg.empty()) {
    atm::render_svg(e, o.svg);
    run.output(o.svg);
  }
  auto& c = run.config();
  c["perplexity"] = o.tsne.perplexity;
  c["iterations"] = o.tsne.iterations;
  c["learning_rate"] = o.tsne.learning_rate;
  c["early_exaggeration"] = o.tsne.early_exaggeration;
  c["exaggeration_iters"] = o.tsne.exaggeration_iters;
  c["momentum_early"] = o.tsne.momentum_early;
  c["momentum_late"] = o.tsne.momentum_late;
  c["min_docs"] = o.min_docs;
  run.seed(o.tsne.seed);
  run.commit(manifest_path(o.manifest, o.out));
  return 0;
}

// ---- verify ----

int cmd_verify(const std::string& manifest) {
  std::size_t checked = 0;
  const auto issues = atmtool::verify_manifest(manifest, &checked);
  for (const auto& i : issues) std::cerr << "verify: " << i.path << ": " << i.problem << '\n';
  if (!issues.empty())
    throw Error(ErrorKind::data, std::to_string(issues.size()) + " of " + std::to_string(checked) +
                                     " inputs changed since the manifest was written");
  std::cout << "verify: " << checked << " inputs match\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author-topic model toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", atmtool::kToolVersion);

  PrepOpts prep;
  auto* p = app.add_subcommand("prep", "Tokenize, filter and vectorize a corpus per year window");
  p->add_option("--corpus", prep.corpus, "Line-delimited JSON corpus")->required();
  p->add_option("--out", prep.out, "Output directory (one subdirectory per window)")->required();
  p->add_option("--window", prep.windows, "Window as label:year_lo:year_hi (repeatable)");
  p->add_option("--windows-file", prep.windows_file, "File of label,year_lo,year_hi lines");
  p->add_option("--only", prep.only, "Process only this window label");
  p->add_option("--min-year", prep.min_year, "Earliest accepted year");
  p->add_option("--max-year", prep.max_year, "Latest accepted year");
  p->add_option("--stopwords", prep.stopwords_file, "Custom stopword file");
  p->add_option("--phrases", prep.phrases_file, "Phrase file, one multi-word phrase per line");
  p->add_option("--min-token-len", prep.cfg.min_token_len, "Shortest kept token")->capture_default_str();
  p->add_option("--bigram-min-count", prep.cfg.bigram_min_count, "Bigram count threshold")->capture_default_str();
  p->add_option("--bigram-threshold", prep.cfg.bigram_score_threshold, "Bigram score threshold")->capture_default_str();
  p->add_option("--vocab-min-docs", prep.cfg.vocab_min_docs, "Minimum document frequency")->capture_default_str();
  p->add_option("--vocab-max-frac", prep.cfg.vocab_max_doc_frac, "Maximum document fraction")->capture_default_str();
  p->add_option("--manifest", prep.manifest, "Manifest path (default OUT/manifest.json)");

  TrainOpts train;
  auto* t = app.add_subcommand("train", "Fit the model with several restarts and keep the most coherent");
  t->add_option("--prep", train.prep, "Window directory written by prep")->required();
  t->add_option("--out", train.out, "Model file")->required();
  t->add_option("--report", train.report, "Restart report (default OUT.restarts.tsv)");
  t->add_option("-K,--topics", train.hyper.num_topics, "Number of topics")->capture_default_str();
  t->add_option("--alpha", train.hyper.alpha, "Author-topic concentration")->capture_default_str();
  t->add_option("--eta", train.hyper.eta, "Topic-word concentration")->capture_default_str();
  t->add_option("--iterations", train.hyper.iterations, "Gibbs sweeps")->capture_default_str();
  t->add_option("--burn-in", train.hyper.burn_in, "Sweeps discarded before averaging")->capture_default_str();
  t->add_option("--thinning", train.hyper.thinning, "Keep every n-th sweep after burn-in")->capture_default_str();
  t->add_option("--seed", train.hyper.seed, "Seed of the first restart")->capture_default_str();
  t->add_option("--restarts", train.restarts, "Number of restarts (seeds seed, seed+1, ...)")->capture_default_str();
  t->add_option("--top-m", train.top_m, "Words per topic used for coherence")->capture_default_str();
  t->add_option("--threads", train.threads, "Concurrent restart chains (0 = all cores)");
  t->add_option("--manifest", train.manifest, "Manifest path");

  TopicsOpts topics;
  auto* tp = app.add_subcommand("topics", "Top words and top authors per topic");
  tp->add_option("--model", topics.model, "Model file")->required();
  tp->add_option("--top-words", topics.top_words, "Words per topic")->capture_default_str();
  tp->add_option("--top-authors", topics.top_authors, "Authors per topic")->capture_default_str();
  tp->add_option("--out", topics.out, "Output file (default stdout)");
  tp->add_option("--manifest", topics.manifest, "Manifest path");

  SimilarOpts similar;
  auto* s = app.add_subcommand("similar", "Most similar authors by Hellinger distance");
  s->add_option("--model", similar.model, "Model file")->required();
  s->add_option("--author", similar.author, "Query author (exact canonical name)")->required();
  s->add_option("--k", similar.k, "Number of results")->capture_default_str();
  s->add_option("--min-docs", similar.min_docs, "Only rank authors with at least this many documents");
  s->add_option("--prep", similar.prep, "Window directory (needed for --min-docs)");
  s->add_option("--matrix", similar.matrix, "Also write the pairwise Hellinger matrix as CSV");
  s->add_option("--out", similar.out, "Output file (default stdout)");
  s->add_option("--manifest", similar.manifest, "Manifest path");

  CoherenceOpts coh;
  auto* c = app.add_subcommand("coherence", "UMass coherence per topic");
  c->add_option("--model", coh.model, "Model file")->required();
  c->add_option("--prep", coh.prep, "Window directory the model was trained on")->required();
  c->add_option("--top-m", coh.top_m, "Words per topic")->capture_default_str();
  c->add_option("--out", coh.out, "TSV output (default stdout)");
  c->add_option("--json", coh.json, "Also write a JSON report");
  c->add_option("--manifest", coh.manifest, "Manifest path");

  EmbedOpts embed;
  auto* e = app.add_subcommand("embed", "t-SNE map of authors");
  e->add_option("--model", embed.model, "Model file")->required();
  e->add_option("--prep", embed.prep, "Window directory the model was trained on")->required();
  e->add_option("--out", embed.out, "Coordinates CSV")->required();
  e->add_option("--svg", embed.svg, "Also render an SVG scatter");
  e->add_option("--min-docs", embed.min_docs, "Only embed authors with at least this many documents");
  e->add_option("--perplexity", embed.tsne.perplexity, "Target perplexity")->capture_default_str();
  e->add_option("--iterations", embed.tsne.iterations, "Gradient steps")->capture_default_str();
  e->add_option("--learning-rate", embed.tsne.learning_rate, "Step size")->capture_default_str();
  e->add_option("--exaggeration", embed.tsne.early_exaggeration, "Early exaggeration factor")->capture_default_str();
  e->add_option("--exaggeration-iters", embed.tsne.exaggeration_iters, "Steps with exaggeration")->capture_default_str();
  e->add_option("--seed", embed.tsne.seed, "Initialization seed")->capture_default_str();
  e->add_option("--manifest", embed.manifest, "Manifest path");

  std::string verify_manifest;
  auto* v = app.add_subcommand("verify", "Recompute input digests recorded in a manifest");
  v->add_option("--manifest", verify_manifest, "Manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return atmtool::exit_code(ErrorKind::usage);
  }

  try {
    if (*p) return g_stage = "prep", cmd_prep(prep);
    if (*t) return g_stage = "train", cmd_train(train);
    if (*tp) return g_stage = "topics", cmd_topics(topics);
    if (*s) return g_stage = "similar", cmd_similar(similar);
    if (*c) return g_stage = "coherence", cmd_coherence(coh);
    if (*e) return g_stage = "embed", cmd_embed(embed);
    if (*v) return g_stage = "verify", cmd_verify(verify_manifest);
  } catch (const Error& ex) {
    std::cerr << "atmtool: [" << g_stage << "] " << atm::to_string(ex.kind()) << " error: " << ex.what() << '\n';
    return atmtool::exit_code(ex.kind());
  } catch (const std::exception& ex) {
    std::cerr << "atmtool: [" << g_stage << "] internal error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
