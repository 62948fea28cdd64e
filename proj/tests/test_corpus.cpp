// Apache License, Version 2.0, refer to LICENSE.txt

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "atm/corpus.hpp"

using namespace atm;

namespace {

CorpusConfig one_window() { return {{{"w1", 1997, 2001}}, 1997, 2001}; }

std::string rec(const std::string& id, const std::string& authors, int year) {
  return R"({"id":")" + id + R"(","title":"t","abstract":"a","authors":)" + authors +
         R"(,"year":)" + std::to_string(year) + "}\n";
}

Corpus load(const std::string& text, const CorpusConfig& cfg) {
  std::istringstream in(text);
  return load_corpus(in, cfg);
}

ErrorKind kind_of(const std::function<void()>& f, std::string* msg = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::usage;
}

}  // namespace

TEST(LoadCorpus, ValidRecords) {
  const auto c = load(rec("a", R"(["X"])", 1998) + "\n" + rec("b", R"(["Y","X"])", 2000) +
                          rec("c", R"(["Z"])", 2001),
                      one_window());
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.windows.size(), 1u);
  EXPECT_EQ(c.records[1].id, "b");
  EXPECT_EQ(c.records[1].authors, (std::vector<std::string>{"Y", "X"}));
  EXPECT_FALSE(c.records[0].venue.has_value());
}

TEST(LoadCorpus, OptionalVenue) {
  const auto c = load(R"({"id":"v","title":"t","abstract":"a","authors":["X"],"year":1999,"venue":"J"})",
                      one_window());
  ASSERT_TRUE(c.records[0].venue.has_value());
  EXPECT_EQ(*c.records[0].venue, "J");
}

TEST(LoadCorpus, EmptyAuthorsNamesRecord) {
  std::string msg;
  EXPECT_EQ(kind_of([&] { load(rec("r42", "[]", 1999), one_window()); }, &msg), ErrorKind::data);
  EXPECT_NE(msg.find("r42"), std::string::npos);
}

TEST(LoadCorpus, YearOutOfRange) {
  std::string msg;
  EXPECT_EQ(kind_of([&] { load(rec("old", R"(["X"])", 1996), one_window()); }, &msg), ErrorKind::data);
  EXPECT_NE(msg.find("old"), std::string::npos);
}

TEST(LoadCorpus, YearInRangeButNoWindow) {
  CorpusConfig cfg{{{"w1", 1997, 1998}, {"w2", 2000, 2001}}, 1997, 2001};
  EXPECT_EQ(kind_of([&] { load(rec("gap", R"(["X"])", 1999), cfg); }), ErrorKind::data);
}

TEST(LoadCorpus, MalformedLineNamesLineNumber) {
  std::string msg;
  EXPECT_EQ(kind_of([&] { load(rec("a", R"(["X"])", 1998) + "{not json\n", one_window()); }, &msg),
            ErrorKind::format);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_EQ(kind_of([&] { load(R"({"id":"a","title":"t","abstract":"a","authors":["X"]})", one_window()); }),
            ErrorKind::format);
  EXPECT_EQ(kind_of([&] { load("[1,2]", one_window()); }), ErrorKind::format);
}

TEST(LoadCorpus, DuplicateIds) {
  EXPECT_EQ(kind_of([&] { load(rec("a", R"(["X"])", 1998) + rec("a", R"(["Y"])", 1999), one_window()); }),
            ErrorKind::data);
}

TEST(LoadCorpus, AuthorsNormalizedAndDeduplicated) {
  const auto c = load(rec("a", R"(["X", "X ", "  Lena   Ortiz "])", 1998), one_window());
  EXPECT_EQ(c.records[0].authors, (std::vector<std::string>{"X", "Lena Ortiz"}));
}

TEST(LoadCorpus, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { load_corpus(std::filesystem::path("/nonexistent/corpus.jsonl"), one_window()); }),
            ErrorKind::io);
}

TEST(LoadCorpus, BadWindows) {
  CorpusConfig overlap{{{"a", 1997, 2001}, {"b", 2001, 2003}}, 1997, 2003};
  EXPECT_EQ(kind_of([&] { load("", overlap); }), ErrorKind::config);
  CorpusConfig unordered{{{"b", 2002, 2003}, {"a", 1997, 2001}}, 1997, 2003};
  EXPECT_EQ(kind_of([&] { load("", unordered); }), ErrorKind::config);
  CorpusConfig reversed{{{"a", 2001, 1997}}, 1997, 2003};
  EXPECT_EQ(kind_of([&] { load("", reversed); }), ErrorKind::config);
}

TEST(NormalizeAuthor, Examples) {
  EXPECT_EQ(normalize_author("  Lena   Ortiz "), "Lena Ortiz");
  EXPECT_EQ(normalize_author("Omar K. Reyes"), "Omar K. Reyes");
  EXPECT_EQ(normalize_author("a\t\nb"), "a b");
  EXPECT_EQ(kind_of([] { normalize_author("   "); }), ErrorKind::data);
  EXPECT_EQ(kind_of([] { normalize_author(""); }), ErrorKind::data);
}

TEST(Windows, Parse) {
  EXPECT_EQ(parse_window("1997~2001:1997:2001"), (Window{"1997~2001", 1997, 2001}));
  EXPECT_EQ(kind_of([] { parse_window("x:1"); }), ErrorKind::usage);
  EXPECT_EQ(kind_of([] { parse_window("x:a:b"); }), ErrorKind::usage);
  EXPECT_EQ(default_windows().size(), 4u);
  EXPECT_EQ(default_windows().front(), (Window{"1997~2001", 1997, 2001}));
  EXPECT_EQ(default_windows().back(), (Window{"2012~2016", 2012, 2016}));
}

TEST(Windows, ToyWindowsFile) {
  const auto w = read_windows_file(std::filesystem::path(ATM_SOURCE_DIR) / "data/toy_windows.csv");
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[1], (Window{"2002~2006", 2002, 2006}));
}

TEST(WindowSlice, Examples) {
  CorpusConfig cfg{{{"1997~2001", 1997, 2001}, {"2002~2006", 2002, 2006}}, 1997, 2006};
  const auto c = load(rec("a", R"(["X"])", 1998) + rec("b", R"(["X"])", 2003) + rec("c", R"(["X"])", 2000), cfg);
  const auto s = window_slice(c, "1997~2001");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.records[0].id, "a");
  EXPECT_EQ(s.records[1].id, "c");
  EXPECT_EQ(kind_of([&] { window_slice(c, "x"); }), ErrorKind::not_found);

  const auto only_early = load(rec("a", R"(["X"])", 1998), cfg);
  EXPECT_TRUE(window_slice(only_early, "2002~2006").empty());
}

TEST(WindowSlice, PartitionsToyCorpus) {
  const auto cfg = CorpusConfig{read_windows_file(std::filesystem::path(ATM_SOURCE_DIR) / "data/toy_windows.csv"),
                                1997, 2006};
  const auto c = load_corpus(std::filesystem::path(ATM_SOURCE_DIR) / "data/toy_corpus.jsonl", cfg);
  EXPECT_GE(c.size(), 60u);
  std::map<std::string, int> seen;
  for (const auto& w : c.windows)
    for (const auto& r : window_slice(c, w.label).records) ++seen[r.id];
  EXPECT_EQ(seen.size(), c.size());
  for (const auto& [id, n] : seen) EXPECT_EQ(n, 1) << id;
  EXPECT_GE(build_author_map(c).authors.size(), 25u);
}

TEST(AuthorMap, Examples) {
  const auto c = load(rec("1", R"(["B","A"])", 1998) + rec("2", R"(["A"])", 1999), one_window());
  const auto m = build_author_map(c);
  EXPECT_EQ(m.authors, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(m.doc_authors, (std::vector<std::vector<std::size_t>>{{0, 1}, {0}}));

  const auto dup = build_author_map(load(rec("1", R"(["X","X "])", 1998), one_window()));
  EXPECT_EQ(dup.doc_authors, (std::vector<std::vector<std::size_t>>{{0}}));

  const auto empty = build_author_map(Corpus{});
  EXPECT_TRUE(empty.authors.empty());
  EXPECT_TRUE(empty.doc_authors.empty());
}

TEST(AuthorMap, StableUnderRecordPermutation) {
  const std::string a = rec("1", R"(["C","A"])", 1998), b = rec("2", R"(["B"])", 1999),
                    c = rec("3", R"(["A","B"])", 2000);
  const auto m1 = build_author_map(load(a + b + c, one_window()));
  const auto m2 = build_author_map(load(c + a + b, one_window()));
  EXPECT_EQ(m1.authors, m2.authors);
  EXPECT_EQ(m1.doc_authors[0], m2.doc_authors[1]);
  EXPECT_EQ(m1.doc_authors[1], m2.doc_authors[2]);
  EXPECT_EQ(m1.doc_authors[2], m2.doc_authors[0]);
  std::vector<int> used(m1.authors.size(), 0);
  for (const auto& ids : m1.doc_authors)
    for (auto i : ids) ++used[i];
  for (int n : used) EXPECT_GE(n, 1);
}
