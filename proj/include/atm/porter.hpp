// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>

namespace atm {

/// Porter (1980) suffix-stripping stemmer, steps 1a through 5b, as published
/// (ABLI -> ABLE in step 2, no LOGI rule). Input is expected to be lowercase
/// ASCII letters; other bytes are treated as consonants.
///
/// Within each step only the rule with the longest matching suffix is
/// considered; if its condition fails the step leaves the word unchanged.
class PorterStemmer {
 public:
  std::string operator()(std::string_view token) const {
    Word w{std::string(token)};
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return std::move(w.s);
  }

 private:
  struct Word {
    std::string s;

    bool is_consonant(std::size_t i) const {
      switch (s[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return false;
        case 'y': return i == 0 ? true : !is_consonant(i - 1);
        default: return true;
      }
    }

    // m in [C](VC)^m[V] over s[0, len).
    int measure(std::size_t len) const {
      int m = 0;
      std::size_t i = 0;
      while (i < len && is_consonant(i)) ++i;
      while (i < len) {
        while (i < len && !is_consonant(i)) ++i;
        if (i >= len) break;
        while (i < len && is_consonant(i)) ++i;
        ++m;
      }
      return m;
    }

    bool has_vowel(std::size_t len) const {
      for (std::size_t i = 0; i < len; ++i)
        if (!is_consonant(i)) return true;
      return false;
    }

    bool ends_double_consonant(std::size_t len) const {
      return len >= 2 && s[len - 1] == s[len - 2] && is_consonant(len - 1);
    }

    // cvc, where the final c is not w, x or y.
    bool ends_cvc(std::size_t len) const {
      if (len < 3) return false;
      if (!is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3)) return false;
      const char c = s[len - 1];
      return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends_with(std::string_view suffix) const {
      return s.size() >= suffix.size() &&
             std::string_view(s).substr(s.size() - suffix.size()) == suffix;
    }

    std::size_t stem_len(std::string_view suffix) const { return s.size() - suffix.size(); }

    void replace_suffix(std::string_view suffix, std::string_view repl) {
      s.resize(s.size() - suffix.size());
      s += repl;
    }
  };

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  // Applies the first rule whose suffix matches when stem measure > min_m.
  // Rule tables are ordered so the longest matching suffix comes first.
  template <std::size_t N>
  static void apply_measure_rules(Word& w, const std::array<Rule, N>& rules, int min_m) {
    for (const auto& r : rules) {
      if (!w.ends_with(r.suffix)) continue;
      if (w.measure(w.stem_len(r.suffix)) > min_m) w.replace_suffix(r.suffix, r.replacement);
      return;
    }
  }

  static void step1a(Word& w) {
    if (w.ends_with("sses")) w.replace_suffix("sses", "ss");
    else if (w.ends_with("ies")) w.replace_suffix("ies", "i");
    else if (w.ends_with("ss")) return;
    else if (w.ends_with("s")) w.replace_suffix("s", "");
  }

  static void step1b(Word& w) {
    if (w.ends_with("eed")) {
      if (w.measure(w.stem_len("eed")) > 0) w.replace_suffix("eed", "ee");
      return;
    }
    bool stripped = false;
    for (std::string_view suf : {std::string_view("ed"), std::string_view("ing")}) {
      if (w.ends_with(suf)) {
        if (w.has_vowel(w.stem_len(suf))) {
          w.replace_suffix(suf, "");
          stripped = true;
        }
        break;
      }
    }
    if (!stripped) return;

    if (w.ends_with("at")) w.replace_suffix("at", "ate");
    else if (w.ends_with("bl")) w.replace_suffix("bl", "ble");
    else if (w.ends_with("iz")) w.replace_suffix("iz", "ize");
    else if (w.ends_double_consonant(w.s.size())) {
      const char c = w.s.back();
      if (c != 'l' && c != 's' && c != 'z') w.s.pop_back();
    } else if (w.measure(w.s.size()) == 1 && w.ends_cvc(w.s.size())) {
      w.s += 'e';
    }
  }

  static void step1c(Word& w) {
    if (w.ends_with("y") && w.has_vowel(w.stem_len("y"))) w.replace_suffix("y", "i");
  }

  static void step2(Word& w) {
    static constexpr std::array<Rule, 20> rules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    }};
    // The published table is grouped by penultimate letter, so at most one
    // suffix can match except for ational/tional and ization/ation, which the
    // ordering above resolves longest-first.
    apply_measure_rules(w, rules, 0);
  }

  static void step3(Word& w) {
    static constexpr std::array<Rule, 7> rules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    apply_measure_rules(w, rules, 0);
  }

  static void step4(Word& w) {
    static constexpr std::array<std::string_view, 19> suffixes{
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    // Longest match first among overlapping candidates (ement > ment > ent).
    std::string_view match;
    for (auto suf : suffixes)
      if (w.ends_with(suf) && suf.size() > match.size()) match = suf;
    if (match.empty()) return;
    const std::size_t len = w.stem_len(match);
    if (w.measure(len) <= 1) return;
    if (match == "ion" && !(len > 0 && (w.s[len - 1] == 's' || w.s[len - 1] == 't'))) return;
    w.replace_suffix(match, "");
  }

  static void step5a(Word& w) {
    if (!w.ends_with("e")) return;
    const std::size_t len = w.stem_len("e");
    const int m = w.measure(len);
    if (m > 1 || (m == 1 && !w.ends_cvc(len))) w.s.pop_back();
  }

  static void step5b(Word& w) {
    if (w.measure(w.s.size()) > 1 && w.ends_double_consonant(w.s.size()) && w.s.back() == 'l')
      w.s.pop_back();
  }
};

inline std::string stem(std::string_view token) { return PorterStemmer{}(token); }

}  // namespace atm
