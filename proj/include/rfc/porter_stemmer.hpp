#pragma once

// Porter suffix-stripping stemmer, following the behaviour of Martin Porter's
// reference implementation: words of length <= 2 are left untouched, step 2
// uses BLI->BLE (instead of ABLI->ABLE) and includes LOGI->LOG.
// Input is expected to be lowercase ASCII; other bytes are treated as consonants.

#include <string>
#include <string_view>

namespace rfc {

class PorterStemmer {
 public:
  std::string operator()(std::string_view word) const { return stem(word); }

  static std::string stem(std::string_view word) {
    std::string w(word);
    if (w.size() <= 2) return w;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5(w);
    return w;
  }

 private:
  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  static bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

  // A 'y' is a consonant at the start of a word or after a vowel.
  static bool is_consonant(std::string_view w, std::size_t i) {
    if (is_vowel_letter(w[i])) return false;
    // Resolve runs of 'y' iteratively: each 'y' flips the class of the letter before it.
    bool flip = false;
    while (i > 0 && w[i] == 'y') {
      flip = !flip;
      --i;
    }
    if (w[i] == 'y') return !flip;  // 'y' at position 0 is a consonant
    return (!is_vowel_letter(w[i])) != flip;
  }

  // m in [C](VC)^m[V].
  static int measure(std::string_view stem) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < stem.size(); ++i) {
      bool cons = is_consonant(stem, i);
      if (cons && prev_vowel) ++m;
      prev_vowel = !cons;
    }
    return m;
  }

  static bool contains_vowel(std::string_view stem) {
    for (std::size_t i = 0; i < stem.size(); ++i)
      if (!is_consonant(stem, i)) return true;
    return false;
  }

  static bool ends_double_consonant(std::string_view w) {
    std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
  }

  // *o: stem ends consonant-vowel-consonant, last not w, x or y.
  static bool ends_cvc(std::string_view w) {
    std::size_t n = w.size();
    if (n < 3) return false;
    if (!is_consonant(w, n - 3) || is_consonant(w, n - 2) || !is_consonant(w, n - 1)) return false;
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  static bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
  }

  // Applies the first rule whose suffix matches, if the remaining stem has
  // measure > min_measure. Stops at the first matching suffix either way.
  template <std::size_t N>
  static bool apply_measure_rules(std::string& w, const Rule (&rules)[N], int min_measure) {
    for (const Rule& r : rules) {
      if (!ends_with(w, r.suffix)) continue;
      std::string_view stem(w.data(), w.size() - r.suffix.size());
      if (measure(stem) > min_measure) {
        w.resize(stem.size());
        w += r.replacement;
        return true;
      }
      return false;
    }
    return false;
  }

  static void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
      w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
      w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
      // unchanged
    } else if (ends_with(w, "s")) {
      w.pop_back();
    }
  }

  static void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
      if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) w.pop_back();
      return;
    }
    std::size_t cut = 0;
    if (ends_with(w, "ed")) cut = 2;
    else if (ends_with(w, "ing")) cut = 3;
    if (cut == 0) return;
    std::string_view stem(w.data(), w.size() - cut);
    if (!contains_vowel(stem)) return;
    w.resize(stem.size());
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
      w.push_back('e');
    } else if (ends_double_consonant(w)) {
      char c = w.back();
      if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w) == 1 && ends_cvc(w)) {
      w.push_back('e');
    }
  }

  static void step1c(std::string& w) {
    if (ends_with(w, "y") && contains_vowel(std::string_view(w).substr(0, w.size() - 1))) w.back() = 'i';
  }

  static void step2(std::string& w) {
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},   {"izer", "ize"},
        {"bli", "ble"},     {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},       {"ousli", "ous"},
        {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        {"logi", "log"},
    };
    apply_measure_rules(w, rules, 0);
  }

  static void step3(std::string& w) {
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
    };
    apply_measure_rules(w, rules, 0);
  }

  static void step4(std::string& w) {
    static constexpr std::string_view suffixes[] = {"al",  "ance", "ence", "er",  "ic",  "able", "ible",
                                                    "ant", "ement", "ment", "ent", "ion", "ou",   "ism",
                                                    "ate", "iti",  "ous",  "ive", "ize"};
    for (std::string_view suffix : suffixes) {
      if (!ends_with(w, suffix)) continue;
      std::string_view stem(w.data(), w.size() - suffix.size());
      bool ok = measure(stem) > 1;
      if (suffix == "ion") ok = ok && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
      if (ok) w.resize(stem.size());
      return;
    }
  }

  static void step5(std::string& w) {
    if (ends_with(w, "e")) {
      std::string_view stem(w.data(), w.size() - 1);
      int m = measure(stem);
      if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
    }
    if (ends_with(w, "ll") && measure(std::string_view(w).substr(0, w.size() - 1)) > 1) w.pop_back();
  }
};

}  // namespace rfc
