#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rfc/porter_stemmer.hpp"
#include "rfc/util.hpp"

namespace rfc {

using TermId = std::uint32_t;

// Lowercases, splits on anything that is not an ASCII letter or digit, drops
// tokens shorter than two characters and stems the rest. Non-ASCII bytes act
// as separators.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) out.push_back(PorterStemmer::stem(cur));
    cur.clear();
  };
  for (char c : text) {
    char l = util::ascii_lower(c);
    if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9')) {
      cur.push_back(l);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

class Vocabulary {
 public:
  Vocabulary() = default;

  // `entries` must be sorted by term with unique terms.
  Vocabulary(std::vector<std::pair<std::string, std::size_t>> entries, std::size_t n_docs) : n_docs_(n_docs) {
    terms_.reserve(entries.size());
    doc_freq_.reserve(entries.size());
    for (auto& [term, df] : entries) {
      if (!terms_.empty() && !(terms_.back() < term)) throw Error("invalid_vocabulary", "terms not sorted/unique");
      term_ids_.emplace(term, static_cast<TermId>(terms_.size()));
      terms_.push_back(std::move(term));
      doc_freq_.push_back(df);
    }
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::size_t n_docs() const { return n_docs_; }

  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::size_t doc_freq(TermId id) const { return doc_freq_.at(id); }

  std::optional<TermId> id(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view term) const { return id(term).has_value(); }

  // Stable content hash (terms + doc freqs + n_docs).
  std::string hash() const {
    std::uint64_t h = util::fnv1a64(std::to_string(n_docs_));
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      h = util::fnv1a64(terms_[i], h);
      h = util::fnv1a64("\t" + std::to_string(doc_freq_[i]) + "\n", h);
    }
    return util::hex64(h);
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.n_docs_ == b.n_docs_ && a.terms_ == b.terms_ && a.doc_freq_ == b.doc_freq_;
  }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::vector<std::size_t> doc_freq_;
  std::size_t n_docs_ = 0;
};

// Sparse term counts over a vocabulary, sorted by term id.
struct BagOfWords {
  std::vector<std::pair<TermId, std::uint32_t>> counts;
  std::uint64_t total = 0;

  bool empty() const { return counts.empty(); }

  std::uint32_t count(TermId id) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), id,
                               [](const auto& e, TermId t) { return e.first < t; });
    return (it != counts.end() && it->first == id) ? it->second : 0;
  }

  friend bool operator==(const BagOfWords&, const BagOfWords&) = default;
};

// Document frequency over distinct-token presence; drops every token that
// appears in more than half of the documents (strictly: df > n_docs / 2).
inline Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents) {
  if (documents.empty()) throw Error("invalid_argument", "build_vocabulary: no documents");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> distinct(doc.begin(), doc.end());
    for (auto t : distinct) ++df[std::string(t)];
  }
  const std::size_t n = documents.size();
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df)
    if (2 * count <= n) kept.emplace_back(term, count);
  std::sort(kept.begin(), kept.end());
  return Vocabulary(std::move(kept), n);
}

inline BagOfWords to_bow(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::unordered_map<TermId, std::uint32_t> counts;
  for (const auto& t : tokens)
    if (auto id = vocab.id(t)) ++counts[*id];
  BagOfWords bow;
  bow.counts.assign(counts.begin(), counts.end());
  std::sort(bow.counts.begin(), bow.counts.end());
  for (const auto& [id, c] : bow.counts) bow.total += c;
  return bow;
}

inline BagOfWords to_bow(std::string_view text, const Vocabulary& vocab) {
  auto tokens = tokenize(text);
  return to_bow(std::span<const std::string>(tokens), vocab);
}

// vocab.tsv: "# n_docs=N" header, then term \t term_id \t doc_freq sorted by term.
inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::string buf = "# n_docs=" + std::to_string(vocab.n_docs()) + "\n";
  for (std::size_t i = 0; i < vocab.size(); ++i)
    buf += vocab.terms()[i] + "\t" + std::to_string(i) + "\t" + std::to_string(vocab.doc_freq(static_cast<TermId>(i))) +
           "\n";
  util::write_file(path, buf);
}

inline Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> n_docs;
  std::vector<std::pair<std::string, std::size_t>> entries;
  auto parse_size = [&](std::string_view s) {
    s = util::trim(s);
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
      throw ParseError(lineno, "bad integer '" + std::string(s) + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# n_docs=", 0) == 0) {
      n_docs = parse_size(std::string_view(line).substr(9));
      continue;
    }
    auto fields = util::split(line, '\t');
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 tab-separated fields");
    if (parse_size(fields[1]) != entries.size()) throw ParseError(lineno, "term ids must be consecutive");
    entries.emplace_back(std::string(fields[0]), parse_size(fields[2]));
  }
  if (!n_docs) throw Error("parse_error", path + ": missing n_docs header");
  try {
    return Vocabulary(std::move(entries), *n_docs);
  } catch (const Error& e) {
    throw Error("parse_error", path + ": " + e.what());
  }
}

}  // namespace rfc
