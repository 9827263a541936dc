#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfc/textproc.hpp"
#include "rfc/util.hpp"

namespace rfc {

// Non-negative sparse vector over term (or topic) ids, sorted by id, with no
// stored zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;

  // Sorts, merges duplicate ids by summation and prunes zeros.
  explicit SparseVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::vector<Entry> merged;
    for (const Entry& e : entries_) {
      if (e.second < 0 || !std::isfinite(e.second)) throw Error("invalid_argument", "SparseVector: negative or non-finite weight");
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [](const Entry& e) { return e.second == 0.0; });
    entries_ = std::move(merged);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  double get(std::uint32_t id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, std::uint32_t t) { return e.first < t; });
    return (it != entries_.end() && it->first == id) ? it->second : 0.0;
  }

  double sq_norm() const {
    double s = 0;
    for (const auto& [id, w] : entries_) s += w * w;
    return s;
  }
  double norm() const { return std::sqrt(sq_norm()); }

  SparseVector scaled(double c) const {
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [id, w] : entries_) out.emplace_back(id, w * c);
    return SparseVector(std::move(out));
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

inline double dot(const SparseVector& u, const SparseVector& v) {
  const auto& a = u.entries();
  const auto& b = v.entries();
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

// Cosine with precomputed squared norms; 0 when either is 0. Clamped to
// [0, 1]. One square root of the product keeps cosine(u, u) exactly 1.
inline double cosine(const SparseVector& u, double sq_norm_u, const SparseVector& v, double sq_norm_v) {
  if (sq_norm_u == 0.0 || sq_norm_v == 0.0) return 0.0;
  double c = dot(u, v) / std::sqrt(sq_norm_u * sq_norm_v);
  return std::clamp(c, 0.0, 1.0);
}

inline double cosine(const SparseVector& u, const SparseVector& v) { return cosine(u, u.sq_norm(), v, v.sq_norm()); }

enum class Field { kTitle, kBody, kClaim };

inline std::string_view to_string(Field f) {
  switch (f) {
    case Field::kTitle: return "title";
    case Field::kBody: return "body";
    case Field::kClaim: return "claim";
  }
  return "title";
}

inline Field field_from_string(std::string_view s) {
  if (s == "title") return Field::kTitle;
  if (s == "body") return Field::kBody;
  if (s == "claim") return Field::kClaim;
  throw Error("invalid_argument", "unknown field tag '" + std::string(s) + "'");
}

// TF-IDF vectors for one text field of a record collection. Document
// frequencies are counted over the indexed records themselves; terms of the
// shared vocabulary that never occur in this field get idf 0.
// Immutable once built.
class TfIdfIndex {
 public:
  TfIdfIndex() = default;

  TfIdfIndex(std::shared_ptr<const Vocabulary> vocab, Field field, std::vector<std::string> ids,
             const std::vector<BagOfWords>& bows)
      : vocab_(std::move(vocab)), field_(field), ids_(std::move(ids)) {
    if (!vocab_) throw Error("invalid_argument", "TfIdfIndex: null vocabulary");
    if (ids_.size() != bows.size()) throw Error("invalid_argument", "TfIdfIndex: ids/bows size mismatch");
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!positions_.emplace(ids_[i], i).second) throw Error("duplicate_id", "duplicate record id '" + ids_[i] + "'");
    doc_freq_.assign(vocab_->size(), 0);
    for (const BagOfWords& bow : bows)
      for (const auto& [id, c] : bow.counts) {
        if (id >= doc_freq_.size()) throw Error("invalid_argument", "TfIdfIndex: term id outside vocabulary");
        ++doc_freq_[id];
      }
    vectors_.reserve(bows.size());
    for (const BagOfWords& bow : bows) vectors_.push_back(vectorize(bow));
    cache_norms();
  }

  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  Field field() const { return field_; }
  std::size_t n_docs() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t doc_freq(TermId id) const { return id < doc_freq_.size() ? doc_freq_[id] : 0; }

  // ln(n_docs / doc_freq); 0 for terms absent from the indexed records.
  double idf(TermId id) const {
    std::size_t df = doc_freq(id);
    if (df == 0 || ids_.empty()) return 0.0;
    return std::log(static_cast<double>(ids_.size()) / static_cast<double>(df));
  }

  // Query-side lookup; out-of-vocabulary terms contribute 0.
  double idf(std::string_view term) const {
    auto id = vocab_->id(term);
    return id ? idf(*id) : 0.0;
  }

  // Raw-count TF times IDF; zero weights pruned.
  SparseVector vectorize(const BagOfWords& bow) const {
    std::vector<SparseVector::Entry> entries;
    entries.reserve(bow.counts.size());
    for (const auto& [id, c] : bow.counts) {
      double w = static_cast<double>(c) * idf(id);
      if (w > 0) entries.emplace_back(id, w);
    }
    return SparseVector(std::move(entries));
  }

  SparseVector vectorize(std::string_view text) const { return vectorize(to_bow(text, *vocab_)); }

  std::optional<std::size_t> position(std::string_view id) const {
    auto it = positions_.find(std::string(id));
    if (it == positions_.end()) return std::nullopt;
    return it->second;
  }

  const SparseVector& vector_at(std::size_t pos) const { return vectors_.at(pos); }
  double sq_norm_at(std::size_t pos) const { return sq_norms_.at(pos); }

  const SparseVector& vector(std::string_view id) const {
    auto pos = position(id);
    if (!pos) throw Error("not_found", "no record '" + std::string(id) + "' in index");
    return vectors_[*pos];
  }

  double similarity(const SparseVector& query, std::size_t pos) const {
    return cosine(query, query.sq_norm(), vectors_.at(pos), sq_norms_.at(pos));
  }

  // Snapshot: a JSON header line, a document-frequency line, then one JSON
  // line per record. Doubles are written in shortest round-trip form.
  void save(const std::string& path) const {
    using Json = nlohmann::json;
    std::string buf;
    Json header = {{"format", "rfc-tfidf-index"}, {"version", 1},
                   {"field", std::string(to_string(field_))}, {"n_docs", ids_.size()},
                   {"vocab_hash", vocab_->hash()}, {"vocab_size", vocab_->size()}};
    buf += header.dump() + "\n";
    Json df = Json::array();
    for (std::size_t t = 0; t < doc_freq_.size(); ++t)
      if (doc_freq_[t]) df.push_back({t, doc_freq_[t]});
    buf += Json{{"doc_freq", df}}.dump() + "\n";
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      Json v = Json::array();
      for (const auto& [id, w] : vectors_[i].entries()) v.push_back({id, w});
      buf += Json{{"id", ids_[i]}, {"v", v}}.dump() + "\n";
    }
    util::write_file(path, buf);
  }

  static TfIdfIndex load(const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
    using Json = nlohmann::json;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    auto next_json = [&]() -> Json {
      if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of index file");
      ++lineno;
      Json j = Json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw ParseError(lineno, "malformed JSON");
      return j;
    };
    TfIdfIndex idx;
    idx.vocab_ = std::move(vocab);
    try {
      Json header = next_json();
      if (header.value("format", "") != "rfc-tfidf-index") throw ParseError(1, "not an index snapshot");
      if (header.at("vocab_hash").get<std::string>() != idx.vocab_->hash())
        throw Error("vocab_mismatch", path + ": index was built against a different vocabulary");
      idx.field_ = field_from_string(header.at("field").get<std::string>());
      std::size_t n = header.at("n_docs").get<std::size_t>();
      idx.doc_freq_.assign(idx.vocab_->size(), 0);
      Json df = next_json();
      for (const auto& e : df.at("doc_freq")) idx.doc_freq_.at(e.at(0).get<std::size_t>()) = e.at(1).get<std::size_t>();
      for (std::size_t i = 0; i < n; ++i) {
        Json rec = next_json();
        std::string id = rec.at("id").get<std::string>();
        std::vector<SparseVector::Entry> entries;
        for (const auto& e : rec.at("v")) entries.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<double>());
        if (!idx.positions_.emplace(id, idx.ids_.size()).second) throw ParseError(lineno, "duplicate id '" + id + "'");
        idx.ids_.push_back(std::move(id));
        idx.vectors_.emplace_back(std::move(entries));
      }
    } catch (const Json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const std::out_of_range& e) {
      throw ParseError(lineno, e.what());
    }
    idx.cache_norms();
    return idx;
  }

 private:
  void cache_norms() {
    sq_norms_.clear();
    sq_norms_.reserve(vectors_.size());
    for (const auto& v : vectors_) sq_norms_.push_back(v.sq_norm());
  }

  std::shared_ptr<const Vocabulary> vocab_;
  Field field_ = Field::kTitle;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<std::size_t> doc_freq_;
  std::vector<SparseVector> vectors_;
  std::vector<double> sq_norms_;
};

struct IndexRecord {
  std::string id;
  std::string text;
};

inline TfIdfIndex build_index(const std::vector<IndexRecord>& records, std::shared_ptr<const Vocabulary> vocab,
                              Field field) {
  if (!vocab) throw Error("invalid_argument", "build_index: null vocabulary");
  std::vector<std::string> ids;
  std::vector<BagOfWords> bows;
  ids.reserve(records.size());
  bows.reserve(records.size());
  for (const auto& r : records) {
    ids.push_back(r.id);
    bows.push_back(to_bow(r.text, *vocab));
  }
  return TfIdfIndex(std::move(vocab), field, std::move(ids), bows);
}

}  // namespace rfc
