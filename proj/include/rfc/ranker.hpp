#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfc/corpus.hpp"
#include "rfc/index.hpp"
#include "rfc/textproc.hpp"
#include "rfc/topics.hpp"
#include "rfc/url.hpp"
#include "rfc/util.hpp"

namespace rfc {

// Relevance weights and the display cutoff t_l.
struct Weights {
  double w_title = 1.0;
  double w_body = 0.0;
  double w_topics = 0.0;
  double w_thematic = 0.0;
  double t_l = 0.0;

  bool usable() const { return w_title > 0 || w_body > 0 || w_topics > 0 || w_thematic > 0; }
  Weights scaled(double c) const { return {w_title * c, w_body * c, w_topics * c, w_thematic * c, t_l * c}; }

  void validate() const {
    for (double w : {w_title, w_body, w_topics, w_thematic})
      if (!(w >= 0) || !std::isfinite(w)) throw Error("invalid_weights", "weights must be finite and non-negative");
    if (std::isnan(t_l)) throw Error("invalid_weights", "t_l must not be NaN");
  }

  friend bool operator==(const Weights&, const Weights&) = default;
};

// weights.toml: "key = value" lines; '#' starts a comment.
inline Weights parse_weights(std::string_view text) {
  Weights w;
  std::set<std::string> seen;
  std::size_t lineno = 0;
  for (auto raw : util::split(text, '\n')) {
    ++lineno;
    auto line = raw.substr(0, raw.find('#'));
    line = util::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    std::string key(util::trim(line.substr(0, eq)));
    auto value = util::parse_double(line.substr(eq + 1));
    if (!value) throw ParseError(lineno, "value for '" + key + "' is not a number");
    if (key == "w_title") w.w_title = *value;
    else if (key == "w_body") w.w_body = *value;
    else if (key == "w_topics") w.w_topics = *value;
    else if (key == "w_thematic") w.w_thematic = *value;
    else if (key == "t_l") w.t_l = *value;
    else throw ParseError(lineno, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");
  }
  for (const char* key : {"w_title", "w_body", "w_topics", "w_thematic", "t_l"})
    if (!seen.count(key)) throw Error("parse_error", std::string("weights: missing key '") + key + "'");
  w.validate();
  return w;
}

inline std::string format_weights(const Weights& w) {
  return "w_title = " + util::format_double(w.w_title) + "\nw_body = " + util::format_double(w.w_body) +
         "\nw_topics = " + util::format_double(w.w_topics) + "\nw_thematic = " + util::format_double(w.w_thematic) +
         "\nt_l = " + util::format_double(w.t_l) + "\n";
}

inline Weights load_weights(const std::string& path) {
  try {
    return parse_weights(util::read_file(path));
  } catch (const ParseError& e) {
    throw Error("parse_error", path + ": " + e.what());
  }
}

inline void save_weights(const Weights& w, const std::string& path) { util::write_file(path, format_weights(w)); }

// The four similarity channels for one (article, fact check) pair.
struct ComponentScores {
  double title = 0;
  double body = 0;
  double topics = 0;
  double thematic = 0;
};

inline double combine(const ComponentScores& s, const Weights& w) {
  return w.w_title * s.title + w.w_body * s.body + w.w_topics * s.topics + w.w_thematic * s.thematic;
}

struct ScoredResult {
  std::string factcheck_id;
  double s_title = 0;
  double s_body = 0;
  double s_topics = 0;
  double s_thematic = 0;
  double total = 0;
  bool body_missing = false;       // one side had no body text
  bool topics_degenerate = false;  // one side had a degenerate mixture

  ComponentScores components() const { return {s_title, s_body, s_topics, s_thematic}; }
};

// Everything the scorer needs from one side of a pair. The title vector of a
// fact check is built from its claim_reviewed text.
struct Features {
  SparseVector title;
  double title_sq_norm = 0;
  SparseVector body;
  double body_sq_norm = 0;
  bool has_body = false;
  TopicMixture mixture;
  bool has_mixture = false;

  static Features make(SparseVector title, SparseVector body, bool has_body, std::optional<TopicMixture> mixture) {
    Features f;
    f.title_sq_norm = title.sq_norm();
    f.title = std::move(title);
    f.body_sq_norm = body.sq_norm();
    f.body = std::move(body);
    f.has_body = has_body;
    if (mixture) {
      f.mixture = std::move(*mixture);
      f.has_mixture = true;
    }
    return f;
  }
};

inline ComponentScores component_scores(const Features& article, const Features& factcheck,
                                        const std::set<TopicId>& thematic_ids, bool* body_missing = nullptr,
                                        bool* degenerate = nullptr) {
  ComponentScores s;
  s.title = cosine(article.title, article.title_sq_norm, factcheck.title, factcheck.title_sq_norm);
  const bool no_body = !article.has_body || !factcheck.has_body;
  if (!no_body) s.body = cosine(article.body, article.body_sq_norm, factcheck.body, factcheck.body_sq_norm);
  const bool topics_ok = article.has_mixture && factcheck.has_mixture && !article.mixture.degenerate &&
                         !factcheck.mixture.degenerate;
  if (topics_ok) {
    s.topics = topic_cosine(article.mixture, factcheck.mixture);
    s.thematic = thematic_ids.empty() ? 0.0 : topic_cosine(article.mixture, factcheck.mixture, &thematic_ids);
  }
  if (body_missing) *body_missing = no_body;
  if (degenerate) *degenerate = !topics_ok;
  return s;
}

inline ScoredResult score_pair(const Features& article, const Features& factcheck, const Weights& weights,
                               const std::set<TopicId>& thematic_ids, std::string factcheck_id = {}) {
  ScoredResult r;
  r.factcheck_id = std::move(factcheck_id);
  ComponentScores s = component_scores(article, factcheck, thematic_ids, &r.body_missing, &r.topics_degenerate);
  r.s_title = s.title;
  r.s_body = s.body;
  r.s_topics = s.topics;
  r.s_thematic = s.thematic;
  r.total = combine(s, weights);
  return r;
}

// Sort by descending total (ties by ascending id), drop totals below t_l,
// keep the first k.
inline std::vector<ScoredResult> rank_results(std::vector<ScoredResult> scored, double t_l, std::size_t k) {
  std::erase_if(scored, [&](const ScoredResult& r) { return r.total < t_l; });
  std::sort(scored.begin(), scored.end(), [](const ScoredResult& a, const ScoredResult& b) {
    return a.total != b.total ? a.total > b.total : a.factcheck_id < b.factcheck_id;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

// Text handed to the scorer for the querying side.
struct QueryDocument {
  std::string title;
  std::string body;
};

enum class FactCheckBodySource {
  kPageText,  // extracted page text; a fact check without one has no body
  kMarkup,    // markup fields only: title + claim_reviewed
};

struct CollectionOptions {
  FactCheckBodySource factcheck_body = FactCheckBodySource::kPageText;
  InferParams infer;
};

inline std::string factcheck_body_text(const FactCheck& fc, FactCheckBodySource source) {
  if (source == FactCheckBodySource::kMarkup) return fc.title + "\n" + fc.claim_reviewed;
  return fc.body_text ? *fc.body_text : std::string();
}

// Text a fact check contributes to topic modeling.
inline std::string factcheck_topic_text(const FactCheck& fc) {
  std::string t = fc.title + "\n" + fc.claim_reviewed;
  if (fc.body_text) t += "\n" + *fc.body_text;
  return t;
}

// Articles use their body for topic inference, falling back to the title.
inline const std::string& article_topic_text(const std::string& title, const std::string& body) {
  return util::trim(body).empty() ? title : body;
}

inline std::uint64_t inference_seed(const TopicModel& model) { return util::mix_seed(model.seed()); }

// An indexed, scoreable side of the retrieval problem: fact checks (title
// channel = claim) or articles (title channel = title). Immutable after build.
class ScoringCollection {
 public:
  ScoringCollection() = default;

  ScoringCollection(TfIdfIndex title_index, TfIdfIndex body_index, std::vector<bool> has_body,
                    std::shared_ptr<const TopicModel> model, std::vector<TopicMixture> mixtures,
                    InferParams infer = {})
      : title_index_(std::move(title_index)),
        body_index_(std::move(body_index)),
        has_body_(std::move(has_body)),
        model_(std::move(model)),
        mixtures_(std::move(mixtures)),
        infer_(infer) {
    if (title_index_.ids() != body_index_.ids()) throw Error("invalid_argument", "title/body index ids differ");
    if (has_body_.size() != size()) throw Error("invalid_argument", "has_body size mismatch");
    if (model_ && mixtures_.size() != size()) throw Error("invalid_argument", "mixture count mismatch");
    features_.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      std::optional<TopicMixture> m;
      if (model_) m = mixtures_[i];
      features_.push_back(Features::make(title_index_.vector_at(i), body_index_.vector_at(i), has_body_[i], m));
    }
  }

  std::size_t size() const { return title_index_.n_docs(); }
  const std::vector<std::string>& ids() const { return title_index_.ids(); }
  const TfIdfIndex& title_index() const { return title_index_; }
  const TfIdfIndex& body_index() const { return body_index_; }
  const TopicModel* model() const { return model_.get(); }
  std::shared_ptr<const TopicModel> model_ptr() const { return model_; }
  const std::vector<TopicMixture>& mixtures() const { return mixtures_; }
  const Features& features(std::size_t pos) const { return features_.at(pos); }
  const InferParams& infer_params() const { return infer_; }

  const std::set<TopicId>& thematic_ids() const {
    static const std::set<TopicId> kNone;
    return model_ ? model_->thematic_ids() : kNone;
  }

  std::optional<TopicMixture> infer(std::string_view text) const {
    if (!model_) return std::nullopt;
    return infer_mixture(to_bow(text, model_->vocab()), *model_, infer_, inference_seed(*model_));
  }

  // Features of a querying document, expressed in this collection's IDF space.
  Features query_features(const QueryDocument& doc) const {
    bool has_body = !util::trim(doc.body).empty();
    return Features::make(title_index_.vectorize(doc.title), body_index_.vectorize(doc.body), has_body,
                          infer(article_topic_text(doc.title, doc.body)));
  }

 private:
  TfIdfIndex title_index_;
  TfIdfIndex body_index_;
  std::vector<bool> has_body_;
  std::shared_ptr<const TopicModel> model_;
  std::vector<TopicMixture> mixtures_;
  InferParams infer_;
  std::vector<Features> features_;
};

inline std::vector<TopicMixture> infer_all(const std::vector<std::string>& texts, const TopicModel& model,
                                           const InferParams& infer) {
  std::vector<TopicMixture> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(infer_mixture(to_bow(t, model.vocab()), model, infer, inference_seed(model)));
  return out;
}

// `mixtures`, when given, must be aligned with `factchecks`; otherwise they
// are inferred here.
inline ScoringCollection build_factcheck_collection(const std::vector<FactCheck>& factchecks,
                                                    std::shared_ptr<const Vocabulary> vocab,
                                                    std::shared_ptr<const TopicModel> model,
                                                    const CollectionOptions& options = {},
                                                    std::optional<std::vector<TopicMixture>> mixtures = std::nullopt) {
  std::vector<IndexRecord> claims, bodies;
  std::vector<bool> has_body;
  std::vector<std::string> topic_texts;
  for (const FactCheck& fc : factchecks) {
    claims.push_back({fc.id, fc.claim_reviewed});
    bodies.push_back({fc.id, factcheck_body_text(fc, options.factcheck_body)});
    has_body.push_back(!util::trim(bodies.back().text).empty());
    topic_texts.push_back(factcheck_topic_text(fc));
  }
  std::vector<TopicMixture> mix;
  if (model) mix = mixtures ? std::move(*mixtures) : infer_all(topic_texts, *model, options.infer);
  return ScoringCollection(build_index(claims, vocab, Field::kClaim), build_index(bodies, vocab, Field::kBody),
                           std::move(has_body), std::move(model), std::move(mix), options.infer);
}

inline ScoringCollection build_article_collection(const std::vector<Article>& articles,
                                                  std::shared_ptr<const Vocabulary> vocab,
                                                  std::shared_ptr<const TopicModel> model,
                                                  const CollectionOptions& options = {}) {
  std::vector<IndexRecord> titles, bodies;
  std::vector<bool> has_body;
  std::vector<std::string> topic_texts;
  for (const Article& a : articles) {
    titles.push_back({a.id, a.title});
    bodies.push_back({a.id, a.body_text});
    has_body.push_back(!util::trim(a.body_text).empty());
    topic_texts.push_back(article_topic_text(a.title, a.body_text));
  }
  std::vector<TopicMixture> mix;
  if (model) mix = infer_all(topic_texts, *model, options.infer);
  return ScoringCollection(build_index(titles, vocab, Field::kTitle), build_index(bodies, vocab, Field::kBody),
                           std::move(has_body), std::move(model), std::move(mix), options.infer);
}

// Scores every record of `collection` against `query`.
inline std::vector<ScoredResult> score_all(const Features& query, const ScoringCollection& collection,
                                           const Weights& weights) {
  std::vector<ScoredResult> out;
  out.reserve(collection.size());
  for (std::size_t i = 0; i < collection.size(); ++i)
    out.push_back(score_pair(query, collection.features(i), weights, collection.thematic_ids(), collection.ids()[i]));
  return out;
}

// Top-k fact checks for an article, all with total >= t_l.
inline std::vector<ScoredResult> retrieve(const Features& article, const ScoringCollection& factchecks,
                                          const Weights& weights, std::size_t k = 5) {
  if (factchecks.size() == 0) return {};
  return rank_results(score_all(article, factchecks, weights), weights.t_l, k);
}

inline std::vector<ScoredResult> retrieve(const QueryDocument& article, const ScoringCollection& factchecks,
                                          const Weights& weights, std::size_t k = 5) {
  if (factchecks.size() == 0) return {};
  return retrieve(factchecks.query_features(article), factchecks, weights, k);
}

// ---------------------------------------------------------------------------
// Claim-derived queries and the inverse (fact check -> articles) direction

struct Query {
  std::vector<std::string> terms;  // stemmed, in claim order
  bool empty = false;              // nothing informative survived

  std::string text() const {
    std::string out;
    for (const auto& t : terms) {
      if (!out.empty()) out.push_back(' ');
      out += t;
    }
    return out;
  }
};

// Keeps the max_terms distinct in-vocabulary tokens with the highest IDF
// (ln(n_docs / doc_freq) over the vocabulary corpus), preserving claim order.
inline Query build_query(std::string_view claim, const Vocabulary& vocab, std::size_t max_terms) {
  Query q;
  std::vector<std::pair<std::string, double>> candidates;
  std::unordered_set<std::string> seen;
  for (auto& tok : tokenize(claim)) {
    auto id = vocab.id(tok);
    if (!id || !seen.insert(tok).second) continue;
    double idf = std::log(static_cast<double>(vocab.n_docs()) / static_cast<double>(vocab.doc_freq(*id)));
    candidates.emplace_back(std::move(tok), idf);
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].second > candidates[b].second; });
  if (order.size() > max_terms) order.resize(max_terms);
  std::sort(order.begin(), order.end());
  for (std::size_t i : order) q.terms.push_back(candidates[i].first);
  q.empty = q.terms.empty();
  return q;
}

struct SearchHit {
  std::string url;
  std::string title;
};

// External search engine behind a narrow interface. Implementations may
// throw; callers fall back to local results.
class SearchAdapter {
 public:
  virtual ~SearchAdapter() = default;
  virtual std::vector<SearchHit> search(const Query& query, std::size_t n) = 0;
};

class NullSearchAdapter final : public SearchAdapter {
 public:
  std::vector<SearchHit> search(const Query&, std::size_t) override { return {}; }
};

// Replays recorded results keyed by the query text (space-joined terms).
// File format: JSONL {"query": "...", "results": [{"url": "...", "title": "..."}]}.
class FixtureSearchAdapter final : public SearchAdapter {
 public:
  explicit FixtureSearchAdapter(std::map<std::string, std::vector<SearchHit>> recorded)
      : recorded_(std::move(recorded)) {}

  static FixtureSearchAdapter load(const std::string& path) {
    auto rows = corpus::load_jsonl(path, [](const Json& j) {
      std::pair<std::string, std::vector<SearchHit>> row;
      row.first = j.at("query").get<std::string>();
      for (const auto& r : j.at("results")) row.second.push_back({r.at("url").get<std::string>(), r.value("title", "")});
      return row;
    });
    std::map<std::string, std::vector<SearchHit>> recorded;
    for (auto& [q, hits] : rows) recorded[q] = std::move(hits);
    return FixtureSearchAdapter(std::move(recorded));
  }

  std::vector<SearchHit> search(const Query& query, std::size_t n) override {
    auto it = recorded_.find(query.text());
    if (it == recorded_.end()) return {};
    std::vector<SearchHit> out = it->second;
    if (out.size() > n) out.resize(n);
    return out;
  }

 private:
  std::map<std::string, std::vector<SearchHit>> recorded_;
};

struct RelatedArticle {
  std::string article_id;  // the article id, or the URL for adapter hits outside the corpus
  double score = 0;

  friend bool operator==(const RelatedArticle&, const RelatedArticle&) = default;
};

struct RelatedOptions {
  std::size_t n = 20;
  std::size_t max_query_terms = 8;
};

struct RelatedDiagnostics {
  bool query_empty = false;
  bool adapter_failed = false;
  std::string adapter_error;
};

// Lookup from normalized URL to article id, used to merge adapter hits.
using UrlIndex = std::unordered_map<std::string, std::string>;

inline UrlIndex make_url_index(const std::vector<Article>& articles) {
  UrlIndex idx;
  for (const auto& a : articles) idx.emplace(url::normalize_for_dedupe(a.url), a.id);
  return idx;
}

// Articles carrying the claim of `fc`. The title channel compares the
// claim-derived query with article titles; the other channels use the fact
// check's body and topic mixture. Adapter hits, if any, come first.
inline std::vector<RelatedArticle> find_related_articles(const FactCheck& fc, const TopicMixture* fc_mixture,
                                                         const ScoringCollection& articles, const Weights& weights,
                                                         const RelatedOptions& options = {},
                                                         SearchAdapter* adapter = nullptr,
                                                         const UrlIndex* urls = nullptr,
                                                         RelatedDiagnostics* diagnostics = nullptr,
                                                         FactCheckBodySource body_source = FactCheckBodySource::kPageText) {
  RelatedDiagnostics local;
  RelatedDiagnostics& diag = diagnostics ? *diagnostics : local;
  const Vocabulary& vocab = articles.title_index().vocab();
  Query query = build_query(fc.claim_reviewed, vocab, options.max_query_terms);
  diag.query_empty = query.empty;

  std::vector<RelatedArticle> local_results;
  if (articles.size() > 0) {
    std::optional<TopicMixture> mixture;
    if (articles.model()) {
      if (fc_mixture) mixture = *fc_mixture;
      else mixture = articles.infer(factcheck_topic_text(fc));
    }
    std::string body = factcheck_body_text(fc, body_source);
    bool has_body = !util::trim(body).empty();
    Features f = Features::make(articles.title_index().vectorize(query.text()), articles.body_index().vectorize(body),
                                has_body, mixture);
    for (const ScoredResult& r : rank_results(score_all(f, articles, weights), weights.t_l, options.n))
      local_results.push_back({r.factcheck_id, r.total});
  }

  std::vector<RelatedArticle> out;
  std::unordered_set<std::string> taken;
  if (adapter && !query.empty) {
    try {
      std::unordered_map<std::string, double> local_scores;
      for (const auto& r : local_results) local_scores.emplace(r.article_id, r.score);
      for (const SearchHit& hit : adapter->search(query, options.n)) {
        std::string key = url::normalize_for_dedupe(hit.url);
        if (!taken.insert(key).second) continue;
        std::string id = hit.url;
        if (urls)
          if (auto it = urls->find(key); it != urls->end()) id = it->second;
        auto s = local_scores.find(id);
        out.push_back({id, s == local_scores.end() ? 0.0 : s->second});
        taken.insert(id);
      }
    } catch (const std::exception& e) {
      out.clear();
      taken.clear();
      diag.adapter_failed = true;
      diag.adapter_error = e.what();
    }
  }
  for (const auto& r : local_results) {
    if (out.size() >= options.n) break;
    if (taken.count(r.article_id)) continue;
    out.push_back(r);
  }
  if (out.size() > options.n) out.resize(options.n);
  return out;
}

// Fact check id -> related articles, one entry per fact check.
struct RelatedArticlesMap {
  std::map<std::string, std::vector<RelatedArticle>> entries;

  friend bool operator==(const RelatedArticlesMap&, const RelatedArticlesMap&) = default;

  // JSONL: {"factcheck_id": "...", "articles": [["article id", score], ...]}
  void save(const std::string& path) const {
    std::string buf;
    for (const auto& [fc, list] : entries) {
      Json arr = Json::array();
      for (const auto& r : list) arr.push_back(Json::array({r.article_id, r.score}));
      buf += Json{{"factcheck_id", fc}, {"articles", arr}}.dump() + "\n";
    }
    util::write_file(path, buf);
  }

  static RelatedArticlesMap load(const std::string& path) {
    RelatedArticlesMap m;
    auto rows = corpus::load_jsonl(path, [](const Json& j) {
      std::pair<std::string, std::vector<RelatedArticle>> row;
      row.first = j.at("factcheck_id").get<std::string>();
      for (const auto& e : j.at("articles")) row.second.push_back({e.at(0).get<std::string>(), e.at(1).get<double>()});
      return row;
    });
    for (auto& [fc, list] : rows)
      if (!m.entries.emplace(fc, std::move(list)).second) throw Error("parse_error", "duplicate factcheck_id " + fc);
    return m;
  }
};

// `factcheck_mixtures`, when non-empty, is aligned with `factchecks`.
inline RelatedArticlesMap precompute_related(const std::vector<FactCheck>& factchecks,
                                             const std::vector<TopicMixture>& factcheck_mixtures,
                                             const ScoringCollection& articles, const Weights& weights,
                                             const RelatedOptions& options = {}, SearchAdapter* adapter = nullptr,
                                             const UrlIndex* urls = nullptr,
                                             FactCheckBodySource body_source = FactCheckBodySource::kPageText) {
  RelatedArticlesMap m;
  for (std::size_t i = 0; i < factchecks.size(); ++i) {
    const TopicMixture* mix = i < factcheck_mixtures.size() ? &factcheck_mixtures[i] : nullptr;
    m.entries[factchecks[i].id] =
        find_related_articles(factchecks[i], mix, articles, weights, options, adapter, urls, nullptr, body_source);
  }
  return m;
}

// Mixtures persisted alongside the model: JSONL {"id", "degenerate", "weights": [[topic, p], ...]}.
inline void save_mixtures(const std::vector<std::string>& ids, const std::vector<TopicMixture>& mixtures,
                          const std::string& path) {
  if (ids.size() != mixtures.size()) throw Error("invalid_argument", "save_mixtures: size mismatch");
  std::string buf;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Json w = Json::array();
    for (const auto& [t, p] : mixtures[i].weights.entries()) w.push_back(Json::array({t, p}));
    buf += Json{{"id", ids[i]}, {"degenerate", mixtures[i].degenerate}, {"weights", w}}.dump() + "\n";
  }
  util::write_file(path, buf);
}

inline std::map<std::string, TopicMixture> load_mixtures(const std::string& path) {
  std::map<std::string, TopicMixture> out;
  auto rows = corpus::load_jsonl(path, [](const Json& j) {
    std::pair<std::string, TopicMixture> row;
    row.first = j.at("id").get<std::string>();
    row.second.degenerate = j.at("degenerate").get<bool>();
    std::vector<SparseVector::Entry> entries;
    for (const auto& e : j.at("weights")) entries.emplace_back(e.at(0).get<TopicId>(), e.at(1).get<double>());
    row.second.weights = SparseVector(std::move(entries));
    return row;
  });
  for (auto& [id, m] : rows) out[id] = std::move(m);
  return out;
}

}  // namespace rfc
