#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rfc/corpus.hpp"
#include "rfc/index.hpp"
#include "rfc/ranker.hpp"
#include "rfc/textproc.hpp"
#include "rfc/topics.hpp"
#include "rfc/util.hpp"

namespace rfc {

// File names inside a snapshot directory.
namespace files {
inline constexpr const char* kFactChecks = "factchecks.jsonl";
inline constexpr const char* kArticles = "articles.jsonl";
inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kClaimIndex = "claim.idx";
inline constexpr const char* kBodyIndex = "body.idx";
inline constexpr const char* kTopicModel = "topics.model";
inline constexpr const char* kMixtures = "mixtures.jsonl";
inline constexpr const char* kWeights = "weights.toml";
inline constexpr const char* kRelated = "related.jsonl";
}  // namespace files

inline std::string snapshot_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

inline bool snapshot_has(const std::string& dir, const char* name) {
  return std::filesystem::exists(snapshot_path(dir, name));
}

// Everything the service needs to answer requests. Immutable once loaded.
struct Snapshot {
  std::vector<FactCheck> factchecks;
  std::vector<Article> articles;
  std::unordered_map<std::string, std::size_t> factcheck_pos;
  std::unordered_map<std::string, std::size_t> article_pos;
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const TopicModel> model;  // null when no model was trained
  ScoringCollection collection;
  Weights weights;
  RelatedArticlesMap related;

  std::string corpus_hash;
  std::string model_hash;  // empty without a model
  std::string vocab_hash;

  const FactCheck* factcheck(const std::string& id) const {
    auto it = factcheck_pos.find(id);
    return it == factcheck_pos.end() ? nullptr : &factchecks[it->second];
  }
  const Article* article(const std::string& id) const {
    auto it = article_pos.find(id);
    return it == article_pos.end() ? nullptr : &articles[it->second];
  }
};

// ---------------------------------------------------------------------------
// Pipeline stages, each reading and writing files in a snapshot directory.

// Token streams used for the vocabulary: one document per fact check.
inline std::vector<std::vector<std::string>> factcheck_token_docs(const std::vector<FactCheck>& factchecks) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(factchecks.size());
  for (const auto& fc : factchecks) docs.push_back(tokenize(factcheck_topic_text(fc)));
  return docs;
}

// Writes vocab.tsv, claim.idx and body.idx from factchecks.jsonl.
inline void build_index_stage(const std::string& dir,
                              FactCheckBodySource body_source = FactCheckBodySource::kPageText) {
  auto factchecks = corpus::load_factchecks(snapshot_path(dir, files::kFactChecks));
  auto docs = factcheck_token_docs(factchecks);
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs));
  save_vocabulary(*vocab, snapshot_path(dir, files::kVocab));
  std::vector<IndexRecord> claims, bodies;
  for (const auto& fc : factchecks) {
    claims.push_back({fc.id, fc.claim_reviewed});
    bodies.push_back({fc.id, factcheck_body_text(fc, body_source)});
  }
  build_index(claims, vocab, Field::kClaim).save(snapshot_path(dir, files::kClaimIndex));
  build_index(bodies, vocab, Field::kBody).save(snapshot_path(dir, files::kBodyIndex));
}

// Trains the topic model over fact-check texts; writes topics.model and the
// inferred fact-check mixtures.
inline LdaDiagnostics train_topics_stage(const std::string& dir, const LdaParams& params,
                                         const InferParams& infer = {}) {
  auto factchecks = corpus::load_factchecks(snapshot_path(dir, files::kFactChecks));
  auto vocab = std::make_shared<const Vocabulary>(load_vocabulary(snapshot_path(dir, files::kVocab)));
  std::vector<BagOfWords> bows;
  std::vector<std::string> texts, ids;
  for (const auto& fc : factchecks) {
    texts.push_back(factcheck_topic_text(fc));
    bows.push_back(to_bow(texts.back(), *vocab));
    ids.push_back(fc.id);
  }
  LdaDiagnostics diag;
  TopicModel model = train_lda(bows, vocab, params, &diag);
  model.save(snapshot_path(dir, files::kTopicModel));
  save_mixtures(ids, infer_all(texts, model, infer), snapshot_path(dir, files::kMixtures));
  return diag;
}

inline void set_thematic_stage(const std::string& dir, std::set<TopicId> ids) {
  auto vocab = std::make_shared<const Vocabulary>(load_vocabulary(snapshot_path(dir, files::kVocab)));
  auto model = TopicModel::load(snapshot_path(dir, files::kTopicModel), vocab);
  set_thematic(std::move(model), std::move(ids)).save(snapshot_path(dir, files::kTopicModel));
}

// Mixtures aligned with `factchecks`, taken from mixtures.jsonl.
inline std::vector<TopicMixture> aligned_mixtures(const std::vector<FactCheck>& factchecks,
                                                  const std::map<std::string, TopicMixture>& by_id) {
  std::vector<TopicMixture> out;
  out.reserve(factchecks.size());
  for (const auto& fc : factchecks) {
    auto it = by_id.find(fc.id);
    if (it == by_id.end()) throw Error("snapshot_incomplete", "no topic mixture for fact check " + fc.id);
    out.push_back(it->second);
  }
  return out;
}

inline std::shared_ptr<const TopicModel> load_model_if_present(const std::string& dir,
                                                               std::shared_ptr<const Vocabulary> vocab) {
  if (!snapshot_has(dir, files::kTopicModel)) return nullptr;
  return std::make_shared<const TopicModel>(TopicModel::load(snapshot_path(dir, files::kTopicModel), vocab));
}

// Computes related.jsonl: articles.jsonl scored against each fact check.
inline RelatedArticlesMap related_stage(const std::string& dir, const Weights& weights,
                                        const RelatedOptions& options = {}, SearchAdapter* adapter = nullptr,
                                        FactCheckBodySource body_source = FactCheckBodySource::kPageText,
                                        const InferParams& infer = {}) {
  auto factchecks = corpus::load_factchecks(snapshot_path(dir, files::kFactChecks));
  auto articles = corpus::load_articles(snapshot_path(dir, files::kArticles));
  auto vocab = std::make_shared<const Vocabulary>(load_vocabulary(snapshot_path(dir, files::kVocab)));
  auto model = load_model_if_present(dir, vocab);
  std::vector<TopicMixture> mixtures;
  if (model) mixtures = aligned_mixtures(factchecks, load_mixtures(snapshot_path(dir, files::kMixtures)));
  CollectionOptions copts;
  copts.infer = infer;
  copts.factcheck_body = body_source;
  ScoringCollection collection = build_article_collection(articles, vocab, model, copts);
  UrlIndex urls = make_url_index(articles);
  RelatedArticlesMap map =
      precompute_related(factchecks, mixtures, collection, weights, options, adapter, &urls, body_source);
  map.save(snapshot_path(dir, files::kRelated));
  return map;
}

inline std::string corpus_hash(const std::string& dir) {
  std::uint64_t h = util::fnv1a64(util::read_file(snapshot_path(dir, files::kFactChecks)));
  if (snapshot_has(dir, files::kArticles)) h = util::fnv1a64(util::read_file(snapshot_path(dir, files::kArticles)), h);
  return util::hex64(h);
}

// Loads a snapshot directory. Required: factchecks.jsonl, vocab.tsv, both
// index files and weights.toml (unless require_weights is false, as for the
// tuner that writes it). Optional: articles.jsonl, topics.model (with
// mixtures.jsonl) and related.jsonl.
inline std::shared_ptr<const Snapshot> load_snapshot(const std::string& dir, const InferParams& infer = {},
                                                     bool require_weights = true) {
  for (const char* name : {files::kFactChecks, files::kVocab, files::kClaimIndex, files::kBodyIndex})
    if (!snapshot_has(dir, name)) throw Error("snapshot_incomplete", "missing " + snapshot_path(dir, name));
  if (require_weights && !snapshot_has(dir, files::kWeights))
    throw Error("snapshot_incomplete", "missing " + snapshot_path(dir, files::kWeights));
  auto s = std::make_shared<Snapshot>();
  s->factchecks = corpus::load_factchecks(snapshot_path(dir, files::kFactChecks));
  if (snapshot_has(dir, files::kArticles)) s->articles = corpus::load_articles(snapshot_path(dir, files::kArticles));
  for (std::size_t i = 0; i < s->factchecks.size(); ++i) s->factcheck_pos.emplace(s->factchecks[i].id, i);
  for (std::size_t i = 0; i < s->articles.size(); ++i) s->article_pos.emplace(s->articles[i].id, i);
  s->vocab = std::make_shared<const Vocabulary>(load_vocabulary(snapshot_path(dir, files::kVocab)));
  TfIdfIndex claims = TfIdfIndex::load(snapshot_path(dir, files::kClaimIndex), s->vocab);
  TfIdfIndex bodies = TfIdfIndex::load(snapshot_path(dir, files::kBodyIndex), s->vocab);
  if (claims.ids().size() != s->factchecks.size())
    throw Error("snapshot_mismatch", "index does not cover factchecks.jsonl");
  for (std::size_t i = 0; i < s->factchecks.size(); ++i)
    if (claims.ids()[i] != s->factchecks[i].id) throw Error("snapshot_mismatch", "index order differs from corpus");
  std::vector<bool> has_body;
  for (std::size_t i = 0; i < bodies.n_docs(); ++i) has_body.push_back(!bodies.vector_at(i).empty() ||
                                                                       (s->factchecks[i].body_text &&
                                                                        !util::trim(*s->factchecks[i].body_text).empty()));
  s->model = load_model_if_present(dir, s->vocab);
  std::vector<TopicMixture> mixtures;
  if (s->model) mixtures = aligned_mixtures(s->factchecks, load_mixtures(snapshot_path(dir, files::kMixtures)));
  s->collection = ScoringCollection(std::move(claims), std::move(bodies), std::move(has_body), s->model,
                                    std::move(mixtures), infer);
  if (snapshot_has(dir, files::kWeights)) s->weights = load_weights(snapshot_path(dir, files::kWeights));
  if (snapshot_has(dir, files::kRelated)) s->related = RelatedArticlesMap::load(snapshot_path(dir, files::kRelated));
  s->corpus_hash = corpus_hash(dir);
  s->model_hash = s->model ? s->model->hash() : std::string();
  s->vocab_hash = s->vocab->hash();
  return s;
}

}  // namespace rfc
