#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfc/index.hpp"
#include "rfc/textproc.hpp"
#include "rfc/util.hpp"

namespace rfc {

using TopicId = std::uint32_t;

struct LdaParams {
  std::size_t k = 300;
  std::optional<double> alpha;  // symmetric document-topic prior; defaults to 50 / k
  double beta = 0.01;           // symmetric topic-word prior
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(k); }
};

struct InferParams {
  std::size_t iterations = 50;
  double floor = 0.01;  // proportions below this are dropped before renormalizing
};

namespace detail {

// Uniform double in [0, 1) from 53 random bits; identical on every platform
// for a given engine state, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t sample_index(std::span<const double> cumulative, double u) {
  double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace detail

// Document-topic proportions. Entries below the inference floor are absent.
// A degenerate mixture (empty or all-OOV input) is uniform over all topics.
struct TopicMixture {
  SparseVector weights;
  bool degenerate = false;

  double weight(TopicId t) const { return weights.get(t); }
  double sum() const {
    double s = 0;
    for (const auto& [t, w] : weights.entries()) s += w;
    return s;
  }
  friend bool operator==(const TopicMixture&, const TopicMixture&) = default;
};

// K topic-word distributions over a shared vocabulary. Rows are derived from
// the final Gibbs assignment counts: (n_tw + beta) / (n_t + V * beta).
class TopicModel {
 public:
  using Counts = std::vector<std::vector<std::pair<TermId, std::uint32_t>>>;

  TopicModel() = default;

  TopicModel(std::shared_ptr<const Vocabulary> vocab, std::size_t k, double alpha, double beta, std::uint64_t seed,
             std::size_t iterations, Counts counts, std::set<TopicId> thematic = {})
      : vocab_(std::move(vocab)),
        k_(k),
        alpha_(alpha),
        beta_(beta),
        seed_(seed),
        iterations_(iterations),
        counts_(std::move(counts)) {
    if (!vocab_) throw Error("invalid_argument", "TopicModel: null vocabulary");
    if (counts_.size() != k_) throw Error("invalid_argument", "TopicModel: counts must have k rows");
    const std::size_t v = vocab_->size();
    topic_word_.assign(k_, std::vector<double>(v, 0.0));
    for (std::size_t t = 0; t < k_; ++t) {
      std::uint64_t total = 0;
      for (const auto& [w, c] : counts_[t]) {
        if (w >= v) throw Error("invalid_argument", "TopicModel: term id outside vocabulary");
        total += c;
      }
      const double denom = static_cast<double>(total) + static_cast<double>(v) * beta_;
      std::fill(topic_word_[t].begin(), topic_word_[t].end(), beta_ / denom);
      for (const auto& [w, c] : counts_[t]) topic_word_[t][w] = (static_cast<double>(c) + beta_) / denom;
    }
    set_thematic_ids(std::move(thematic));
  }

  std::size_t k() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t iterations() const { return iterations_; }
  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  const std::set<TopicId>& thematic_ids() const { return thematic_; }
  const Counts& counts() const { return counts_; }

  const std::vector<double>& topic_row(TopicId t) const { return topic_word_.at(t); }
  double topic_word(TopicId t, TermId w) const { return topic_word_.at(t).at(w); }

  void set_thematic_ids(std::set<TopicId> ids) {
    for (TopicId t : ids)
      if (t >= k_) throw Error("out_of_range", "thematic topic id " + std::to_string(t) + " >= k=" + std::to_string(k_));
    thematic_ = std::move(ids);
  }

  std::string hash() const {
    std::uint64_t h = util::fnv1a64(header().dump());
    for (const auto& row : counts_)
      for (const auto& [w, c] : row) h = util::fnv1a64(std::to_string(w) + ":" + std::to_string(c) + ";", h);
    return util::hex64(h);
  }

  // topics.model: a JSON header line, then one line per topic holding its
  // sparse assignment counts as "term_id:count" pairs.
  void save(const std::string& path) const {
    std::string buf = header().dump() + "\n";
    for (const auto& row : counts_) {
      bool first = true;
      for (const auto& [w, c] : row) {
        if (!first) buf.push_back(' ');
        first = false;
        buf += std::to_string(w) + ":" + std::to_string(c);
      }
      buf.push_back('\n');
    }
    util::write_file(path, buf);
  }

  static TopicModel load(const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
    using Json = nlohmann::json;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty model file");
    Json h = Json::parse(line, nullptr, false);
    if (h.is_discarded() || h.value("format", "") != "rfc-topic-model") throw ParseError(1, "not a topic model file");
    try {
      if (h.at("vocab_hash").get<std::string>() != vocab->hash())
        throw Error("vocab_mismatch", path + ": model was trained against a different vocabulary");
      const std::size_t k = h.at("k").get<std::size_t>();
      Counts counts(k);
      for (std::size_t t = 0; t < k; ++t) {
        if (!std::getline(in, line)) throw ParseError(t + 2, "missing topic row");
        for (auto pair : util::split(line, ' ')) {
          if (pair.empty()) continue;
          auto colon = pair.find(':');
          if (colon == std::string_view::npos) throw ParseError(t + 2, "bad count pair");
          std::uint32_t w = 0, c = 0;
          auto r1 = std::from_chars(pair.data(), pair.data() + colon, w);
          auto r2 = std::from_chars(pair.data() + colon + 1, pair.data() + pair.size(), c);
          if (r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != pair.data() + pair.size())
            throw ParseError(t + 2, "bad count pair");
          counts[t].emplace_back(w, c);
        }
      }
      std::set<TopicId> thematic;
      for (const auto& t : h.at("thematic_ids")) thematic.insert(t.get<TopicId>());
      return TopicModel(std::move(vocab), k, h.at("alpha").get<double>(), h.at("beta").get<double>(),
                        h.at("seed").get<std::uint64_t>(), h.at("iterations").get<std::size_t>(), std::move(counts),
                        std::move(thematic));
    } catch (const Json::exception& e) {
      throw ParseError(1, e.what());
    }
  }

 private:
  nlohmann::json header() const {
    nlohmann::json ids = nlohmann::json::array();
    for (TopicId t : thematic_) ids.push_back(t);
    return {{"format", "rfc-topic-model"}, {"version", 1},           {"k", k_},
            {"alpha", alpha_},             {"beta", beta_},          {"seed", seed_},
            {"iterations", iterations_},   {"vocab_hash", vocab_->hash()}, {"vocab_size", vocab_->size()},
            {"thematic_ids", ids}};
  }

  std::shared_ptr<const Vocabulary> vocab_;
  std::size_t k_ = 0;
  double alpha_ = 0;
  double beta_ = 0;
  std::uint64_t seed_ = 0;
  std::size_t iterations_ = 0;
  Counts counts_;
  std::vector<std::vector<double>> topic_word_;
  std::set<TopicId> thematic_;
};

struct LdaDiagnostics {
  std::size_t skipped_empty_docs = 0;
  std::size_t n_tokens = 0;
};

// Collapsed Gibbs sampling. Deterministic for a given (bows, params).
inline TopicModel train_lda(const std::vector<BagOfWords>& bows, std::shared_ptr<const Vocabulary> vocab,
                            const LdaParams& params, LdaDiagnostics* diagnostics = nullptr) {
  if (!vocab) throw Error("invalid_argument", "train_lda: null vocabulary");
  if (bows.empty()) throw Error("invalid_argument", "train_lda: no documents");
  if (params.k < 2) throw Error("invalid_argument", "train_lda: k must be >= 2");
  if (params.iterations < 1) throw Error("invalid_argument", "train_lda: iterations must be >= 1");
  if (params.k > vocab->size())
    throw Error("invalid_argument", "train_lda: k=" + std::to_string(params.k) + " exceeds vocabulary size " +
                                        std::to_string(vocab->size()));
  const std::size_t k = params.k;
  const std::size_t v = vocab->size();
  const double alpha = params.resolved_alpha();
  const double beta = params.beta;
  const double v_beta = static_cast<double>(v) * beta;

  LdaDiagnostics local;
  LdaDiagnostics& diag = diagnostics ? *diagnostics : local;

  // Token streams, expanded from counts in term-id order.
  std::vector<std::vector<TermId>> docs;
  for (const BagOfWords& bow : bows) {
    if (bow.empty()) {
      ++diag.skipped_empty_docs;
      continue;
    }
    std::vector<TermId> tokens;
    tokens.reserve(bow.total);
    for (const auto& [w, c] : bow.counts) {
      if (w >= v) throw Error("invalid_argument", "train_lda: term id outside vocabulary");
      tokens.insert(tokens.end(), c, w);
    }
    diag.n_tokens += tokens.size();
    docs.push_back(std::move(tokens));
  }
  if (docs.empty()) throw Error("invalid_argument", "train_lda: every document is empty");

  std::mt19937_64 rng(params.seed);
  std::vector<std::vector<std::uint32_t>> word_topic(v, std::vector<std::uint32_t>(k, 0));
  std::vector<std::uint64_t> topic_total(k, 0);
  std::vector<std::vector<std::uint32_t>> doc_topic(docs.size(), std::vector<std::uint32_t>(k, 0));
  std::vector<std::vector<TopicId>> z(docs.size());

  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      auto t = static_cast<TopicId>(rng() % k);
      z[d][i] = t;
      ++word_topic[docs[d][i]][t];
      ++topic_total[t];
      ++doc_topic[d][t];
    }
  }

  std::vector<double> cumulative(k);
  for (std::size_t iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      auto& nd = doc_topic[d];
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const TermId w = docs[d][i];
        TopicId t = z[d][i];
        auto& nw = word_topic[w];
        --nw[t];
        --topic_total[t];
        --nd[t];
        double acc = 0;
        for (std::size_t j = 0; j < k; ++j) {
          acc += (nd[j] + alpha) * (nw[j] + beta) / (static_cast<double>(topic_total[j]) + v_beta);
          cumulative[j] = acc;
        }
        t = static_cast<TopicId>(detail::sample_index(cumulative, detail::uniform01(rng)));
        z[d][i] = t;
        ++nw[t];
        ++topic_total[t];
        ++nd[t];
      }
    }
  }

  TopicModel::Counts counts(k);
  for (TermId w = 0; w < v; ++w)
    for (std::size_t t = 0; t < k; ++t)
      if (word_topic[w][t]) counts[t].emplace_back(w, word_topic[w][t]);
  return TopicModel(std::move(vocab), k, alpha, beta, params.seed, params.iterations, std::move(counts));
}

// Gibbs sampling of document-topic assignments with topic-word rows held
// fixed. The first half of the sweeps is burn-in; proportions are averaged
// over the rest, floor-pruned and renormalized.
inline TopicMixture infer_mixture(const BagOfWords& bow, const TopicModel& model, const InferParams& params,
                                  std::uint64_t seed) {
  const std::size_t k = model.k();
  TopicMixture out;
  std::vector<TermId> tokens;
  for (const auto& [w, c] : bow.counts)
    if (w < model.vocab().size()) tokens.insert(tokens.end(), c, w);
  if (tokens.empty()) {
    std::vector<SparseVector::Entry> uniform;
    for (std::size_t t = 0; t < k; ++t) uniform.emplace_back(static_cast<TopicId>(t), 1.0 / static_cast<double>(k));
    out.weights = SparseVector(std::move(uniform));
    out.degenerate = true;
    return out;
  }

  const double alpha = model.alpha();
  const std::size_t iterations = std::max<std::size_t>(params.iterations, 2);
  const std::size_t burn_in = iterations / 2;
  std::mt19937_64 rng(seed);
  std::vector<TopicId> z(tokens.size());
  std::vector<std::uint32_t> nd(k, 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    z[i] = static_cast<TopicId>(rng() % k);
    ++nd[z[i]];
  }
  std::vector<double> cumulative(k);
  std::vector<double> theta_sum(k, 0.0);
  const double norm = static_cast<double>(tokens.size()) + static_cast<double>(k) * alpha;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      --nd[z[i]];
      double acc = 0;
      for (std::size_t t = 0; t < k; ++t) {
        acc += (nd[t] + alpha) * model.topic_word(static_cast<TopicId>(t), tokens[i]);
        cumulative[t] = acc;
      }
      z[i] = static_cast<TopicId>(detail::sample_index(cumulative, detail::uniform01(rng)));
      ++nd[z[i]];
    }
    if (iter >= burn_in)
      for (std::size_t t = 0; t < k; ++t) theta_sum[t] += (nd[t] + alpha) / norm;
  }

  const double samples = static_cast<double>(iterations - burn_in);
  double kept_total = 0;
  std::vector<SparseVector::Entry> kept;
  for (std::size_t t = 0; t < k; ++t) {
    double p = theta_sum[t] / samples;
    if (p >= params.floor) {
      kept.emplace_back(static_cast<TopicId>(t), p);
      kept_total += p;
    }
  }
  if (kept.empty()) {
    // Every topic fell under the floor; keep the single largest.
    auto best = std::max_element(theta_sum.begin(), theta_sum.end());
    kept.emplace_back(static_cast<TopicId>(best - theta_sum.begin()), 1.0);
    kept_total = 1.0;
  }
  for (auto& [t, p] : kept) p /= kept_total;
  out.weights = SparseVector(std::move(kept));
  return out;
}

// Highest-probability terms of a topic, ties broken lexicographically.
inline std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, TopicId topic, std::size_t n) {
  if (topic >= model.k()) throw Error("out_of_range", "topic id " + std::to_string(topic) + " out of range");
  const auto& row = model.topic_row(topic);
  std::vector<TermId> order(row.size());
  for (TermId i = 0; i < order.size(); ++i) order[i] = i;
  n = std::min(n, order.size());
  // Term ids are assigned in lexicographic order, so id order is the tie-break.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](TermId a, TermId b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(model.vocab().term(order[i]), row[order[i]]);
  return out;
}

// Documents with the largest weight on `topic` (weight > 0 only), ties by id.
inline std::vector<std::string> top_documents(const std::map<std::string, TopicMixture>& mixtures, TopicId topic,
                                              std::size_t n) {
  std::vector<std::pair<double, const std::string*>> scored;
  for (const auto& [id, m] : mixtures) {
    double w = m.weight(topic);
    if (w > 0) scored.emplace_back(w, &id);
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : *a.second < *b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(*scored[i].second);
  return out;
}

inline TopicModel set_thematic(TopicModel model, std::set<TopicId> ids) {
  model.set_thematic_ids(std::move(ids));
  return model;
}

// Cosine between topic-space vectors, optionally projected onto `restrict`
// first. Zero-norm projections score 0.
inline double topic_cosine(const TopicMixture& a, const TopicMixture& b,
                           const std::set<TopicId>* restrict = nullptr) {
  if (!restrict) return cosine(a.weights, b.weights);
  auto project = [&](const SparseVector& v) {
    std::vector<SparseVector::Entry> kept;
    for (const auto& e : v.entries())
      if (restrict->count(e.first)) kept.push_back(e);
    return SparseVector(std::move(kept));
  };
  return cosine(project(a.weights), project(b.weights));
}

// ---------------------------------------------------------------------------
// K-means baseline (hard, single-cluster assignment)

struct KMeansParams {
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::size_t max_iters = 100;
  bool normalize = true;  // L2-normalize inputs first
};

// Lloyd iterations from a seeded k-means++ initialization. Returns one
// cluster id per input document.
inline std::map<std::string, std::size_t> kmeans_baseline(
    const std::vector<std::pair<std::string, SparseVector>>& docs, const KMeansParams& params) {
  if (docs.empty()) throw Error("invalid_argument", "kmeans_baseline: no documents");
  if (params.k == 0 || params.k > docs.size())
    throw Error("invalid_argument", "kmeans_baseline: k must be in [1, n_docs]");
  const std::size_t n = docs.size();
  const std::size_t k = params.k;
  std::size_t dim = 0;
  for (const auto& [id, v] : docs)
    if (!v.empty()) dim = std::max<std::size_t>(dim, v.entries().back().first + 1);

  std::vector<SparseVector> xs;
  std::vector<double> sq_norms;
  for (const auto& [id, v] : docs) {
    double nrm = v.norm();
    xs.push_back(params.normalize && nrm > 0 ? v.scaled(1.0 / nrm) : v);
    double s = xs.back().norm();
    sq_norms.push_back(s * s);
  }

  auto sq_dist = [&](std::size_t i, const std::vector<double>& c, double c_sq) {
    double d = sq_norms[i] + c_sq;
    for (const auto& [id, w] : xs[i].entries()) d -= 2.0 * w * c[id];
    return std::max(d, 0.0);
  };
  auto dense = [&](const SparseVector& v) {
    std::vector<double> c(dim, 0.0);
    for (const auto& [id, w] : v.entries()) c[id] = w;
    return c;
  };
  auto sq = [](const std::vector<double>& c) {
    double s = 0;
    for (double x : c) s += x * x;
    return s;
  };

  std::mt19937_64 rng(params.seed);
  std::vector<std::vector<double>> centroids;
  std::vector<double> centroid_sq;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng() % n);
  centroids.push_back(dense(xs[first]));
  centroid_sq.push_back(sq(centroids.back()));
  chosen[first] = true;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(i, centroids.back(), centroid_sq.back()));
      if (!chosen[i]) total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0) {
      double target = detail::uniform01(rng) * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) continue;
        acc += nearest[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!chosen[i]) pick = i;
    }
    chosen[pick] = true;
    centroids.push_back(dense(xs[pick]));
    centroid_sq.push_back(sq(centroids.back()));
  }

  std::vector<std::size_t> assign(n, k);
  for (std::size_t iter = 0; iter < std::max<std::size_t>(params.max_iters, 1); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d = sq_dist(i, centroids[c], centroid_sq[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assign[i]];
      for (const auto& [id, w] : xs[i].entries()) sums[assign[i]][id] += w;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its previous centroid
      for (double& x : sums[c]) x /= static_cast<double>(sizes[c]);
      centroids[c] = std::move(sums[c]);
      centroid_sq[c] = sq(centroids[c]);
    }
  }

  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) out[docs[i].first] = assign[i];
  return out;
}

}  // namespace rfc
