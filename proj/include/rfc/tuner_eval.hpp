#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfc/ranker.hpp"
#include "rfc/util.hpp"

namespace rfc {

enum class RelevanceLabel { kOnClaim, kOnTheme, kIrrelevant };

inline constexpr int numeric(RelevanceLabel l) {
  switch (l) {
    case RelevanceLabel::kOnClaim: return 2;
    case RelevanceLabel::kOnTheme: return 1;
    case RelevanceLabel::kIrrelevant: return -2;
  }
  return -2;
}

inline std::string_view to_string(RelevanceLabel l) {
  switch (l) {
    case RelevanceLabel::kOnClaim: return "on_claim";
    case RelevanceLabel::kOnTheme: return "on_theme";
    case RelevanceLabel::kIrrelevant: return "irrelevant";
  }
  return "irrelevant";
}

inline std::optional<RelevanceLabel> label_from_string(std::string_view s) {
  if (s == "on_claim") return RelevanceLabel::kOnClaim;
  if (s == "on_theme") return RelevanceLabel::kOnTheme;
  if (s == "irrelevant") return RelevanceLabel::kIrrelevant;
  return std::nullopt;
}

struct LabeledJudgment {
  std::string article_id;
  std::string factcheck_id;
  RelevanceLabel label = RelevanceLabel::kIrrelevant;
  std::optional<std::string> annotator;

  friend bool operator==(const LabeledJudgment&, const LabeledJudgment&) = default;
};

inline long cumulative_score(const std::vector<RelevanceLabel>& labels) {
  long s = 0;
  for (RelevanceLabel l : labels) s += numeric(l);
  return s;
}

inline long cumulative_score(const std::vector<LabeledJudgment>& results) {
  long s = 0;
  for (const auto& j : results) s += numeric(j.label);
  return s;
}

// Labels file: JSONL {"article_id", "factcheck_id", "label", "annotator"?}.
inline std::vector<LabeledJudgment> load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path);
  std::vector<LabeledJudgment> out;
  std::map<std::pair<std::string, std::string>, std::size_t> first_line;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    LabeledJudgment j;
    try {
      Json rec = Json::parse(line);
      j.article_id = rec.at("article_id").get<std::string>();
      j.factcheck_id = rec.at("factcheck_id").get<std::string>();
      std::string label = rec.at("label").get<std::string>();
      auto parsed = label_from_string(label);
      if (!parsed) throw Error("schema", "unknown label '" + label + "'");
      j.label = *parsed;
      if (auto it = rec.find("annotator"); it != rec.end() && !it->is_null()) j.annotator = it->get<std::string>();
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
    auto [it, inserted] = first_line.emplace(std::make_pair(j.article_id, j.factcheck_id), lineno);
    if (!inserted)
      throw Error("duplicate_label", path + ": duplicate (" + j.article_id + ", " + j.factcheck_id + ") on lines " +
                                         std::to_string(it->second) + " and " + std::to_string(lineno));
    out.push_back(std::move(j));
  }
  return out;
}

inline void save_labels(const std::vector<LabeledJudgment>& labels, const std::string& path) {
  std::string buf;
  for (const auto& j : labels) {
    Json rec = {{"article_id", j.article_id}, {"factcheck_id", j.factcheck_id}, {"label", std::string(to_string(j.label))}};
    if (j.annotator) rec["annotator"] = *j.annotator;
    buf += rec.dump() + "\n";
  }
  util::write_file(path, buf);
}

// Lookup over judgments; pairs without a judgment count as Irrelevant and are
// tallied so callers can warn.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(const std::vector<LabeledJudgment>& judgments) {
    for (const auto& j : judgments) {
      if (!labels_.emplace(std::make_pair(j.article_id, j.factcheck_id), j.label).second)
        throw Error("duplicate_label", "duplicate judgment for (" + j.article_id + ", " + j.factcheck_id + ")");
      if (j.label == RelevanceLabel::kOnClaim) with_on_claim_.insert(j.article_id);
    }
  }

  std::optional<RelevanceLabel> find(const std::string& article, const std::string& factcheck) const {
    auto it = labels_.find({article, factcheck});
    if (it == labels_.end()) return std::nullopt;
    return it->second;
  }

  RelevanceLabel resolve(const std::string& article, const std::string& factcheck, std::size_t* unlabeled) const {
    auto l = find(article, factcheck);
    if (!l) {
      if (unlabeled) ++*unlabeled;
      return RelevanceLabel::kIrrelevant;
    }
    return *l;
  }

  bool has_on_claim(const std::string& article) const { return with_on_claim_.count(article) > 0; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, RelevanceLabel> labels_;
  std::set<std::string> with_on_claim_;
};

// Per-article component scores against every fact check, computed once so
// that many weight settings can be ranked cheaply.
struct ArticleCandidates {
  std::string article_id;
  std::vector<std::pair<std::string, ComponentScores>> candidates;  // (factcheck id, scores)
};

struct LabeledArticle {
  std::string id;
  QueryDocument doc;
};

inline std::vector<ArticleCandidates> precompute_candidates(const std::vector<LabeledArticle>& articles,
                                                            const ScoringCollection& factchecks) {
  std::vector<ArticleCandidates> out;
  out.reserve(articles.size());
  for (const auto& a : articles) {
    ArticleCandidates c;
    c.article_id = a.id;
    Features f = factchecks.query_features(a.doc);
    c.candidates.reserve(factchecks.size());
    for (std::size_t i = 0; i < factchecks.size(); ++i)
      c.candidates.emplace_back(factchecks.ids()[i], component_scores(f, factchecks.features(i), factchecks.thematic_ids()));
    out.push_back(std::move(c));
  }
  return out;
}

// Same ordering and cutoff rules as retrieve().
inline std::vector<ScoredResult> retrieve_precomputed(const ArticleCandidates& article, const Weights& weights,
                                                      std::size_t k = 5) {
  std::vector<ScoredResult> scored;
  scored.reserve(article.candidates.size());
  for (const auto& [id, s] : article.candidates) {
    ScoredResult r;
    r.factcheck_id = id;
    r.s_title = s.title;
    r.s_body = s.body;
    r.s_topics = s.topics;
    r.s_thematic = s.thematic;
    r.total = combine(s, weights);
    scored.push_back(std::move(r));
  }
  return rank_results(std::move(scored), weights.t_l, k);
}

struct WeightGrid {
  std::vector<double> w_title{0.0};
  std::vector<double> w_body{0.0};
  std::vector<double> w_topics{0.0};
  std::vector<double> w_thematic{0.0};
  std::vector<double> t_l{0.0};

  std::size_t size() const {
    return w_title.size() * w_body.size() * w_topics.size() * w_thematic.size() * t_l.size();
  }
};

// Sum of label scores over the top-k results of every article.
inline long total_cumulative_score(const std::vector<ArticleCandidates>& articles, const LabelSet& labels,
                                   const Weights& weights, std::size_t k, std::size_t* unlabeled = nullptr) {
  long score = 0;
  for (const auto& a : articles)
    for (const auto& r : retrieve_precomputed(a, weights, k)) score += numeric(labels.resolve(a.article_id, r.factcheck_id, unlabeled));
  return score;
}

struct TuneResult {
  Weights weights;
  long score = 0;
  std::size_t evaluated = 0;
  std::size_t unlabeled_pairs = 0;  // retrieved pairs scored as Irrelevant for lack of a label
};

// Exhaustive grid search maximizing the cumulative score. Ties go to the
// lexicographically smallest (w_title, w_body, w_topics, w_thematic, t_l).
inline TuneResult tune_weights(const std::vector<ArticleCandidates>& articles, const LabelSet& labels,
                               WeightGrid grid, std::size_t k = 5) {
  if (articles.empty()) throw Error("invalid_argument", "tune_weights: empty labeled set");
  if (grid.size() == 0) throw Error("invalid_argument", "tune_weights: empty grid");
  for (auto* axis : {&grid.w_title, &grid.w_body, &grid.w_topics, &grid.w_thematic, &grid.t_l}) {
    std::sort(axis->begin(), axis->end());
    axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
  }
  TuneResult best;
  bool have = false;
  for (double wt : grid.w_title)
    for (double wb : grid.w_body)
      for (double wp : grid.w_topics)
        for (double wh : grid.w_thematic)
          for (double tl : grid.t_l) {
            Weights w{wt, wb, wp, wh, tl};
            w.validate();
            std::size_t unlabeled = 0;
            long s = total_cumulative_score(articles, labels, w, k, &unlabeled);
            ++best.evaluated;
            if (!have || s > best.score) {
              best.weights = w;
              best.score = s;
              best.unlabeled_pairs = unlabeled;
              have = true;
            }
          }
  return best;
}

// ---------------------------------------------------------------------------
// Evaluation report

struct FeatureMask {
  bool title = true;
  bool body = true;
  bool topics = true;
  bool thematic = true;

  Weights apply(Weights w) const {
    if (!title) w.w_title = 0;
    if (!body) w.w_body = 0;
    if (!topics) w.w_topics = 0;
    if (!thematic) w.w_thematic = 0;
    return w;
  }
};

struct EvalConfiguration {
  std::string name;
  FeatureMask mask;
  Weights weights;  // t_l is this configuration's own threshold
};

struct CategoryStat {
  double precision = 0;
  std::size_t count = 0;
};

struct ConfigurationResult {
  std::string name;
  CategoryStat on_claim;
  CategoryStat on_theme;
  CategoryStat irrelevant;
  std::size_t returned = 0;
  double on_claim_recall = 0;
  std::size_t recall_hits = 0;
  std::size_t recall_eligible = 0;  // articles with at least one OnClaim label
  std::size_t unlabeled_pairs = 0;
};

struct EvalReport {
  std::vector<ConfigurationResult> rows;

  // Aligned table: precision (count) per category, then on-claim recall.
  std::string format_table() const {
    std::size_t name_w = 8;
    for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
    auto cell = [](const CategoryStat& c) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.2f (%zu)", c.precision, c.count);
      return std::string(buf);
    };
    auto pad = [](std::string s, std::size_t w) {
      if (s.size() < w) s.append(w - s.size(), ' ');
      return s;
    };
    std::string out = pad("Features", name_w) + " | " + pad("On Claim", 14) + " | " + pad("On Theme", 14) + " | " +
                      pad("Irrelevant", 14) + " | On Claim Recall\n";
    out += std::string(name_w, '-') + "-+-" + std::string(14, '-') + "-+-" + std::string(14, '-') + "-+-" +
           std::string(14, '-') + "-+-" + std::string(15, '-') + "\n";
    for (const auto& r : rows) {
      char recall[16];
      std::snprintf(recall, sizeof recall, "%.2f", r.on_claim_recall);
      out += pad(r.name, name_w) + " | " + pad(cell(r.on_claim), 14) + " | " + pad(cell(r.on_theme), 14) + " | " +
             pad(cell(r.irrelevant), 14) + " | " + recall + "\n";
    }
    return out;
  }

  // One JSON record per configuration.
  std::string format_jsonl() const {
    std::string out;
    for (const auto& r : rows) {
      auto stat = [](const CategoryStat& c) { return Json{{"precision", c.precision}, {"count", c.count}}; };
      Json rec = {{"configuration", r.name},
                  {"on_claim", stat(r.on_claim)},
                  {"on_theme", stat(r.on_theme)},
                  {"irrelevant", stat(r.irrelevant)},
                  {"returned", r.returned},
                  {"on_claim_recall", r.on_claim_recall},
                  {"recall_hits", r.recall_hits},
                  {"recall_eligible", r.recall_eligible},
                  {"unlabeled_pairs", r.unlabeled_pairs}};
      out += rec.dump() + "\n";
    }
    return out;
  }
};

inline ConfigurationResult evaluate_configuration(const std::vector<ArticleCandidates>& articles,
                                                  const LabelSet& labels, const EvalConfiguration& config,
                                                  std::size_t k = 5) {
  ConfigurationResult r;
  r.name = config.name;
  const Weights w = config.mask.apply(config.weights);
  for (const auto& a : articles) {
    bool hit = false;
    for (const auto& res : retrieve_precomputed(a, w, k)) {
      RelevanceLabel l = labels.resolve(a.article_id, res.factcheck_id, &r.unlabeled_pairs);
      ++r.returned;
      switch (l) {
        case RelevanceLabel::kOnClaim:
          ++r.on_claim.count;
          hit = true;
          break;
        case RelevanceLabel::kOnTheme: ++r.on_theme.count; break;
        case RelevanceLabel::kIrrelevant: ++r.irrelevant.count; break;
      }
    }
    if (labels.has_on_claim(a.article_id)) {
      ++r.recall_eligible;
      if (hit) ++r.recall_hits;
    }
  }
  if (r.returned > 0) {
    const double n = static_cast<double>(r.returned);
    r.on_claim.precision = static_cast<double>(r.on_claim.count) / n;
    r.on_theme.precision = static_cast<double>(r.on_theme.count) / n;
    r.irrelevant.precision = static_cast<double>(r.irrelevant.count) / n;
  }
  if (r.recall_eligible > 0)
    r.on_claim_recall = static_cast<double>(r.recall_hits) / static_cast<double>(r.recall_eligible);
  return r;
}

inline EvalReport evaluate(const std::vector<ArticleCandidates>& articles, const LabelSet& labels,
                           const std::vector<EvalConfiguration>& configurations, std::size_t k = 5) {
  EvalReport report;
  for (const auto& c : configurations) report.rows.push_back(evaluate_configuration(articles, labels, c, k));
  return report;
}

// The five ablation rows: each single channel at weight 1, then all channels
// with the supplied weights. `thresholds` holds each row's t_l in that order.
inline std::vector<EvalConfiguration> ablation_configurations(const Weights& all_features,
                                                              const std::vector<double>& thresholds) {
  if (thresholds.size() != 5) throw Error("invalid_argument", "ablation_configurations: need 5 thresholds");
  std::vector<EvalConfiguration> out;
  out.push_back({"Title / Claim review", {true, false, false, false}, {1, 0, 0, 0, thresholds[0]}});
  out.push_back({"Page Content", {false, true, false, false}, {0, 1, 0, 0, thresholds[1]}});
  out.push_back({"Topics", {false, false, true, false}, {0, 0, 1, 0, thresholds[2]}});
  out.push_back({"Thematic topics", {false, false, false, true}, {0, 0, 0, 1, thresholds[3]}});
  Weights all = all_features;
  all.t_l = thresholds[4];
  out.push_back({"All features", {}, all});
  return out;
}

// Tunes only the threshold of a fixed weight vector.
inline double tune_threshold(const std::vector<ArticleCandidates>& articles, const LabelSet& labels,
                             const Weights& weights, const std::vector<double>& candidates, std::size_t k = 5) {
  WeightGrid g;
  g.w_title = {weights.w_title};
  g.w_body = {weights.w_body};
  g.w_topics = {weights.w_topics};
  g.w_thematic = {weights.w_thematic};
  g.t_l = candidates;
  return tune_weights(articles, labels, g, k).weights.t_l;
}

}  // namespace rfc
