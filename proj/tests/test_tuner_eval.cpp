#include <catch_amalgamated.hpp>

#include <limits>
#include <tuple>

#include "fixture_corpus.hpp"
#include "oracles.hpp"
#include "rfc/tuner_eval.hpp"
#include "support.hpp"

using namespace rfc;
using Catch::Matchers::WithinAbs;

namespace {

constexpr auto C = RelevanceLabel::kOnClaim;
constexpr auto T = RelevanceLabel::kOnTheme;
constexpr auto I = RelevanceLabel::kIrrelevant;

struct LabeledFixture {
  std::vector<FactCheck> factchecks;
  std::vector<LabeledArticle> articles;
  std::vector<LabeledJudgment> judgments;
  ScoringCollection collection;
};

const LabeledFixture& labeled_fixture() {
  static const LabeledFixture f = [] {
    LabeledFixture lf;
    lf.factchecks = testing::fixture_factchecks();
    for (const auto& a : testing::fixture_articles()) lf.articles.push_back({a.id, {a.title, a.body_text}});
    auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(factcheck_token_docs(lf.factchecks)));
    std::vector<BagOfWords> bows;
    for (const auto& fc : lf.factchecks) bows.push_back(to_bow(factcheck_topic_text(fc), *vocab));
    auto model = std::make_shared<const TopicModel>(
        set_thematic(train_lda(bows, vocab, testing::fixture_lda_params()), {1}));
    lf.collection = build_factcheck_collection(lf.factchecks, vocab, model);
    lf.judgments = load_labels(testing::data_path("fixtures/labels.jsonl"));
    return lf;
  }();
  return f;
}

}  // namespace

TEST_CASE("label values") {
  CHECK(numeric(C) == 2);
  CHECK(numeric(T) == 1);
  CHECK(numeric(I) == -2);
  for (auto l : {C, T, I}) CHECK(label_from_string(to_string(l)) == l);
  CHECK_FALSE(label_from_string("OnClaim").has_value());
}

TEST_CASE("cumulative score examples") {
  CHECK(cumulative_score(std::vector<RelevanceLabel>{C, T}) == 3);
  CHECK(cumulative_score(std::vector<RelevanceLabel>{}) == 0);
  CHECK(cumulative_score(std::vector<RelevanceLabel>{I, I, I}) == -6);
  std::vector<LabeledJudgment> js = {{"a", "f1", C, std::nullopt}, {"a", "f2", T, std::nullopt}};
  CHECK(cumulative_score(js) == 3);
}

TEST_CASE("cumulative score is additive") {
  std::mt19937_64 rng(4);
  const RelevanceLabel all[] = {C, T, I};
  for (int i = 0; i < 200; ++i) {
    std::vector<RelevanceLabel> a, b;
    for (std::size_t n = rng() % 8; n > 0; --n) a.push_back(all[rng() % 3]);
    for (std::size_t n = rng() % 8; n > 0; --n) b.push_back(all[rng() % 3]);
    std::vector<RelevanceLabel> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(cumulative_score(ab) == cumulative_score(a) + cumulative_score(b));
  }
}

TEST_CASE("labels file round-trips") {
  testing::TempDir dir;
  std::vector<LabeledJudgment> js = {{"a1", "f1", C, std::string("ann")}, {"a1", "f2", T, std::nullopt},
                                     {"a2", "f1", I, std::nullopt}};
  save_labels(js, dir.file("labels.jsonl"));
  CHECK(load_labels(dir.file("labels.jsonl")) == js);
}

TEST_CASE("duplicate labels name both lines") {
  testing::TempDir dir;
  util::write_file(dir.file("l.jsonl"),
                   "{\"article_id\":\"a\",\"factcheck_id\":\"f\",\"label\":\"on_claim\"}\n"
                   "{\"article_id\":\"a\",\"factcheck_id\":\"g\",\"label\":\"on_theme\"}\n"
                   "\n"
                   "{\"article_id\":\"a\",\"factcheck_id\":\"f\",\"label\":\"irrelevant\"}\n");
  try {
    load_labels(dir.file("l.jsonl"));
    FAIL("expected duplicate error");
  } catch (const Error& e) {
    CHECK(e.code() == "duplicate_label");
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("lines 1 and 4"));
  }
}

TEST_CASE("unknown or malformed labels are rejected") {
  testing::TempDir dir;
  util::write_file(dir.file("l.jsonl"),
                   "{\"article_id\":\"a\",\"factcheck_id\":\"f\",\"label\":\"on_claim\"}\n"
                   "{\"article_id\":\"a\",\"factcheck_id\":\"g\",\"label\":\"maybe\"}\n");
  try {
    load_labels(dir.file("l.jsonl"));
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  util::write_file(dir.file("m.jsonl"), "{\"article_id\":\"a\"}\n");
  CHECK_THROWS_AS(load_labels(dir.file("m.jsonl")), ParseError);
  CHECK_THROWS_AS(load_labels(dir.file("missing.jsonl")), Error);
}

TEST_CASE("unlabeled pairs count as irrelevant") {
  LabelSet labels({{"a", "f", C, std::nullopt}});
  std::size_t unlabeled = 0;
  CHECK(labels.resolve("a", "f", &unlabeled) == C);
  CHECK(labels.resolve("a", "g", &unlabeled) == I);
  CHECK(unlabeled == 1);
  CHECK(labels.has_on_claim("a"));
  CHECK_FALSE(labels.has_on_claim("b"));
}

TEST_CASE("fixture labels cover every pair") {
  const auto& f = labeled_fixture();
  CHECK(f.articles.size() == 10);
  LabelSet labels(f.judgments);
  CHECK(labels.size() == f.articles.size() * f.factchecks.size());
  for (const auto& a : f.articles)
    for (const auto& fc : f.factchecks) CHECK(labels.find(a.id, fc.id).has_value());
}

TEST_CASE("single-point grid returns that point") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  WeightGrid g;
  g.w_title = {0.7};
  g.w_body = {0.2};
  g.w_topics = {0.1};
  g.w_thematic = {0.3};
  g.t_l = {0.25};
  TuneResult r = tune_weights(cands, labels, g);
  CHECK(r.weights == Weights{0.7, 0.2, 0.1, 0.3, 0.25});
  CHECK(r.evaluated == 1);
  CHECK(r.score == total_cumulative_score(cands, labels, r.weights, 5));
}

TEST_CASE("tuner errors") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  CHECK_THROWS_AS(tune_weights({}, labels, WeightGrid{}), Error);
  WeightGrid empty;
  empty.w_body = {};
  CHECK_THROWS_AS(tune_weights(cands, labels, empty), Error);
}

TEST_CASE("precomputed candidates rank like retrieve") {
  const auto& f = labeled_fixture();
  auto cands = precompute_candidates(f.articles, f.collection);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Weights w{u(rng), u(rng), u(rng), u(rng), u(rng) * 0.4};
    for (std::size_t i = 0; i < f.articles.size(); ++i) {
      auto a = retrieve(f.articles[i].doc, f.collection, w, 5);
      auto b = retrieve_precomputed(cands[i], w, 5);
      REQUIRE(a.size() == b.size());
      for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK(a[j].factcheck_id == b[j].factcheck_id);
        CHECK(a[j].total == b[j].total);
      }
    }
  }
}

TEST_CASE("grid search equals exhaustive enumeration") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  std::vector<double> axis = {1.0, 0.0, 0.5};  // deliberately unsorted
  std::vector<double> thresholds = {0.0, 0.1, 0.3};
  WeightGrid g{axis, axis, axis, axis, thresholds};
  TuneResult r = tune_weights(cands, labels, g);
  auto [w, score] = testing::oracle_tune(f.articles, f.collection, f.judgments, {0.0, 0.5, 1.0}, thresholds);
  CHECK(r.evaluated == 243);
  CHECK(r.weights == w);
  CHECK(r.score == score);
  CHECK(r.unlabeled_pairs == 0);
}

TEST_CASE("title-only signal drives w_title to its maximum") {
  // Fact check i's claim shares words only with article i's title; its body
  // shares words with article i+1's body, so body matching always picks the
  // wrong fact check.
  const std::size_t n = 5;
  auto claim_word = [](std::size_t i) { return testing::synthetic_word(10 + i); };
  auto body_word = [&](std::size_t i) { return testing::synthetic_word(30 + i % n); };
  std::vector<FactCheck> fcs;
  std::vector<LabeledArticle> arts;
  std::vector<LabeledJudgment> js;
  for (std::size_t i = 0; i < n; ++i) {
    FactCheck fc;
    fc.id = "fc" + std::to_string(i);
    fc.url = "https://fc.example/" + std::to_string(i);
    fc.claim_reviewed = claim_word(i) + " " + claim_word(i);
    fc.body_text = body_word(i + 1) + " " + body_word(i + 1);
    fcs.push_back(fc);
    arts.push_back({"a" + std::to_string(i), {claim_word(i), body_word(i)}});
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) js.push_back({arts[i].id, fcs[j].id, i == j ? C : I, std::nullopt});
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(factcheck_token_docs(fcs)));
  auto collection = build_factcheck_collection(fcs, vocab, nullptr);
  auto cands = precompute_candidates(arts, collection);
  WeightGrid g{{0, 0.5, 1}, {0, 0.5, 1}, {0, 0.5, 1}, {0, 0.5, 1}, {0.6}};
  TuneResult r = tune_weights(cands, LabelSet(js), g);
  CHECK(r.weights.w_title == 1.0);
  CHECK(r.score == static_cast<long>(2 * n));
}

TEST_CASE("evaluation with nothing returned") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  EvalConfiguration cfg{"none", {}, {1, 1, 1, 1, std::numeric_limits<double>::infinity()}};
  auto r = evaluate_configuration(cands, labels, cfg);
  CHECK(r.returned == 0);
  CHECK(r.on_claim.precision == 0);
  CHECK(r.on_theme.precision == 0);
  CHECK(r.irrelevant.precision == 0);
  CHECK(r.on_claim.count + r.on_theme.count + r.irrelevant.count == 0);
  CHECK(r.on_claim_recall == 0);
  CHECK(r.recall_eligible > 0);
}

TEST_CASE("evaluation where every result is on claim") {
  const auto& f = labeled_fixture();
  std::vector<LabeledJudgment> all_claim;
  for (const auto& a : f.articles)
    for (const auto& fc : f.factchecks) all_claim.push_back({a.id, fc.id, C, std::nullopt});
  auto cands = precompute_candidates(f.articles, f.collection);
  auto r = evaluate_configuration(cands, LabelSet(all_claim), {"all", {}, {1, 1, 1, 1, 0}});
  CHECK(r.returned == 5 * f.articles.size());
  CHECK(r.on_claim.precision == 1.0);
  CHECK(r.on_claim_recall == 1.0);
}

TEST_CASE("ablation report on the fixture labels") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  auto configs = ablation_configurations(Weights{1, 0.5, 0.5, 0.5, 0}, {0.1, 0.1, 0.5, 0.5, 0.3});
  REQUIRE(configs.size() == 5);
  CHECK(configs[0].name == "Title / Claim review");
  CHECK(configs[4].name == "All features");
  CHECK(configs[1].mask.apply(Weights{1, 1, 1, 1, 0}) == Weights{0, 1, 0, 0, 0});
  CHECK_THROWS_AS(ablation_configurations(Weights{}, {0.1}), Error);
  EvalReport report = evaluate(cands, labels, configs);
  REQUIRE(report.rows.size() == 5);
  for (const auto& row : report.rows) {
    CHECK(row.on_claim.count + row.on_theme.count + row.irrelevant.count == row.returned);
    if (row.returned > 0)
      CHECK_THAT(row.on_claim.precision + row.on_theme.precision + row.irrelevant.precision, WithinAbs(1.0, 1e-9));
    CHECK(row.recall_hits <= row.recall_eligible);
    CHECK(row.recall_eligible == 9);  // one fixture article has no on-claim fact check
    CHECK(row.unlabeled_pairs == 0);
  }
  std::string table = report.format_table();
  for (const auto& c : configs) CHECK_THAT(table, Catch::Matchers::ContainsSubstring(c.name));
  CHECK_THAT(table, Catch::Matchers::ContainsSubstring("On Claim Recall"));
  std::string jsonl = report.format_jsonl();
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 5);
  auto first = Json::parse(jsonl.substr(0, jsonl.find('\n')));
  CHECK(first.at("configuration") == "Title / Claim review");
  CHECK(first.at("on_claim").at("count").get<std::size_t>() == report.rows[0].on_claim.count);
}

TEST_CASE("threshold tuning only moves t_l") {
  const auto& f = labeled_fixture();
  LabelSet labels(f.judgments);
  auto cands = precompute_candidates(f.articles, f.collection);
  Weights w{1, 0, 0, 0, 0};
  std::vector<double> cands_tl = {0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
  double t = tune_threshold(cands, labels, w, cands_tl);
  CHECK(std::find(cands_tl.begin(), cands_tl.end(), t) != cands_tl.end());
  long best = total_cumulative_score(cands, labels, Weights{1, 0, 0, 0, t}, 5);
  for (double x : cands_tl) CHECK(total_cumulative_score(cands, labels, Weights{1, 0, 0, 0, x}, 5) <= best);
}
