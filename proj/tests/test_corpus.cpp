#include <catch_amalgamated.hpp>

#include <fstream>

#include "rfc/corpus.hpp"
#include "support.hpp"

using namespace rfc;

namespace {

std::string claim_review_page(const std::string& ld) {
  return "<html><head><title>Page</title><script type=\"application/ld+json\">" + ld +
         "</script></head><body><p>Body text.</p></body></html>";
}

FactCheck make_fc(const std::string& url, const std::string& claim) {
  FactCheck fc;
  fc.url = url;
  fc.publisher = url::host(url);
  fc.title = "t";
  fc.claim_reviewed = claim;
  fc.id = corpus::factcheck_id(url, claim);
  return fc;
}

}  // namespace

TEST_CASE("extracts a JSON-LD ClaimReview") {
  std::string page = claim_review_page(R"({
    "@context": "https://schema.org", "@type": "ClaimReview",
    "url": "/fc/microchip",
    "claimReviewed": "Australia is the first country to begin microchipping its citizens.",
    "datePublished": "2017-09-12",
    "reviewRating": {"@type": "Rating", "ratingValue": "1", "alternateName": "Four Pinocchios"}})");
  auto fcs = corpus::extract_claim_reviews(page, "https://www.washingtonpost.com/news/x");
  REQUIRE(fcs.size() == 1);
  const auto& fc = fcs[0];
  CHECK(fc.claim_reviewed == "Australia is the first country to begin microchipping its citizens.");
  CHECK(fc.url == "https://www.washingtonpost.com/fc/microchip");
  CHECK(fc.publisher == "washingtonpost.com");
  CHECK(fc.title == "Page");
  REQUIRE(fc.review_date);
  CHECK(fc.review_date->to_string() == "2017-09-12");
  CHECK(fc.rating_label == std::optional<std::string>("Four Pinocchios"));
  CHECK(fc.rating_value == std::optional<std::int64_t>(1));
  CHECK(fc.body_text == std::optional<std::string>("Body text."));
  CHECK(fc.id == corpus::factcheck_id(fc.url, fc.claim_reviewed));
}

TEST_CASE("missing optional fields stay absent") {
  auto fcs = corpus::extract_claim_reviews(
      claim_review_page(R"({"@type":"ClaimReview","claimReviewed":"X happened."})"), "https://s.org/a");
  REQUIRE(fcs.size() == 1);
  CHECK_FALSE(fcs[0].review_date);
  CHECK_FALSE(fcs[0].rating_label);
  CHECK_FALSE(fcs[0].rating_value);
  CHECK(fcs[0].url == "https://s.org/a");
}

TEST_CASE("itemReviewed date is used when the review has none") {
  auto fcs = corpus::extract_claim_reviews(
      claim_review_page(
          R"({"@type":"ClaimReview","claimReviewed":"C","itemReviewed":{"@type":"Claim","datePublished":"2016-01-02"}})"),
      "https://s.org/a");
  REQUIRE(fcs.size() == 1);
  REQUIRE(fcs[0].review_date);
  CHECK(fcs[0].review_date->to_string() == "2016-01-02");
}

TEST_CASE("graph, arrays and multiple types are searched") {
  auto fcs = corpus::extract_claim_reviews(
      claim_review_page(R"({"@context":"https://schema.org","@graph":[
        {"@type":"WebPage"},
        {"@type":["ClaimReview","Review"],"claimReviewed":"One"},
        [{"@type":"ClaimReview","claimReviewed":"Two"}]]})"),
      "https://s.org/a");
  REQUIRE(fcs.size() == 2);
  CHECK(fcs[0].claim_reviewed == "One");
  CHECK(fcs[1].claim_reviewed == "Two");
}

TEST_CASE("no markup gives an empty list") {
  CHECK(corpus::extract_claim_reviews("<html><body><p>plain</p></body></html>", "https://s.org/").empty());
  CHECK(corpus::extract_claim_reviews("", "https://s.org/").empty());
}

TEST_CASE("two identical blocks give two raw records") {
  std::string block = R"(<script type="application/ld+json">{"@type":"ClaimReview","claimReviewed":"Same."}</script>)";
  auto fcs = corpus::extract_claim_reviews("<html>" + block + block + "</html>", "https://s.org/a");
  REQUIRE(fcs.size() == 2);
  CHECK(fcs[0] == fcs[1]);
  CHECK(corpus::dedupe(fcs).size() == 1);
}

TEST_CASE("broken JSON-LD is skipped and counted; missing claims are skipped") {
  ExtractionDiagnostics diag;
  std::string page = "<script type=\"application/ld+json\">{\"@type\": \"ClaimReview\", </script>"
                     "<script type=\"application/ld+json\">{\"@type\": \"ClaimReview\", \"claimReviewed\": \"  \"}</script>"
                     "<script type=\"application/ld+json\">{\"@type\": \"ClaimReview\", \"claimReviewed\": \"Ok\"}</script>";
  auto fcs = corpus::extract_claim_reviews(page, "https://s.org/a", &diag);
  REQUIRE(fcs.size() == 1);
  CHECK(fcs[0].claim_reviewed == "Ok");
  CHECK(diag.jsonld_parse_failures == 1);
  CHECK(diag.missing_claim == 1);
}

TEST_CASE("microdata ClaimReview is extracted") {
  std::string page = R"(<html><head><title>Sweden</title></head><body>
    <div itemscope itemtype="https://schema.org/ClaimReview">
      <link itemprop="url" href="/fc/sweden">
      <span itemprop="claimReviewed">There are &quot;no-go zones&quot; in Sweden where the police can't enter.</span>
      <meta itemprop="datePublished" content="2017-02-20">
      <div itemprop="reviewRating" itemscope itemtype="https://schema.org/Rating">
        <meta itemprop="ratingValue" content="2"><span itemprop="alternateName">Mostly False</span>
      </div>
    </div></body></html>)";
  auto fcs = corpus::extract_claim_reviews(page, "https://www.politifact.com/x/");
  REQUIRE(fcs.size() == 1);
  CHECK(fcs[0].claim_reviewed == "There are \"no-go zones\" in Sweden where the police can't enter.");
  CHECK(fcs[0].url == "https://www.politifact.com/fc/sweden");
  CHECK(fcs[0].rating_label == std::optional<std::string>("Mostly False"));
  CHECK(fcs[0].rating_value == std::optional<std::int64_t>(2));
  REQUIRE(fcs[0].review_date);
  CHECK(fcs[0].review_date->to_string() == "2017-02-20");
}

TEST_CASE("JSON-LD wins when both encodings are present") {
  std::string page = R"(<script type="application/ld+json">{"@type":"ClaimReview","claimReviewed":"From JSON-LD"}</script>
    <div itemscope itemtype="http://schema.org/ClaimReview"><span itemprop="claimReviewed">From microdata</span></div>)";
  auto fcs = corpus::extract_claim_reviews(page, "https://s.org/a");
  REQUIRE(fcs.size() == 1);
  CHECK(fcs[0].claim_reviewed == "From JSON-LD");
}

TEST_CASE("extraction never yields an empty claim") {
  std::vector<std::string> pages = {
      R"(<script type="application/ld+json">{"@type":"ClaimReview","claimReviewed":""}</script>)",
      R"(<script type="application/ld+json">{"@type":"ClaimReview","claimReviewed":null}</script>)",
      R"(<script type="application/ld+json">{"@type":"ClaimReview","claimReviewed":42}</script>)",
      R"(<div itemscope itemtype="https://schema.org/ClaimReview"><span itemprop="claimReviewed"> </span></div>)",
  };
  for (const auto& p : pages)
    for (const auto& fc : corpus::extract_claim_reviews(p, "https://s.org/a")) CHECK_FALSE(util::trim(fc.claim_reviewed).empty());
}

TEST_CASE("extract_article reads title, site and visible body") {
  Article a = corpus::extract_article(
      "<html><head><title> A  story </title></head><body><nav>menu</nav><p>Line one.</p><p>Line two.</p></body></html>",
      "https://www.news.example/s?id=1", "2024-01-01T00:00:00Z");
  CHECK(a.title == "A story");
  CHECK(a.site == "news.example");
  CHECK(a.body_text == "Line one.\nLine two.");
  CHECK(a.id == corpus::article_id("https://www.news.example/s?id=1"));
  CHECK(a.fetched_at == std::optional<std::string>("2024-01-01T00:00:00Z"));
}

TEST_CASE("dedupe keeps the first of each (url, claim) key") {
  FactCheck a = make_fc("https://s.org/fc/1", "Claim one.");
  FactCheck a_copy = a;
  FactCheck a_tracked = make_fc("https://S.org/fc/1?utm_source=tw#frag", "  claim   ONE. ");
  FactCheck b = make_fc("https://s.org/fc/1", "A different claim.");
  CHECK(corpus::dedupe(std::vector{a, a_copy}) == std::vector{a});
  CHECK(corpus::dedupe(std::vector{a, b}) == std::vector{a, b});
  CHECK(corpus::dedupe(std::vector{a, a_tracked, b}) == std::vector{a, b});
}

TEST_CASE("dedupe is idempotent and preserves unique inputs") {
  std::vector<FactCheck> many;
  for (int i = 0; i < 5350; ++i) many.push_back(make_fc("https://s" + std::to_string(i % 45) + ".org/fc/" + std::to_string(i), "claim " + std::to_string(i)));
  auto once = corpus::dedupe(many);
  CHECK(once.size() == 5350);
  many.insert(many.end(), many.begin(), many.begin() + 100);
  once = corpus::dedupe(many);
  CHECK(once.size() == 5350);
  CHECK(corpus::dedupe(once) == once);
  auto stats = corpus::compute_stats(once, {});
  CHECK(stats.n_factchecks == 5350);
  CHECK(stats.n_sites == 45);
  std::size_t sum = 0;
  for (const auto& [site, n] : stats.per_site_counts) sum += n;
  CHECK(sum == stats.n_factchecks);
}

TEST_CASE("article dedupe by normalized url") {
  Article a;
  a.url = "https://n.example/a?utm_campaign=x";
  a.id = corpus::article_id(a.url);
  a.title = "t";
  Article b = a;
  b.url = "https://n.example/a";
  b.id = corpus::article_id(b.url);
  CHECK(corpus::dedupe(std::vector{a, b}).size() == 1);
}

TEST_CASE("fact-check corpus round-trips field for field") {
  testing::TempDir dir;
  FactCheck full = make_fc("https://s.org/fc/1", "Claim with \"quotes\" and \xC3\xA9.");
  full.review_date = Date::parse("2017-09-01");
  full.rating_label = "False";
  full.rating_value = -3;
  full.body_text = "line1\nline2\ttab";
  FactCheck sparse = make_fc("https://s.org/fc/2", "Second.");
  FactCheck third = make_fc("https://t.org/fc/3", "Third.");
  third.body_text = "";
  std::vector<FactCheck> records{full, sparse, third};
  corpus::save_factchecks(records, dir.file("fc.jsonl"));
  CHECK(corpus::load_factchecks(dir.file("fc.jsonl")) == records);
}

TEST_CASE("article corpus round-trips") {
  testing::TempDir dir;
  Article a;
  a.url = "https://n.example/a";
  a.id = corpus::article_id(a.url);
  a.site = "n.example";
  a.title = "Title";
  a.body_text = "Body";
  a.fetched_at = "2024-05-06T07:08:09Z";
  Article b = a;
  b.url = "https://n.example/b";
  b.id = corpus::article_id(b.url);
  b.fetched_at.reset();
  corpus::save_articles({a, b}, dir.file("a.jsonl"));
  CHECK(corpus::load_articles(dir.file("a.jsonl")) == std::vector<Article>{a, b});
}

TEST_CASE("empty corpus file loads as empty list") {
  testing::TempDir dir;
  util::write_file(dir.file("empty.jsonl"), "");
  CHECK(corpus::load_factchecks(dir.file("empty.jsonl")).empty());
}

TEST_CASE("malformed lines: strict aborts with line number, lenient skips") {
  testing::TempDir dir;
  FactCheck ok = make_fc("https://s.org/fc/1", "Claim.");
  corpus::save_factchecks({ok}, dir.file("fc.jsonl"));
  std::string good = util::read_file(dir.file("fc.jsonl"));
  util::write_file(dir.file("fc.jsonl"), good + "{not json\n" + R"({"url":"relative/path","claim_reviewed":"x"})" + "\n" + good);
  try {
    corpus::load_factchecks(dir.file("fc.jsonl"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  corpus::LoadReport report;
  auto recs = corpus::load_factchecks(dir.file("fc.jsonl"), corpus::LoadMode::kLenient, &report);
  CHECK(recs.size() == 2);
  CHECK(report.loaded == 2);
  CHECK(report.skipped == 2);
  REQUIRE(report.errors.size() == 2);
  CHECK(report.errors[0].rfind("line 2:", 0) == 0);
  CHECK(report.errors[1].rfind("line 3:", 0) == 0);
}

TEST_CASE("unreadable corpus file is an io error") {
  CHECK_THROWS_AS(corpus::load_factchecks("/nonexistent/fc.jsonl"), Error);
}

TEST_CASE("fixture fact-check pages extract as expected") {
  std::ifstream manifest(testing::data_path("fixtures/factchecks/manifest.tsv"));
  std::string line;
  std::vector<FactCheck> all;
  ExtractionDiagnostics diag;
  while (std::getline(manifest, line)) {
    auto tab = line.find('\t');
    std::string html = util::read_file(testing::data_path("fixtures/factchecks/" + line.substr(tab + 1)));
    auto fcs = corpus::extract_claim_reviews(html, line.substr(0, tab), &diag);
    all.insert(all.end(), fcs.begin(), fcs.end());
  }
  CHECK(all.size() == 12);
  CHECK(diag.jsonld_parse_failures == 1);
  bool found = false;
  for (const auto& fc : all) {
    CHECK(fc.body_text);
    if (fc.claim_reviewed == "A damaged nuclear reactor at Fukushima Daiichi is about to fall into the ocean.") found = true;
    CHECK(fc.body_text->find("tracker") == std::string::npos);
    CHECK(fc.body_text->find("About") == std::string::npos);
  }
  CHECK(found);
}

TEST_CASE("date parsing") {
  CHECK(Date::parse("2017-09-01")->to_string() == "2017-09-01");
  CHECK(Date::parse("2017-09-01T10:00:00Z")->to_string() == "2017-09-01");
  CHECK_FALSE(Date::parse("2017-02-30"));
  CHECK_FALSE(Date::parse("yesterday"));
}
