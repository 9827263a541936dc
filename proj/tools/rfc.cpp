// Command-line driver for the related-fact-checks pipeline.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfc/corpus.hpp"
#include "rfc/fetch.hpp"
#include "rfc/ranker.hpp"
#include "rfc/service.hpp"
#include "rfc/snapshot.hpp"
#include "rfc/topics.hpp"
#include "rfc/tuner_eval.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (auto part : rfc::util::split(s, ',')) {
    auto v = rfc::util::parse_double(rfc::util::trim(part));
    if (!v) throw rfc::Error("invalid_argument", std::string("bad number in ") + what + ": '" + std::string(part) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw rfc::Error("invalid_argument", std::string(what) + " is empty");
  return out;
}

// Pages to process: either a file with one URL per line (fetched), or a
// fixture directory with manifest.tsv lines "url<TAB>file".
struct Page {
  std::string url;
  std::string html;
};

std::vector<Page> collect_pages(const std::string& url_list, const std::string& fixture_dir, double rate_limit,
                                std::size_t* failures) {
  std::vector<Page> pages;
  if (!fixture_dir.empty()) {
    std::string manifest = rfc::util::read_file((fs::path(fixture_dir) / "manifest.tsv").string());
    for (auto line : rfc::util::split(manifest, '\n')) {
      line = rfc::util::trim(line);
      if (line.empty() || line[0] == '#') continue;
      auto fields = rfc::util::split(line, '\t');
      if (fields.size() != 2) throw rfc::Error("parse_error", "manifest.tsv: expected url<TAB>file");
      pages.push_back({std::string(fields[0]), rfc::util::read_file((fs::path(fixture_dir) / fields[1]).string())});
    }
    return pages;
  }
  if (url_list.empty()) throw rfc::Error("invalid_argument", "need --urls or --fixture-dir");
  std::vector<std::string> urls;
  for (auto line : rfc::util::split(rfc::util::read_file(url_list), '\n')) {
    line = rfc::util::trim(line);
    if (!line.empty() && line[0] != '#') urls.emplace_back(line);
  }
  rfc::fetch::FetchOptions opts;
  opts.rate_limit = rate_limit;
  for (auto& r : rfc::fetch::fetch_pages(urls, opts)) {
    if (!r.ok()) {
      std::cerr << "fetch failed: " << r.url << ": " << r.error << "\n";
      ++*failures;
      continue;
    }
    pages.push_back({r.url, std::move(*r.body)});
  }
  return pages;
}

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

rfc::FactCheckBodySource body_source_from(const std::string& s) {
  if (s == "page") return rfc::FactCheckBodySource::kPageText;
  if (s == "markup") return rfc::FactCheckBodySource::kMarkup;
  throw rfc::Error("invalid_argument", "--body-source must be page or markup");
}

// Labeled articles and their candidates against the snapshot's fact checks.
std::vector<rfc::ArticleCandidates> labeled_candidates(const rfc::Snapshot& snap, const std::string& articles_path) {
  std::vector<rfc::LabeledArticle> labeled;
  for (const auto& a : rfc::corpus::load_articles(articles_path)) labeled.push_back({a.id, {a.title, a.body_text}});
  return rfc::precompute_candidates(labeled, snap.collection);
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rfc: retrieve fact checks related to a news article"};
  app.require_subcommand(1);
  app.fallthrough();

  const char* env_dir = std::getenv("RFC_SNAPSHOT_DIR");
  std::string dir = env_dir ? env_dir : ".";
  std::string factchecks_path, articles_path, model_path, weights_path, labels_path;
  std::uint64_t seed = 1;
  app.add_option("--dir", dir, "snapshot directory (default: $RFC_SNAPSHOT_DIR or .)");
  app.add_option("--factchecks", factchecks_path, "fact-check corpus file");
  app.add_option("--articles", articles_path, "article corpus file");
  app.add_option("--model", model_path, "topic model file");
  app.add_option("--weights", weights_path, "weights file");
  app.add_option("--labels", labels_path, "relevance labels file");
  app.add_option("--seed", seed, "random seed");

  auto path_or = [&](const std::string& given, const char* name) {
    return given.empty() ? rfc::snapshot_path(dir, name) : given;
  };

  std::string url_list, fixture_dir;
  double rate_limit = 1.0;
  auto* ingest = app.add_subcommand("ingest", "extract fact checks from pages into factchecks.jsonl");
  auto* articles = app.add_subcommand("articles", "extract articles from pages into articles.jsonl");
  for (auto* sub : {ingest, articles}) {
    sub->add_option("--urls", url_list, "file with one URL per line");
    sub->add_option("--fixture-dir", fixture_dir, "directory with manifest.tsv and saved pages");
    sub->add_option("--rate-limit", rate_limit, "requests per second per host");
  }

  std::string body_source = "page";
  auto* index = app.add_subcommand("index", "build vocabulary and TF-IDF indexes");
  index->add_option("--body-source", body_source, "fact-check body text: page or markup");

  rfc::LdaParams lda;
  double alpha = 0;
  auto* train = app.add_subcommand("train-topics", "train the LDA topic model");
  train->add_option("--k", lda.k, "number of topics");
  train->add_option("--alpha", alpha, "document-topic prior (default 50/k)");
  train->add_option("--beta", lda.beta, "topic-word prior");
  train->add_option("--iterations", lda.iterations, "Gibbs sweeps");

  rfc::TopicId topic = 0;
  std::size_t top_n = 10;
  auto* inspect = app.add_subcommand("inspect-topic", "show top words and top fact checks of a topic");
  inspect->add_option("topic", topic, "topic id")->required();
  inspect->add_option("--n", top_n, "entries to show");

  std::vector<rfc::TopicId> thematic;
  auto* set_them = app.add_subcommand("set-thematic", "mark topics as thematic");
  set_them->add_option("ids", thematic, "topic ids")->expected(0, -1);

  rfc::RelatedOptions related_opts;
  std::string search_fixture;
  auto* related = app.add_subcommand("related-precompute", "precompute related articles per fact check");
  related->add_option("--n", related_opts.n, "articles per fact check");
  related->add_option("--search-fixture", search_fixture, "recorded search results (JSONL)");
  related->add_option("--body-source", body_source, "fact-check body text: page or markup");

  std::string grid_title = "0,0.5,1", grid_body = "0,0.5,1", grid_topics = "0,0.5,1", grid_thematic = "0,0.5,1",
              grid_t = "0,0.1,0.2,0.3";
  std::size_t k = 5;
  auto* tune = app.add_subcommand("tune", "grid-search weights against labels");
  tune->add_option("--grid-title", grid_title);
  tune->add_option("--grid-body", grid_body);
  tune->add_option("--grid-topics", grid_topics);
  tune->add_option("--grid-thematic", grid_thematic);
  tune->add_option("--grid-threshold", grid_t);
  tune->add_option("--k", k, "results per article");

  std::string thresholds, jsonl_out;
  auto* eval = app.add_subcommand("eval", "per-configuration precision and recall report");
  eval->add_option("--thresholds", thresholds, "tune each row's threshold over these values");
  eval->add_option("--jsonl", jsonl_out, "also write the report as JSONL");
  eval->add_option("--k", k, "results per article");

  rfc::RfcRequest request;
  std::string q_url, q_title, q_body;
  auto* query = app.add_subcommand("query", "one-shot retrieval for an article");
  query->add_option("--url", q_url);
  query->add_option("--title", q_title);
  query->add_option("--body", q_body);
  query->add_option("--k", request.max_results, "maximum fact checks");

  std::string listen = "127.0.0.1:8080";
  bool log_requests = false;
  auto* serve = app.add_subcommand("serve", "serve POST /v1/related and GET /v1/health");
  serve->add_option("--listen", listen, "host:port");
  serve->add_flag("--log-requests", log_requests, "log request summaries (never URLs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    if (code != 0) std::cerr << app.help();
    return code;
  }

  try {
    fs::create_directories(dir);
    if (ingest->parsed()) {
      std::size_t failures = 0;
      std::vector<rfc::FactCheck> out;
      rfc::ExtractionDiagnostics diag;
      for (const auto& page : collect_pages(url_list, fixture_dir, rate_limit, &failures)) {
        auto fcs = rfc::corpus::extract_claim_reviews(page.html, page.url, &diag);
        out.insert(out.end(), fcs.begin(), fcs.end());
      }
      out = rfc::corpus::dedupe(out);
      rfc::corpus::save_factchecks(out, path_or(factchecks_path, rfc::files::kFactChecks));
      auto stats = rfc::corpus::compute_stats(out, {});
      std::cout << "fact checks: " << stats.n_factchecks << "  sites: " << stats.n_sites
                << "  fetch failures: " << failures << "  json-ld failures: " << diag.jsonld_parse_failures
                << "  missing claim: " << diag.missing_claim << "\n";
    } else if (articles->parsed()) {
      std::size_t failures = 0;
      std::vector<rfc::Article> out;
      std::string stamp = now_utc();
      for (const auto& page : collect_pages(url_list, fixture_dir, rate_limit, &failures))
        out.push_back(rfc::corpus::extract_article(page.html, page.url, stamp));
      out = rfc::corpus::dedupe(out);
      rfc::corpus::save_articles(out, path_or(articles_path, rfc::files::kArticles));
      std::cout << "articles: " << out.size() << "  fetch failures: " << failures << "\n";
    } else if (index->parsed()) {
      rfc::build_index_stage(dir, body_source_from(body_source));
      auto vocab = rfc::load_vocabulary(rfc::snapshot_path(dir, rfc::files::kVocab));
      std::cout << "vocabulary: " << vocab.size() << " terms over " << vocab.n_docs() << " fact checks\n";
    } else if (train->parsed()) {
      lda.seed = seed;
      if (alpha > 0) lda.alpha = alpha;
      auto diag = rfc::train_topics_stage(dir, lda);
      std::cout << "trained k=" << lda.k << " on " << diag.n_tokens << " tokens, skipped " << diag.skipped_empty_docs
                << " empty documents\n";
    } else if (inspect->parsed()) {
      auto vocab = std::make_shared<const rfc::Vocabulary>(rfc::load_vocabulary(rfc::snapshot_path(dir, rfc::files::kVocab)));
      auto model = rfc::TopicModel::load(path_or(model_path, rfc::files::kTopicModel), vocab);
      std::cout << "topic " << topic << (model.thematic_ids().count(topic) ? " (thematic)" : "") << "\n";
      for (const auto& [term, p] : rfc::top_words(model, topic, top_n))
        std::cout << "  " << term << "\t" << rfc::util::format_double(p) << "\n";
      auto mixtures = rfc::load_mixtures(rfc::snapshot_path(dir, rfc::files::kMixtures));
      auto fcs = rfc::corpus::load_factchecks(path_or(factchecks_path, rfc::files::kFactChecks));
      std::map<std::string, const rfc::FactCheck*> by_id;
      for (const auto& fc : fcs) by_id[fc.id] = &fc;
      std::cout << "top fact checks:\n";
      for (const auto& id : rfc::top_documents(mixtures, topic, top_n)) {
        auto it = by_id.find(id);
        std::cout << "  " << id << "\t" << (it != by_id.end() ? it->second->claim_reviewed : "") << "\n";
      }
    } else if (set_them->parsed()) {
      rfc::set_thematic_stage(dir, {thematic.begin(), thematic.end()});
      std::cout << "thematic topics: " << thematic.size() << "\n";
    } else if (related->parsed()) {
      auto weights = rfc::load_weights(path_or(weights_path, rfc::files::kWeights));
      std::optional<rfc::FixtureSearchAdapter> adapter;
      if (!search_fixture.empty()) adapter = rfc::FixtureSearchAdapter::load(search_fixture);
      auto map = rfc::related_stage(dir, weights, related_opts, adapter ? &*adapter : nullptr,
                                    body_source_from(body_source));
      std::size_t total = 0;
      for (const auto& [id, list] : map.entries) total += list.size();
      std::cout << "related: " << total << " links for " << map.entries.size() << " fact checks\n";
    } else if (tune->parsed() || eval->parsed()) {
      if (labels_path.empty() || articles_path.empty())
        throw rfc::Error("invalid_argument", "--labels and --articles (the labeled articles) are required");
      auto snap = rfc::load_snapshot(dir, {}, !tune->parsed());
      auto cands = labeled_candidates(*snap, articles_path);
      rfc::LabelSet labels(rfc::load_labels(labels_path));
      if (tune->parsed()) {
        rfc::WeightGrid grid{parse_list(grid_title, "--grid-title"), parse_list(grid_body, "--grid-body"),
                             parse_list(grid_topics, "--grid-topics"), parse_list(grid_thematic, "--grid-thematic"),
                             parse_list(grid_t, "--grid-threshold")};
        auto best = rfc::tune_weights(cands, labels, grid, k);
        if (best.unlabeled_pairs)
          std::cerr << "warning: " << best.unlabeled_pairs << " retrieved pairs have no label; scored as irrelevant\n";
        rfc::save_weights(best.weights, path_or(weights_path, rfc::files::kWeights));
        std::cout << "evaluated " << best.evaluated << " settings, best cumulative score " << best.score << "\n"
                  << rfc::format_weights(best.weights);
      } else {
        auto weights = snap->weights;
        if (!weights_path.empty()) weights = rfc::load_weights(weights_path);
        std::vector<double> t(5, weights.t_l);
        auto configs = rfc::ablation_configurations(weights, t);
        if (!thresholds.empty()) {
          auto grid = parse_list(thresholds, "--thresholds");
          for (std::size_t i = 0; i < configs.size(); ++i)
            t[i] = rfc::tune_threshold(cands, labels, configs[i].mask.apply(configs[i].weights), grid, k);
          configs = rfc::ablation_configurations(weights, t);
        }
        auto report = rfc::evaluate(cands, labels, configs, k);
        std::cout << report.format_table();
        if (!jsonl_out.empty()) rfc::util::write_file(jsonl_out, report.format_jsonl());
      }
    } else if (query->parsed()) {
      if (!q_url.empty()) request.url = q_url;
      if (!q_title.empty()) request.title = q_title;
      if (!q_body.empty()) request.body = q_body;
      rfc::Service service;
      service.publish(rfc::load_snapshot(dir));
      auto out = service.related(request);
      out["diagnostics"]["elapsed_ms"] = 0;
      std::cout << out.dump(2) << "\n";
    } else if (serve->parsed()) {
      auto [host, port] = rfc::parse_listen(listen);
      rfc::ServiceOptions opts;
      opts.log_requests = log_requests;
      rfc::Service service(opts);
      service.publish(rfc::load_snapshot(dir));
      httplib::Server server;
      rfc::bind_routes(server, service);
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw rfc::Error("io_error", "cannot listen on " + listen);
    }
  } catch (const rfc::ServiceError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const rfc::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
