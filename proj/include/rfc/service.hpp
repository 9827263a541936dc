#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rfc/corpus.hpp"
#include "rfc/fetch.hpp"
#include "rfc/ranker.hpp"
#include "rfc/snapshot.hpp"
#include "rfc/url.hpp"
#include "rfc/util.hpp"

namespace rfc {

using OrderedJson = nlohmann::ordered_json;

// A request failure with the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : Error(std::move(code), message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct RfcRequest {
  std::optional<std::string> url;
  std::optional<std::string> title;
  std::optional<std::string> body;
  std::size_t max_results = 5;
};

inline constexpr std::size_t kMaxResultsLimit = 100;

inline RfcRequest parse_request(std::string_view body) {
  OrderedJson j = OrderedJson::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ServiceError(400, "bad_request", "request body is not a JSON object");
  RfcRequest r;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    if (key == "url" || key == "title" || key == "body") {
      if (v.is_null()) continue;
      if (!v.is_string()) throw ServiceError(400, "bad_request", "field '" + key + "' must be a string");
      (key == "url" ? r.url : key == "title" ? r.title : r.body) = v.get<std::string>();
    } else if (key == "max_results") {
      if (v.is_null()) continue;
      if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > static_cast<long long>(kMaxResultsLimit))
        throw ServiceError(400, "bad_request", "max_results must be an integer in [1, 100]");
      r.max_results = v.get<std::size_t>();
    } else {
      throw ServiceError(400, "bad_request", "unknown field '" + key + "'");
    }
  }
  return r;
}

inline OrderedJson to_json(const RfcRequest& r) {
  OrderedJson j = OrderedJson::object();
  if (r.url) j["url"] = *r.url;
  if (r.title) j["title"] = *r.title;
  if (r.body) j["body"] = *r.body;
  j["max_results"] = r.max_results;
  return j;
}

inline OrderedJson error_json(const std::string& code, const std::string& message) {
  return OrderedJson{{"code", code}, {"message", message}};
}

struct ServiceOptions {
  fetch::Fetcher fetcher;          // used for url-only requests; defaults to fetch::fetch_one
  std::size_t max_related = 5;     // related articles per response
  bool log_requests = false;       // off by default; never logs page URLs
};

struct HttpReply {
  int status = 200;
  std::string body;
};

// Fact checks plus the related stories, assembled from ranked results.
inline OrderedJson build_response(const Snapshot& snap, const std::vector<ScoredResult>& results,
                                  const std::optional<std::string>& site, std::size_t max_related, double elapsed_ms) {
  OrderedJson fcs = OrderedJson::array();
  for (const auto& r : results) {
    const FactCheck* fc = snap.factcheck(r.factcheck_id);
    if (!fc) throw Error("internal", "result id missing from corpus: " + r.factcheck_id);
    fcs.push_back(OrderedJson{{"url", fc->url},
                              {"publisher", fc->publisher},
                              {"title", fc->title},
                              {"claim_reviewed", fc->claim_reviewed},
                              {"rating_label", fc->rating_label ? OrderedJson(*fc->rating_label) : OrderedJson()},
                              {"score", r.total}});
  }
  OrderedJson related = OrderedJson::array();
  std::unordered_set<std::string> seen;
  for (const auto& r : results) {
    if (related.size() >= max_related) break;
    auto it = snap.related.entries.find(r.factcheck_id);
    if (it == snap.related.entries.end()) continue;
    for (const RelatedArticle& ra : it->second) {
      if (related.size() >= max_related) break;
      std::string a_url, a_site, a_title;
      if (const Article* a = snap.article(ra.article_id)) {
        a_url = a->url;
        a_site = a->site;
        a_title = a->title;
      } else if (url::is_absolute(ra.article_id)) {
        a_url = ra.article_id;
        a_site = url::host(ra.article_id);
      } else {
        continue;
      }
      if (site && util::to_lower(a_site) != *site) continue;
      if (!seen.insert(url::normalize_for_dedupe(a_url)).second) continue;
      related.push_back(OrderedJson{{"url", a_url}, {"site", a_site}, {"title", a_title}});
    }
  }
  return OrderedJson{{"fact_checks", fcs},
                     {"related_articles", related},
                     {"diagnostics",
                      {{"n_scored", snap.collection.size()}, {"threshold", snap.weights.t_l}, {"elapsed_ms", elapsed_ms}}}};
}

// Holds the current snapshot and answers requests against it. Each request
// takes one reference to the snapshot and uses only that.
class Service {
 public:
  explicit Service(ServiceOptions options = {}) : options_(std::move(options)) {
    if (!options_.fetcher) options_.fetcher = [](const std::string& u) { return fetch::fetch_one(u); };
  }

  void publish(std::shared_ptr<const Snapshot> snapshot) {
    std::lock_guard<std::mutex> lock(mu_);
    snapshot_ = std::move(snapshot);
  }

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return snapshot_;
  }

  // Throws ServiceError on request problems.
  OrderedJson related(const RfcRequest& request) const {
    auto start = std::chrono::steady_clock::now();
    auto snap = snapshot();
    if (!snap) throw ServiceError(503, "not_ready", "no snapshot loaded");
    QueryDocument doc{request.title.value_or(""), request.body.value_or("")};
    std::optional<std::string> site;
    if (request.url) {
      if (!url::is_absolute(*request.url)) throw ServiceError(400, "bad_request", "url must be absolute");
      site = util::to_lower(url::host(*request.url));
    }
    bool has_text = !util::trim(doc.title).empty() || !util::trim(doc.body).empty();
    if (!has_text && request.url) {
      fetch::FetchResult page = options_.fetcher(*request.url);
      if (!page.ok()) throw ServiceError(502, "fetch_failed", "could not fetch article: " + page.error);
      Article a = corpus::extract_article(*page.body, *request.url, std::nullopt);
      doc = {a.title, a.body_text};
      has_text = !util::trim(doc.title).empty() || !util::trim(doc.body).empty();
    }
    if (!has_text) throw ServiceError(400, "empty_input", "request carries no usable text");
    auto results = retrieve(doc, snap->collection, snap->weights, request.max_results);
    double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return build_response(*snap, results, site, options_.max_related, elapsed);
  }

  HttpReply handle_related(std::string_view body) const {
    try {
      OrderedJson out = related(parse_request(body));
      if (options_.log_requests) std::fprintf(stderr, "related: %zu results\n", out["fact_checks"].size());
      return {200, out.dump()};
    } catch (const ServiceError& e) {
      return {e.status(), error_json(e.code(), e.what()).dump()};
    } catch (const std::exception& e) {
      return {500, error_json("internal", e.what()).dump()};
    }
  }

  OrderedJson health() const {
    auto snap = snapshot();
    if (!snap) return OrderedJson{{"status", "not_ready"}};
    const Weights& w = snap->weights;
    return OrderedJson{{"status", "ok"},
                       {"corpus_hash", snap->corpus_hash},
                       {"model_hash", snap->model_hash.empty() ? OrderedJson() : OrderedJson(snap->model_hash)},
                       {"vocab_hash", snap->vocab_hash},
                       {"weights",
                        {{"w_title", w.w_title},
                         {"w_body", w.w_body},
                         {"w_topics", w.w_topics},
                         {"w_thematic", w.w_thematic},
                         {"t_l", w.t_l}}},
                       {"n_factchecks", snap->factchecks.size()},
                       {"n_articles", snap->articles.size()}};
  }

  HttpReply handle_health() const {
    OrderedJson h = health();
    return {h["status"] == "ok" ? 200 : 503, h.dump()};
  }

 private:
  ServiceOptions options_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snapshot_;
};

inline void bind_routes(httplib::Server& server, const Service& service) {
  server.Post("/v1/related", [&service](const httplib::Request& req, httplib::Response& res) {
    HttpReply r = service.handle_related(req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  server.Get("/v1/health", [&service](const httplib::Request&, httplib::Response& res) {
    HttpReply r = service.handle_health();
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "unhandled error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_json("internal", msg).dump(), "application/json");
  });
}

// "host:port" -> (host, port).
inline std::pair<std::string, int> parse_listen(std::string_view spec) {
  auto colon = spec.rfind(':');
  if (colon == std::string_view::npos) throw Error("invalid_argument", "--listen expects host:port");
  std::string host(spec.substr(0, colon));
  auto port_str = spec.substr(colon + 1);
  int port = 0;
  auto res = std::from_chars(port_str.data(), port_str.data() + port_str.size(), port);
  if (res.ec != std::errc{} || res.ptr != port_str.data() + port_str.size() || port < 0 || port > 65535)
    throw Error("invalid_argument", "bad port in --listen '" + std::string(spec) + "'");
  return {host.empty() ? "127.0.0.1" : host, port};
}

}  // namespace rfc
