#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "rfc/html.hpp"
#include "rfc/url.hpp"
#include "rfc/util.hpp"

namespace rfc {

using Json = nlohmann::json;

// Calendar date, serialized as ISO-8601 "YYYY-MM-DD".
struct Date {
  std::chrono::year_month_day ymd;

  friend bool operator==(const Date&, const Date&) = default;

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  // Accepts "YYYY-MM-DD" optionally followed by a time part ("T..." or " ...").
  static std::optional<Date> parse(std::string_view s) {
    s = util::trim(s);
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
      int v = 0;
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + (s[i] - '0');
      }
      return v;
    };
    auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
  }
};

struct FactCheck {
  std::string id;
  std::string url;
  std::string publisher;
  std::string title;
  std::string claim_reviewed;
  std::optional<Date> review_date;
  std::optional<std::string> rating_label;
  std::optional<std::int64_t> rating_value;
  std::optional<std::string> body_text;

  friend bool operator==(const FactCheck&, const FactCheck&) = default;
};

struct Article {
  std::string id;
  std::string url;
  std::string site;
  std::string title;
  std::string body_text;
  std::optional<std::string> fetched_at;  // ISO-8601 UTC timestamp

  friend bool operator==(const Article&, const Article&) = default;
};

struct CorpusStats {
  std::size_t n_factchecks = 0;
  std::size_t n_sites = 0;
  std::size_t n_articles = 0;
  std::map<std::string, std::size_t> per_site_counts;  // fact checks per publisher
};

// Counters for things extract_claim_reviews skipped.
struct ExtractionDiagnostics {
  std::size_t jsonld_parse_failures = 0;
  std::size_t missing_claim = 0;
};

namespace corpus {

inline std::string normalize_claim(std::string_view claim) { return util::to_lower(util::collapse_whitespace(claim)); }

inline std::string factcheck_id(std::string_view url, std::string_view claim) {
  std::string key = url::normalize_for_dedupe(url);
  key.push_back('\x1f');
  key += normalize_claim(claim);
  return "fc-" + util::hex64(util::fnv1a64(key));
}

inline std::string article_id(std::string_view url) {
  return "a-" + util::hex64(util::fnv1a64(url::normalize_for_dedupe(url)));
}

namespace detail {

inline bool has_type(const Json& obj, std::string_view type) {
  auto it = obj.find("@type");
  if (it == obj.end()) return false;
  auto matches = [&](const Json& t) {
    if (!t.is_string()) return false;
    std::string s = t.get<std::string>();
    auto slash = s.find_last_of("/:");
    if (slash != std::string::npos) s = s.substr(slash + 1);
    return s == type;
  };
  if (it->is_array()) {
    for (const auto& t : *it)
      if (matches(t)) return true;
    return false;
  }
  return matches(*it);
}

// First string value of a JSON field; arrays yield their first string entry,
// objects their "name"/"@value".
inline std::optional<std::string> string_field(const Json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return std::nullopt;
  const Json* v = &*it;
  if (v->is_array()) {
    const Json* found = nullptr;
    for (const auto& e : *v)
      if (e.is_string() || e.is_number()) {
        found = &e;
        break;
      }
    if (!found) return std::nullopt;
    v = found;
  }
  if (v->is_object()) {
    for (const char* inner : {"@value", "name"}) {
      auto in = v->find(inner);
      if (in != v->end() && in->is_string()) return in->get<std::string>();
    }
    return std::nullopt;
  }
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number_integer()) return std::to_string(v->get<std::int64_t>());
  if (v->is_number()) return util::format_double(v->get<double>());
  return std::nullopt;
}

inline const Json* object_field(const Json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return nullptr;
  if (it->is_object()) return &*it;
  if (it->is_array()) {
    for (const auto& e : *it)
      if (e.is_object()) return &e;
  }
  return nullptr;
}

inline std::optional<std::int64_t> parse_rating_value(const Json& rating) {
  auto it = rating.find("ratingValue");
  if (it == rating.end()) return std::nullopt;
  double v = 0;
  if (it->is_number()) {
    v = it->get<double>();
  } else if (it->is_string()) {
    auto parsed = util::parse_double(it->get<std::string>());
    if (!parsed) return std::nullopt;
    v = *parsed;
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(v) || std::floor(v) != v) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

inline void collect_claim_reviews(const Json& node, std::vector<const Json*>& out) {
  if (node.is_array()) {
    for (const auto& e : node) collect_claim_reviews(e, out);
    return;
  }
  if (!node.is_object()) return;
  if (has_type(node, "ClaimReview")) out.push_back(&node);
  for (const auto& [key, value] : node.items())
    if (value.is_object() || value.is_array()) collect_claim_reviews(value, out);
}

inline std::optional<FactCheck> from_claim_review(const Json& review, std::string_view source_url,
                                                  const std::string& page_title,
                                                  const std::optional<std::string>& body_text) {
  auto claim = string_field(review, "claimReviewed");
  std::string claim_text = claim ? util::collapse_whitespace(*claim) : std::string();
  if (claim_text.empty()) return std::nullopt;

  FactCheck fc;
  auto review_url = string_field(review, "url");
  fc.url = review_url ? url::resolve(source_url, *review_url) : std::string(source_url);
  fc.publisher = url::host(fc.url);
  fc.claim_reviewed = claim_text;
  if (auto name = string_field(review, "name")) fc.title = util::collapse_whitespace(*name);
  if (fc.title.empty())
    if (auto headline = string_field(review, "headline")) fc.title = util::collapse_whitespace(*headline);
  if (fc.title.empty()) fc.title = page_title;

  if (auto d = string_field(review, "datePublished")) fc.review_date = Date::parse(*d);
  if (!fc.review_date)
    if (const Json* item = object_field(review, "itemReviewed"))
      if (auto d = string_field(*item, "datePublished")) fc.review_date = Date::parse(*d);

  if (const Json* rating = object_field(review, "reviewRating")) {
    if (auto label = string_field(*rating, "alternateName")) {
      std::string l = util::collapse_whitespace(*label);
      if (!l.empty()) fc.rating_label = l;
    }
    fc.rating_value = parse_rating_value(*rating);
  }
  fc.body_text = body_text;
  fc.id = factcheck_id(fc.url, fc.claim_reviewed);
  return fc;
}

// Microdata value of a property element.
inline std::string microdata_value(const html::Document& doc, std::size_t idx, std::string_view base) {
  const html::Node& n = doc[idx];
  if (const std::string* content = n.attr("content")) return util::collapse_whitespace(*content);
  if (n.tag == "a" || n.tag == "link" || n.tag == "area") {
    if (const std::string* href = n.attr("href")) return url::resolve(base, *href);
  }
  if (n.tag == "img" || n.tag == "audio" || n.tag == "video" || n.tag == "source" || n.tag == "embed") {
    if (const std::string* src = n.attr("src")) return url::resolve(base, *src);
  }
  if (n.tag == "time") {
    if (const std::string* dt = n.attr("datetime")) return util::collapse_whitespace(*dt);
  }
  if (n.tag == "data" || n.tag == "meter") {
    if (const std::string* v = n.attr("value")) return util::collapse_whitespace(*v);
  }
  return html::text_content(doc, idx);
}

// Converts the microdata item rooted at `scope` to a JSON-LD shaped object.
inline Json microdata_item(const html::Document& doc, std::size_t scope, std::string_view base, int depth = 0) {
  Json item = Json::object();
  if (const std::string* type = doc[scope].attr("itemtype")) {
    Json types = Json::array();
    for (auto t : util::split(util::collapse_whitespace(*type), ' '))
      if (!t.empty()) types.push_back(std::string(t));
    item["@type"] = types.size() == 1 ? types[0] : types;
  }
  if (depth > 16) return item;
  std::vector<std::size_t> stack(doc[scope].children.rbegin(), doc[scope].children.rend());
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    const html::Node& n = doc[idx];
    if (n.is_text()) continue;
    const std::string* prop = n.attr("itemprop");
    bool nested_scope = n.has_attr("itemscope");
    if (prop) {
      Json value = nested_scope ? microdata_item(doc, idx, base, depth + 1) : Json(microdata_value(doc, idx, base));
      for (auto name : util::split(util::collapse_whitespace(*prop), ' ')) {
        if (name.empty()) continue;
        std::string key(name);
        if (!item.contains(key)) item[key] = value;
      }
    }
    if (nested_scope) continue;
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return item;
}

}  // namespace detail

// Extracts one FactCheck per ClaimReview object found in JSON-LD blocks or,
// when no JSON-LD ClaimReview exists, in microdata. Never throws on bad input.
inline std::vector<FactCheck> extract_claim_reviews(std::string_view html_text, std::string_view source_url,
                                                    ExtractionDiagnostics* diagnostics = nullptr) {
  ExtractionDiagnostics local;
  ExtractionDiagnostics& diag = diagnostics ? *diagnostics : local;
  html::Document doc = html::parse(html_text);
  std::string title = html::page_title(doc);
  std::string text = html::visible_text(doc);
  std::optional<std::string> body = text.empty() ? std::nullopt : std::optional<std::string>(text);

  std::vector<FactCheck> out;
  auto emit = [&](const std::vector<const Json*>& reviews) {
    for (const Json* review : reviews) {
      if (auto fc = detail::from_claim_review(*review, source_url, title, body)) {
        out.push_back(std::move(*fc));
      } else {
        ++diag.missing_claim;
      }
    }
  };

  std::vector<Json> parsed;
  for (const std::string& block : html::json_ld_blocks(doc)) {
    Json j = Json::parse(block, nullptr, false);
    if (j.is_discarded()) {
      ++diag.jsonld_parse_failures;
      continue;
    }
    parsed.push_back(std::move(j));
  }
  std::vector<const Json*> reviews;
  for (const Json& j : parsed) detail::collect_claim_reviews(j, reviews);
  if (!reviews.empty()) {
    emit(reviews);
    return out;
  }

  std::vector<Json> items;
  for (std::size_t i = 1; i < doc.nodes.size(); ++i) {
    const html::Node& n = doc.nodes[i];
    if (!n.has_attr("itemscope")) continue;
    const std::string* type = n.attr("itemtype");
    if (!type || type->find("ClaimReview") == std::string::npos) continue;
    items.push_back(detail::microdata_item(doc, i, source_url));
  }
  std::vector<const Json*> micro;
  for (const Json& item : items) micro.push_back(&item);
  emit(micro);
  return out;
}

// Article record from a fetched page.
inline Article extract_article(std::string_view html_text, std::string_view source_url,
                               std::optional<std::string> fetched_at = std::nullopt) {
  html::Document doc = html::parse(html_text);
  Article a;
  a.url = std::string(source_url);
  a.site = url::host(source_url);
  a.title = html::page_title(doc);
  a.body_text = html::visible_text(doc);
  a.fetched_at = std::move(fetched_at);
  a.id = article_id(source_url);
  return a;
}

// Keeps the first record for each (normalized url, normalized claim) key.
inline std::vector<FactCheck> dedupe(const std::vector<FactCheck>& records) {
  std::unordered_set<std::string> seen;
  std::vector<FactCheck> out;
  for (const FactCheck& fc : records) {
    std::string key = url::normalize_for_dedupe(fc.url);
    key.push_back('\x1f');
    key += normalize_claim(fc.claim_reviewed);
    if (seen.insert(std::move(key)).second) out.push_back(fc);
  }
  return out;
}

// Articles are unique by id; first occurrence wins.
inline std::vector<Article> dedupe(const std::vector<Article>& records) {
  std::unordered_set<std::string> seen;
  std::vector<Article> out;
  for (const Article& a : records)
    if (seen.insert(a.id).second) out.push_back(a);
  return out;
}

inline CorpusStats compute_stats(const std::vector<FactCheck>& factchecks, const std::vector<Article>& articles) {
  CorpusStats s;
  s.n_factchecks = factchecks.size();
  s.n_articles = articles.size();
  for (const FactCheck& fc : factchecks) ++s.per_site_counts[fc.publisher];
  s.n_sites = s.per_site_counts.size();
  return s;
}

// ---------------------------------------------------------------------------
// Line-delimited persistence

enum class LoadMode { kStrict, kLenient };

struct LoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> errors;  // "line N: message" for skipped lines
};

namespace detail {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error("schema", std::string("missing key '") + key + "'");
  return *it;
}

inline std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw Error("schema", std::string("key '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error("schema", std::string("key '") + key + "' must be a string or null");
  return it->get<std::string>();
}

}  // namespace detail

inline Json to_json(const FactCheck& fc) {
  Json j = Json::object();
  j["id"] = fc.id;
  j["url"] = fc.url;
  j["publisher"] = fc.publisher;
  j["title"] = fc.title;
  j["claim_reviewed"] = fc.claim_reviewed;
  j["review_date"] = fc.review_date ? Json(fc.review_date->to_string()) : Json(nullptr);
  j["rating_label"] = detail::optional_json(fc.rating_label);
  j["rating_value"] = detail::optional_json(fc.rating_value);
  j["body_text"] = detail::optional_json(fc.body_text);
  return j;
}

inline Json to_json(const Article& a) {
  Json j = Json::object();
  j["id"] = a.id;
  j["url"] = a.url;
  j["site"] = a.site;
  j["title"] = a.title;
  j["body_text"] = a.body_text;
  j["fetched_at"] = detail::optional_json(a.fetched_at);
  return j;
}

inline FactCheck factcheck_from_json(const Json& j) {
  if (!j.is_object()) throw Error("schema", "record is not an object");
  FactCheck fc;
  fc.id = detail::require_string(j, "id");
  fc.url = detail::require_string(j, "url");
  fc.publisher = detail::require_string(j, "publisher");
  fc.title = detail::require_string(j, "title");
  fc.claim_reviewed = detail::require_string(j, "claim_reviewed");
  if (auto d = detail::optional_string(j, "review_date")) {
    fc.review_date = Date::parse(*d);
    if (!fc.review_date) throw Error("schema", "review_date is not an ISO-8601 date");
  }
  fc.rating_label = detail::optional_string(j, "rating_label");
  if (auto it = j.find("rating_value"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw Error("schema", "rating_value must be an integer or null");
    fc.rating_value = it->get<std::int64_t>();
  }
  fc.body_text = detail::optional_string(j, "body_text");
  if (fc.id.empty()) throw Error("schema", "empty id");
  if (!url::is_absolute(fc.url)) throw Error("schema", "url is not absolute");
  if (util::collapse_whitespace(fc.claim_reviewed).empty()) throw Error("schema", "empty claim_reviewed");
  return fc;
}

inline Article article_from_json(const Json& j) {
  if (!j.is_object()) throw Error("schema", "record is not an object");
  Article a;
  a.id = detail::require_string(j, "id");
  a.url = detail::require_string(j, "url");
  a.site = detail::require_string(j, "site");
  a.title = detail::require_string(j, "title");
  a.body_text = detail::require_string(j, "body_text");
  a.fetched_at = detail::optional_string(j, "fetched_at");
  if (a.id.empty()) throw Error("schema", "empty id");
  if (a.url.empty()) throw Error("schema", "empty url");
  if (a.title.empty() && a.body_text.empty()) throw Error("schema", "title and body_text both empty");
  return a;
}

// Reads a JSONL file, decoding each non-blank line with `decode`. Strict mode
// throws ParseError on the first bad line; lenient mode skips and records it.
template <typename Decode>
auto load_jsonl(const std::string& path, Decode decode, LoadMode mode = LoadMode::kStrict,
                LoadReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open " + path);
  using Record = decltype(decode(Json{}));
  std::vector<Record> out;
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    try {
      Json j = Json::parse(line);
      out.push_back(decode(j));
      ++rep.loaded;
    } catch (const std::exception& e) {
      ParseError err(lineno, e.what());
      if (mode == LoadMode::kStrict) throw err;
      ++rep.skipped;
      rep.errors.emplace_back(err.what());
    }
  }
  return out;
}

template <typename Record>
void save_jsonl(const std::vector<Record>& records, const std::string& path) {
  std::string buf;
  for (const Record& r : records) {
    buf += to_json(r).dump(-1, ' ', false, Json::error_handler_t::replace);
    buf.push_back('\n');
  }
  util::write_file(path, buf);
}

inline std::vector<FactCheck> load_factchecks(const std::string& path, LoadMode mode = LoadMode::kStrict,
                                              LoadReport* report = nullptr) {
  return load_jsonl(path, factcheck_from_json, mode, report);
}

inline std::vector<Article> load_articles(const std::string& path, LoadMode mode = LoadMode::kStrict,
                                          LoadReport* report = nullptr) {
  return load_jsonl(path, article_from_json, mode, report);
}

inline void save_factchecks(const std::vector<FactCheck>& records, const std::string& path) {
  save_jsonl(records, path);
}
inline void save_articles(const std::vector<Article>& records, const std::string& path) { save_jsonl(records, path); }

}  // namespace corpus
}  // namespace rfc
