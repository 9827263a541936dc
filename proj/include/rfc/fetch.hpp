#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <httplib.h>

#include "rfc/url.hpp"
#include "rfc/util.hpp"

namespace rfc::fetch {

struct FetchResult {
  std::string url;
  std::optional<std::string> body;  // present on success
  int status = 0;                   // HTTP status, 0 when no response was received
  std::string error;                // empty on success

  bool ok() const { return body.has_value(); }
};

struct FetchOptions {
  double rate_limit = 1.0;  // requests per second, per host
  std::size_t max_parallel_hosts = 8;
  std::chrono::seconds connect_timeout{5};
  std::chrono::seconds read_timeout{15};
  std::string user_agent = "rfc-fetch/1.0";
};

// Fetches a single URL. Never throws; failures are reported in the result.
inline FetchResult fetch_one(const std::string& target, const FetchOptions& options = {}) {
  FetchResult result;
  result.url = target;
  url::Parts parts = url::parse(target);
  if (!url::is_absolute(target) || (parts.scheme != "http" && parts.scheme != "https")) {
    result.error = "unsupported url";
    return result;
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (parts.scheme == "https") {
    result.error = "https support not compiled in";
    return result;
  }
#endif
  try {
    httplib::Client client(parts.scheme + "://" + parts.authority);
    client.set_connection_timeout(options.connect_timeout);
    client.set_read_timeout(options.read_timeout);
    client.set_follow_location(true);
    std::string path = parts.path.empty() ? "/" : parts.path;
    if (!parts.query.empty()) path += "?" + parts.query;
    httplib::Headers headers{{"User-Agent", options.user_agent}};
    auto res = client.Get(path, headers);
    if (!res) {
      result.error = httplib::to_string(res.error());
      return result;
    }
    result.status = res->status;
    if (res->status < 200 || res->status >= 300) {
      result.error = "http status " + std::to_string(res->status);
      return result;
    }
    result.body = res->body;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

using Fetcher = std::function<FetchResult(const std::string&)>;

// Fetches each distinct URL once, in parallel across hosts and serially
// within a host, waiting 1/rate_limit seconds between same-host requests.
// Results come back in first-occurrence order of the input.
inline std::vector<FetchResult> fetch_pages(const std::vector<std::string>& urls, const FetchOptions& options = {},
                                            Fetcher fetcher = {}) {
  if (urls.empty()) throw Error("invalid_argument", "fetch_pages: url list is empty");
  if (!fetcher) fetcher = [&options](const std::string& u) { return fetch_one(u, options); };

  std::vector<std::string> unique;
  std::unordered_set<std::string> seen;
  for (const auto& u : urls)
    if (seen.insert(u).second) unique.push_back(u);

  std::map<std::string, std::vector<std::size_t>> by_host;
  for (std::size_t i = 0; i < unique.size(); ++i) by_host[url::parse(unique[i]).authority].push_back(i);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [host, idxs] : by_host) groups.push_back(&idxs);

  std::vector<FetchResult> results(unique.size());
  const auto gap = options.rate_limit > 0 ? std::chrono::duration<double>(1.0 / options.rate_limit)
                                          : std::chrono::duration<double>(0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t g = next++; g < groups.size(); g = next++) {
      auto last = std::chrono::steady_clock::time_point{};
      bool first = true;
      for (std::size_t idx : *groups[g]) {
        if (!first) std::this_thread::sleep_until(last + std::chrono::duration_cast<std::chrono::nanoseconds>(gap));
        first = false;
        last = std::chrono::steady_clock::now();
        results[idx] = fetcher(unique[idx]);
        results[idx].url = unique[idx];
      }
    }
  };
  std::size_t n_threads = std::clamp<std::size_t>(options.max_parallel_hosts, 1, std::max<std::size_t>(1, groups.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

}  // namespace rfc::fetch
