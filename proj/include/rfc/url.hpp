#pragma once

#include <string>
#include <string_view>

#include "rfc/util.hpp"

namespace rfc::url {

struct Parts {
  std::string scheme;     // lowercased, without "://"
  std::string authority;  // host[:port], lowercased
  std::string path;       // begins with '/' when non-empty
  std::string query;      // without '?'
  std::string fragment;   // without '#'
};

inline bool is_absolute(std::string_view u) {
  auto colon = u.find("://");
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = u[i];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (i > 0 && ((c >= '0' && c <= '9') || c == '+' ||
                                                                               c == '-' || c == '.'));
    if (!ok) return false;
  }
  return colon + 3 < u.size();
}

inline Parts parse(std::string_view u) {
  Parts p;
  u = util::trim(u);
  if (auto hash = u.find('#'); hash != std::string_view::npos) {
    p.fragment = std::string(u.substr(hash + 1));
    u = u.substr(0, hash);
  }
  if (auto q = u.find('?'); q != std::string_view::npos) {
    p.query = std::string(u.substr(q + 1));
    u = u.substr(0, q);
  }
  if (auto sep = u.find("://"); sep != std::string_view::npos) {
    p.scheme = util::to_lower(u.substr(0, sep));
    u = u.substr(sep + 3);
    auto slash = u.find('/');
    p.authority = util::to_lower(u.substr(0, slash));
    if (slash != std::string_view::npos) p.path = std::string(u.substr(slash));
  } else {
    p.path = std::string(u);
  }
  return p;
}

inline std::string join(const Parts& p) {
  std::string out;
  if (!p.scheme.empty()) out = p.scheme + "://" + p.authority;
  out += p.path;
  if (!p.query.empty()) out += "?" + p.query;
  if (!p.fragment.empty()) out += "#" + p.fragment;
  return out;
}

// Hostname without port and without a leading "www.".
inline std::string host(std::string_view u) {
  std::string a = parse(u).authority;
  if (auto at = a.rfind('@'); at != std::string::npos) a = a.substr(at + 1);
  if (auto colon = a.rfind(':'); colon != std::string::npos && a.find(']') == std::string::npos) a = a.substr(0, colon);
  if (a.rfind("www.", 0) == 0) a = a.substr(4);
  return a;
}

namespace detail {
inline std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  auto segments = util::split(path, '/');
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto seg = segments[i];
    if (seg == ".") {
      if (i + 1 == segments.size()) out.emplace_back("");
      continue;
    }
    if (seg == "..") {
      if (out.size() > 1) out.pop_back();
      if (i + 1 == segments.size()) out.emplace_back("");
      continue;
    }
    out.push_back(seg);
  }
  std::string joined;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) joined.push_back('/');
    joined += out[i];
  }
  return joined;
}
}  // namespace detail

// Resolves `ref` against an absolute `base` (RFC 3986 section 5.2, simplified).
inline std::string resolve(std::string_view base, std::string_view ref) {
  ref = util::trim(ref);
  if (ref.empty()) return std::string(base);
  if (is_absolute(ref)) return std::string(ref);
  Parts b = parse(base);
  if (ref.rfind("//", 0) == 0) return b.scheme + ":" + std::string(ref);
  Parts r = parse(ref);
  Parts out;
  out.scheme = b.scheme;
  out.authority = b.authority;
  out.fragment = r.fragment;
  if (r.path.empty()) {
    out.path = b.path;
    out.query = (ref.find('?') != std::string_view::npos) ? r.query : b.query;
  } else {
    out.query = r.query;
    if (r.path.front() == '/') {
      out.path = detail::remove_dot_segments(r.path);
    } else {
      std::string dir = b.path.empty() ? std::string("/") : b.path.substr(0, b.path.rfind('/') + 1);
      out.path = detail::remove_dot_segments(dir + r.path);
    }
  }
  return join(out);
}

inline bool is_tracking_param(std::string_view key) {
  std::string k = util::to_lower(key);
  return k.rfind("utm_", 0) == 0 || k == "fbclid" || k == "gclid" || k == "mc_cid" || k == "mc_eid" ||
         k == "igshid" || k == "yclid";
}

// Lowercased URL with tracking query parameters and the fragment removed.
// Used as the URL half of the fact-check deduplication key.
inline std::string normalize_for_dedupe(std::string_view u) {
  Parts p = parse(util::to_lower(u));
  p.fragment.clear();
  std::string kept;
  for (auto param : util::split(p.query, '&')) {
    if (param.empty()) continue;
    auto key = param.substr(0, param.find('='));
    if (is_tracking_param(key)) continue;
    if (!kept.empty()) kept.push_back('&');
    kept += param;
  }
  p.query = kept;
  return join(p);
}

}  // namespace rfc::url
