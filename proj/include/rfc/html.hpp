#pragma once

// Best-effort HTML parsing: a forgiving tokenizer feeding a small DOM tree.
// Never throws on malformed markup; unmatched end tags are dropped and
// unclosed elements are closed at end of input.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfc/util.hpp"

namespace rfc::html {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string decode_entities(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, std::uint32_t>, 20> kNamed{{
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
      {"nbsp", 0xA0},    {"ndash", 0x2013}, {"mdash", 0x2014}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
      {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"hellip", 0x2026}, {"copy", 0xA9},   {"reg", 0xAE},
      {"trade", 0x2122}, {"laquo", 0xAB},   {"raquo", 0xBB},   {"middot", 0xB7},  {"bull", 0x2022},
  }};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    bool done = false;
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      std::string_view digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (ok) {
        append_utf8(out, cp);
        done = true;
      }
    } else {
      for (const auto& [entity, cp] : kNamed) {
        if (entity == name) {
          append_utf8(out, cp);
          done = true;
          break;
        }
      }
    }
    if (done) {
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

struct Node {
  std::string tag;  // lowercased element name; empty for text nodes
  std::vector<std::pair<std::string, std::string>> attrs;
  // Decoded text for text nodes. For script/style the raw content, for
  // title/textarea the decoded content; those elements have no children.
  std::string text;
  std::vector<std::size_t> children;
  std::size_t parent = 0;

  bool is_text() const { return tag.empty(); }

  const std::string* attr(std::string_view name) const {
    for (const auto& [k, v] : attrs)
      if (k == name) return &v;
    return nullptr;
  }
  bool has_attr(std::string_view name) const { return attr(name) != nullptr; }
};

// Node 0 is a synthetic "#document" root.
struct Document {
  std::vector<Node> nodes;

  const Node& root() const { return nodes.front(); }
  const Node& operator[](std::size_t i) const { return nodes[i]; }
};

namespace detail {

inline bool is_void(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid{"area", "base", "br",   "col",   "embed",  "hr",    "img",
                                                          "input", "link", "meta", "param", "source", "track", "wbr"};
  for (auto v : kVoid)
    if (v == tag) return true;
  return false;
}

inline bool is_raw_text(std::string_view tag) { return tag == "script" || tag == "style"; }
inline bool is_escapable_raw_text(std::string_view tag) { return tag == "title" || tag == "textarea"; }

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
         c == ':' || c == '.';
}

inline std::size_t find_icase(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
    if (util::starts_with_icase(hay.substr(i), needle)) return i;
  return std::string_view::npos;
}

class TreeBuilder {
 public:
  TreeBuilder() {
    Node root;
    root.tag = "#document";
    doc_.nodes.push_back(std::move(root));
    stack_.push_back(0);
  }

  void text(std::string t) {
    if (t.empty()) return;
    Node n;
    n.text = std::move(t);
    add(std::move(n));
  }

  std::size_t open(Node n, bool self_closing) {
    std::string tag = n.tag;
    std::size_t idx = add(std::move(n));
    if (!self_closing && !is_void(tag)) stack_.push_back(idx);
    return idx;
  }

  void close(std::string_view tag) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (doc_.nodes[stack_[i]].tag == tag) {
        stack_.resize(i);
        return;
      }
    }
  }

  Document finish() && { return std::move(doc_); }

 private:
  std::size_t add(Node n) {
    std::size_t parent = stack_.back();
    n.parent = parent;
    doc_.nodes.push_back(std::move(n));
    std::size_t idx = doc_.nodes.size() - 1;
    doc_.nodes[parent].children.push_back(idx);
    return idx;
  }

  Document doc_;
  std::vector<std::size_t> stack_;
};

}  // namespace detail

inline Document parse(std::string_view src) {
  detail::TreeBuilder builder;
  std::string pending;
  auto flush = [&] {
    if (!pending.empty()) builder.text(decode_entities(pending));
    pending.clear();
  };

  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (c != '<' || i + 1 >= n) {
      pending.push_back(c);
      ++i;
      continue;
    }
    char next = src[i + 1];
    if (src.substr(i, 4) == "<!--") {
      flush();
      auto end = src.find("-->", i + 4);
      i = (end == std::string_view::npos) ? n : end + 3;
      continue;
    }
    if (next == '!' || next == '?') {
      flush();
      auto end = src.find('>', i + 2);
      i = (end == std::string_view::npos) ? n : end + 1;
      continue;
    }
    if (next == '/') {
      std::size_t j = i + 2;
      std::size_t start = j;
      while (j < n && detail::is_name_char(src[j])) ++j;
      if (j == start) {
        pending.push_back(c);
        ++i;
        continue;
      }
      flush();
      std::string tag = util::to_lower(src.substr(start, j - start));
      auto end = src.find('>', j);
      i = (end == std::string_view::npos) ? n : end + 1;
      builder.close(tag);
      continue;
    }
    if (!((next >= 'a' && next <= 'z') || (next >= 'A' && next <= 'Z'))) {
      pending.push_back(c);
      ++i;
      continue;
    }

    flush();
    Node node;
    std::size_t j = i + 1;
    std::size_t start = j;
    while (j < n && detail::is_name_char(src[j])) ++j;
    node.tag = util::to_lower(src.substr(start, j - start));
    bool self_closing = false;
    while (j < n) {
      while (j < n && util::is_space(src[j])) ++j;
      if (j >= n) break;
      if (src[j] == '>') {
        ++j;
        break;
      }
      if (src[j] == '/') {
        self_closing = true;
        ++j;
        continue;
      }
      std::size_t name_start = j;
      while (j < n && !util::is_space(src[j]) && src[j] != '=' && src[j] != '>' && src[j] != '/') ++j;
      if (j == name_start) {
        ++j;
        continue;
      }
      std::string name = util::to_lower(src.substr(name_start, j - name_start));
      self_closing = false;
      std::string value;
      std::size_t k = j;
      while (k < n && util::is_space(src[k])) ++k;
      if (k < n && src[k] == '=') {
        ++k;
        while (k < n && util::is_space(src[k])) ++k;
        if (k < n && (src[k] == '"' || src[k] == '\'')) {
          char q = src[k];
          auto end = src.find(q, k + 1);
          if (end == std::string_view::npos) end = n;
          value = decode_entities(src.substr(k + 1, end - k - 1));
          k = (end < n) ? end + 1 : n;
        } else {
          std::size_t vstart = k;
          while (k < n && !util::is_space(src[k]) && src[k] != '>') ++k;
          value = decode_entities(src.substr(vstart, k - vstart));
        }
        j = k;
      }
      bool dup = false;
      for (const auto& a : node.attrs) dup = dup || a.first == name;
      if (!dup) node.attrs.emplace_back(std::move(name), std::move(value));
    }
    i = j;

    std::string tag = node.tag;
    if ((detail::is_raw_text(tag) || detail::is_escapable_raw_text(tag)) && !self_closing) {
      auto end = detail::find_icase(src, "</" + tag, i);
      std::string_view body = src.substr(i, (end == std::string_view::npos ? n : end) - i);
      node.text = detail::is_raw_text(tag) ? std::string(body) : decode_entities(body);
      builder.open(std::move(node), true);
      if (end == std::string_view::npos) {
        i = n;
      } else {
        auto gt = src.find('>', end);
        i = (gt == std::string_view::npos) ? n : gt + 1;
      }
      continue;
    }
    builder.open(std::move(node), self_closing);
  }
  flush();
  return std::move(builder).finish();
}

// Concatenated text of all descendant text nodes, whitespace-collapsed.
inline std::string text_content(const Document& doc, std::size_t idx) {
  std::string out;
  std::vector<std::size_t> stack{idx};
  std::vector<std::size_t> order;
  while (!stack.empty()) {
    std::size_t cur = stack.back();
    stack.pop_back();
    const Node& node = doc[cur];
    if (node.is_text() || detail::is_escapable_raw_text(node.tag)) {
      out += node.text;
      out.push_back(' ');
    }
    if (detail::is_raw_text(node.tag)) continue;
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return util::collapse_whitespace(out);
}

namespace detail {

inline bool is_hidden(std::string_view tag) {
  static constexpr std::array<std::string_view, 12> kHidden{"script", "style",  "nav",    "noscript",
                                                            "template", "head", "svg",    "iframe",
                                                            "object", "button", "select", "form"};
  for (auto h : kHidden)
    if (h == tag) return true;
  return false;
}

inline bool is_block(std::string_view tag) {
  static constexpr std::array<std::string_view, 30> kBlock{
      "address", "article", "aside", "blockquote", "body", "dd",   "div",   "dl",     "dt",       "figcaption",
      "figure",  "footer",  "h1",    "h2",         "h3",   "h4",   "h5",    "h6",     "header",   "hr",
      "li",      "main",    "ol",    "p",          "pre",  "section", "table", "td", "tr",      "ul"};
  for (auto b : kBlock)
    if (b == tag) return true;
  return tag == "br" || tag == "th";
}

}  // namespace detail

// Visible page text: script/style/nav and similar subtrees are dropped and
// each block element contributes its own line.
inline std::string visible_text(const Document& doc) {
  std::vector<std::string> lines;
  std::string current;
  auto end_block = [&] {
    std::string line = util::collapse_whitespace(current);
    if (!line.empty()) lines.push_back(std::move(line));
    current.clear();
  };
  // Iterative DFS with explicit exit markers so block boundaries are seen on
  // both sides of an element.
  struct Frame {
    std::size_t idx;
    bool exiting;
  };
  std::vector<Frame> stack{{0, false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const Node& node = doc[f.idx];
    if (f.exiting) {
      end_block();
      continue;
    }
    if (node.is_text()) {
      current += node.text;
      continue;
    }
    if (detail::is_hidden(node.tag) || node.tag == "title") continue;
    bool block = detail::is_block(node.tag);
    if (block) {
      end_block();
      stack.push_back({f.idx, true});
    }
    if (node.tag == "textarea") current += " " + node.text + " ";
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back({*it, false});
  }
  end_block();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

// Indices of all element nodes with the given tag, in document order.
inline std::vector<std::size_t> find_all(const Document& doc, std::string_view tag) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < doc.nodes.size(); ++i)
    if (doc.nodes[i].tag == tag) out.push_back(i);
  return out;
}

inline std::optional<std::string> meta_content(const Document& doc, std::string_view key) {
  for (std::size_t idx : find_all(doc, "meta")) {
    const Node& m = doc[idx];
    const std::string* name = m.attr("property");
    if (!name) name = m.attr("name");
    const std::string* content = m.attr("content");
    if (name && content && util::to_lower(*name) == key) return util::collapse_whitespace(*content);
  }
  return std::nullopt;
}

// Page title: <title>, else og:title, else the first <h1>.
inline std::string page_title(const Document& doc) {
  for (std::size_t idx : find_all(doc, "title")) {
    std::string t = util::collapse_whitespace(doc[idx].text);
    if (!t.empty()) return t;
  }
  if (auto og = meta_content(doc, "og:title"); og && !og->empty()) return *og;
  for (std::size_t idx : find_all(doc, "h1")) {
    std::string t = text_content(doc, idx);
    if (!t.empty()) return t;
  }
  return {};
}

// Raw contents of every <script type="application/ld+json"> block.
inline std::vector<std::string> json_ld_blocks(const Document& doc) {
  std::vector<std::string> out;
  for (std::size_t idx : find_all(doc, "script")) {
    const std::string* type = doc[idx].attr("type");
    if (type && util::to_lower(util::trim(*type)) == "application/ld+json") out.push_back(doc[idx].text);
  }
  return out;
}

}  // namespace rfc::html
