#include <catch_amalgamated.hpp>

#include <random>

#include "rfc/url.hpp"
#include "rfc/util.hpp"

using namespace rfc;

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(util::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(util::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(util::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(util::hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(util::hex64(1) == "0000000000000001");
}

TEST_CASE("mix_seed is a bijection-like scrambler") {
  CHECK(util::mix_seed(0) == 0xe220a8397b1dcdafULL);
  CHECK(util::mix_seed(1) != util::mix_seed(2));
}

TEST_CASE("whitespace helpers") {
  CHECK(util::trim("  a b \n") == "a b");
  CHECK(util::trim("") == "");
  CHECK(util::collapse_whitespace("  a \t\n b  ") == "a b");
  CHECK(util::collapse_whitespace("a\xC2\xA0\xC2\xA0" "b") == "a b");
  CHECK(util::collapse_whitespace("   ") == "");
  CHECK(util::to_lower("AbC-1") == "abc-1");
  CHECK(util::starts_with_icase("HTTP://x", "http"));
  CHECK_FALSE(util::starts_with_icase("ht", "http"));
}

TEST_CASE("split keeps empty fields") {
  auto parts = util::split("a,,b,", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "a");
  CHECK(parts[1] == "");
  CHECK(parts[3] == "");
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    double v = d(rng);
    auto back = util::parse_double(util::format_double(v));
    REQUIRE(back);
    CHECK(*back == v);
  }
  CHECK(util::format_double(0.5) == "0.5");
  CHECK_FALSE(util::parse_double("1.5x"));
  CHECK_FALSE(util::parse_double(""));
}

TEST_CASE("url parsing and host") {
  auto p = url::parse("HTTPS://WWW.Example.com:8080/a/b?x=1#frag");
  CHECK(p.scheme == "https");
  CHECK(p.authority == "www.example.com:8080");
  CHECK(p.path == "/a/b");
  CHECK(p.query == "x=1");
  CHECK(p.fragment == "frag");
  CHECK(url::host("https://www.politifact.com/x") == "politifact.com");
  CHECK(url::host("http://user@news.example:81/") == "news.example");
  CHECK(url::is_absolute("https://a.b/"));
  CHECK_FALSE(url::is_absolute("/relative/path"));
  CHECK_FALSE(url::is_absolute("https://"));
  CHECK_FALSE(url::is_absolute("1http://x"));
}

TEST_CASE("url resolution follows RFC 3986 reference examples") {
  const std::string base = "http://a/b/c/d;p?q";
  CHECK(url::resolve(base, "g") == "http://a/b/c/g");
  CHECK(url::resolve(base, "./g") == "http://a/b/c/g");
  CHECK(url::resolve(base, "g/") == "http://a/b/c/g/");
  CHECK(url::resolve(base, "/g") == "http://a/g");
  CHECK(url::resolve(base, "//g") == "http://g");
  CHECK(url::resolve(base, "?y") == "http://a/b/c/d;p?y");
  CHECK(url::resolve(base, "g?y") == "http://a/b/c/g?y");
  CHECK(url::resolve(base, "#s") == "http://a/b/c/d;p?q#s");
  CHECK(url::resolve(base, "..") == "http://a/b/");
  CHECK(url::resolve(base, "../g") == "http://a/b/g");
  CHECK(url::resolve(base, "../..") == "http://a/");
  CHECK(url::resolve(base, "../../g") == "http://a/g");
  CHECK(url::resolve(base, "g.") == "http://a/b/c/g.");
  CHECK(url::resolve(base, "https://other/x") == "https://other/x");
}

TEST_CASE("dedupe normalization drops tracking params and fragments") {
  CHECK(url::normalize_for_dedupe("https://Site.com/Story?utm_source=x&id=3&fbclid=9#top") ==
        "https://site.com/story?id=3");
  CHECK(url::normalize_for_dedupe("https://site.com/story?utm_medium=a") == "https://site.com/story");
  CHECK(url::normalize_for_dedupe("https://site.com/story?id=3") ==
        url::normalize_for_dedupe("https://site.com/story?id=3&gclid=1"));
}

TEST_CASE("file helpers report io errors") {
  CHECK_THROWS_AS(util::read_file("/nonexistent/dir/file"), Error);
  CHECK_THROWS_AS(util::write_file("/nonexistent/dir/file", "x"), Error);
  try {
    util::read_file("/nonexistent/dir/file");
  } catch (const Error& e) {
    CHECK(e.code() == "io_error");
  }
  ParseError pe(7, "bad");
  CHECK(pe.line() == 7);
  CHECK(std::string(pe.what()) == "line 7: bad");
}
