#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(RFC_TEST_DATA) + "/" + rel; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rfc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Two-letter-per-position words that survive tokenization and stem to
// themselves ("qa", "qb", ...): digits and 'q' avoid every stemmer rule.
inline std::string synthetic_word(std::size_t i) {
  return "q" + std::to_string(i / 10) + std::to_string(i % 10) + "z";
}

// Dense cosine over count maps, written from scratch: tf = raw count,
// idf = ln(N / df) with df counted over `docs`.
struct DenseTfIdf {
  std::vector<std::map<std::string, int>> docs;
  std::map<std::string, int> df;

  explicit DenseTfIdf(std::vector<std::map<std::string, int>> d) : docs(std::move(d)) {
    for (const auto& doc : docs)
      for (const auto& [t, c] : doc)
        if (c > 0) ++df[t];
  }

  double idf(const std::string& t) const {
    auto it = df.find(t);
    if (it == df.end() || it->second == 0) return 0.0;
    return std::log(static_cast<double>(docs.size()) / it->second);
  }

  std::map<std::string, double> weigh(const std::map<std::string, int>& counts) const {
    std::map<std::string, double> out;
    for (const auto& [t, c] : counts) out[t] = c * idf(t);
    return out;
  }

  static double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, w] : a) {
      na += w * w;
      auto it = b.find(t);
      if (it != b.end()) dot += w * it->second;
    }
    for (const auto& [t, w] : b) nb += w * w;
    if (na == 0 || nb == 0) return 0.0;
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return c < 0 ? 0 : (c > 1 ? 1 : c);
  }
};

}  // namespace testing
