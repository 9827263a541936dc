#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "rfc/corpus.hpp"
#include "rfc/snapshot.hpp"
#include "support.hpp"

namespace testing {

// (url, file) pairs from a fixture manifest.tsv.
inline std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& rel_dir) {
  std::ifstream in(data_path(rel_dir + "/manifest.tsv"));
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.emplace_back(line.substr(0, tab), data_path(rel_dir + "/" + line.substr(tab + 1)));
  }
  return out;
}

inline std::vector<rfc::FactCheck> fixture_factchecks() {
  std::vector<rfc::FactCheck> all;
  for (const auto& [url, file] : read_manifest("fixtures/factchecks")) {
    auto fcs = rfc::corpus::extract_claim_reviews(rfc::util::read_file(file), url);
    all.insert(all.end(), fcs.begin(), fcs.end());
  }
  return rfc::corpus::dedupe(all);
}

inline std::vector<rfc::Article> fixture_articles() {
  std::vector<rfc::Article> all;
  for (const auto& [url, file] : read_manifest("fixtures/articles"))
    all.push_back(rfc::corpus::extract_article(rfc::util::read_file(file), url));
  return all;
}

inline const rfc::FactCheck& find_claim(const std::vector<rfc::FactCheck>& fcs, const std::string& needle) {
  for (const auto& fc : fcs)
    if (fc.claim_reviewed.find(needle) != std::string::npos) return fc;
  throw rfc::Error("test_fixture", "no fixture claim containing " + needle);
}

inline const rfc::Article& find_article(const std::vector<rfc::Article>& as, const std::string& slug) {
  for (const auto& a : as)
    if (a.url.find("/" + slug + "?") != std::string::npos) return a;
  throw rfc::Error("test_fixture", "no fixture article " + slug);
}

inline rfc::LdaParams fixture_lda_params() {
  rfc::LdaParams p;
  p.k = 4;
  p.iterations = 200;
  p.seed = 7;
  return p;
}

// Runs every pipeline stage over the fixture pages into `dir`.
inline void build_fixture_snapshot(const std::string& dir, const rfc::Weights& weights) {
  using namespace rfc;
  corpus::save_factchecks(fixture_factchecks(), snapshot_path(dir, files::kFactChecks));
  corpus::save_articles(fixture_articles(), snapshot_path(dir, files::kArticles));
  build_index_stage(dir);
  train_topics_stage(dir, fixture_lda_params());
  set_thematic_stage(dir, {0});
  save_weights(weights, snapshot_path(dir, files::kWeights));
  related_stage(dir, weights);
}

}  // namespace testing
