#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rfc/textproc.hpp"
#include "support.hpp"

namespace testing {

// Two disjoint 10-term blocks; the first half of the documents draw only
// from block A, the second half only from block B.
struct TwoBlockCorpus {
  std::vector<std::string> block_a, block_b;
  std::vector<std::string> texts;
  std::shared_ptr<const rfc::Vocabulary> vocab;
  std::vector<rfc::BagOfWords> bows;

  std::string block_text(const std::vector<std::string>& block, std::size_t len, std::mt19937_64& rng) const {
    std::string t;
    for (std::size_t i = 0; i < len; ++i) t += block[rng() % block.size()] + " ";
    return t;
  }

  rfc::BagOfWords bow(const std::string& text) const { return rfc::to_bow(text, *vocab); }
};

inline TwoBlockCorpus make_two_block_corpus(std::uint64_t seed, std::size_t n_docs = 40, std::size_t doc_len = 100) {
  TwoBlockCorpus c;
  for (std::size_t i = 0; i < 10; ++i) {
    c.block_a.push_back(synthetic_word(i));
    c.block_b.push_back(synthetic_word(10 + i));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> token_docs;
  for (std::size_t d = 0; d < n_docs; ++d) {
    c.texts.push_back(c.block_text(d < n_docs / 2 ? c.block_a : c.block_b, doc_len, rng));
    token_docs.push_back(rfc::tokenize(c.texts.back()));
  }
  c.vocab = std::make_shared<const rfc::Vocabulary>(rfc::build_vocabulary(token_docs));
  for (const auto& t : c.texts) c.bows.push_back(c.bow(t));
  return c;
}

}  // namespace testing
