#pragma once

#include <array>
#include <string>
#include <vector>

#include "pivotrepr/common.hpp"
#include "pivotrepr/corpus.hpp"

namespace pivotrepr {

// Two-domain synthetic sentiment corpora with controllable shift. Shared
// sentiment words become pivot candidates (frequent in both domains); each
// domain additionally has its own sentiment vocabulary, disjoint across
// domains, which only non-pivot-aware models can exploit on the target side.
struct GeneratorConfig {
  std::array<std::vector<std::string>, 2> shared_sentiment_vocab;  // [negative, positive]
  std::array<std::vector<std::string>, 2> source_sentiment_vocab;
  std::array<std::vector<std::string>, 2> target_sentiment_vocab;
  std::vector<std::string> filler_vocab;

  int filler_len_min = 20;
  int filler_len_max = 40;
  double pivot_emission_prob = 0.12;
  double domain_word_emission_prob = 0.5;

  int source_labeled_size = 2000;
  int source_unlabeled_size = 2000;
  int target_unlabeled_size = 2000;
  int target_test_size = 1000;
  std::uint64_t seed = 0;
};

GeneratorConfig default_generator_config();

struct SyntheticCorpora {
  Corpus source_labeled;
  Corpus source_unlabeled;
  Corpus target_unlabeled;
  Corpus target_test;
};

SyntheticCorpora generate(const GeneratorConfig& config);

}  // namespace pivotrepr
