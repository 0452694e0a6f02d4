#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pivotrepr/common.hpp"

namespace pivotrepr {

struct Document {
  std::string id;
  std::vector<std::string> tokens;  // lowercase, non-empty
  std::optional<int> label;         // 1 = positive, 0 = negative
};

enum class CorpusKind { Labeled, Unlabeled };

struct Corpus {
  std::string domain_name;
  std::vector<Document> documents;
  CorpusKind kind = CorpusKind::Unlabeled;
};

struct FoldSplit {
  int fold_index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> dev_ids;
};

struct UnlabeledSplit {
  std::vector<std::string> train_ids;       // pooled large parts, source then target
  std::vector<std::string> validation_ids;  // pooled small parts
};

// Lowercase, split on maximal runs of non-alphanumeric characters.
std::vector<std::string> tokenize(const std::string& raw_text);

// Unigrams in position order, then adjacent bigrams in position order.
// A bigram key is "w1 w2" (single space).
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens);

// JSON-lines corpus file. Labeled: {"id"?, "text", "label"}. Unlabeled: {"id"?, "text"}.
// Unknown keys are rejected; ids default to 1-based line numbers.
Corpus load_corpus(const std::string& path, CorpusKind kind, const std::string& domain_name);
void save_corpus(const Corpus& corpus, const std::string& path);

// k balanced folds of train_size/dev_size documents each, sampled without
// replacement per fold. Dev sets across folds are not guaranteed disjoint.
std::vector<FoldSplit> make_folds(const Corpus& corpus, int k, int train_size, int dev_size,
                                  std::uint64_t seed);

// Split each domain's unlabeled data at `ratio` (the small side), then pool.
UnlabeledSplit split_unlabeled_holdout(const Corpus& source, const Corpus& target, double ratio,
                                       std::uint64_t seed);

}  // namespace pivotrepr
