#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotrepr/common.hpp"
#include "pivotrepr/features.hpp"

namespace pivotrepr {

struct EmbeddingTable {
  int dimension = 0;
  std::map<std::string, Eigen::VectorXd> vectors;
};

struct SgnsConfig {
  int dimension = 50;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  int min_count = 5;
  double learning_rate = 0.025;  // linearly decayed
  std::uint64_t seed = 0;
};

struct SgnsReport {
  std::vector<double> epoch_losses;  // mean negative-sampling loss per epoch
};

// Insert "w1-w2" between every adjacent pivot bigram occurrence, left to right.
std::vector<std::string> rewrite_bigrams(const std::vector<std::string>& tokens,
                                         const std::set<std::pair<std::string, std::string>>& bigram_pivots);

// Minimal skip-gram with negative sampling; returns input-side vectors.
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus, const SgnsConfig& config,
                          SgnsReport* report = nullptr);

// Text format: "<vocab_size> <dimension>" header, then "<token> v1 ... vD" rows.
EmbeddingTable load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

// Row i = embedding of pivot i; bigram pivots look up their fused "w1-w2" token.
Eigen::MatrixXd build_decoder(const EmbeddingTable& table, const FeatureSpace& space);

}  // namespace pivotrepr
