#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pivotrepr/classifier.hpp"
#include "pivotrepr/corpus.hpp"
#include "pivotrepr/embeddings.hpp"
#include "pivotrepr/netrepr.hpp"
#include "pivotrepr/sclmi.hpp"

namespace pivotrepr {

enum class Method { AeScl, AeSclSr, SclMi, NoDa };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct FoldsConfig {
  int k = 5;
  int train_size = 1600;
  int dev_size = 400;
};

struct ExperimentConfig {
  Method method = Method::NoDa;
  std::vector<int> pivot_grid = {100, 200, 300, 400, 500};
  std::vector<int> hidden_grid = {100, 300, 500};
  std::vector<int> svd_grid = {50, 100, 150};
  int sclmi_pivots = 1000;
  int sclmi_epochs = 3;
  double sclmi_l2 = 1e-4;
  SgdConfig sgd;
  SgnsConfig sgns;  // AE-SCL-SR decoder embeddings; sgns.dimension is the hidden dim
  FoldsConfig folds;
  long pivot_min_count = 10;
  long nonpivot_min_count = 10;
  double unlabeled_holdout_ratio = 0.2;
  double classifier_l2 = 1e-4;
  int classifier_max_iters = 500;
  double classifier_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct FoldResult {
  int fold_index = 0;
  int chosen_pivots = 0;
  int chosen_hidden_or_k = 0;  // hidden dim (AE-SCL*), SVD k (SCL-MI), 0 (No-DA)
  double dev_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<int> predictions;  // on the target test set, document order
};

struct SetupResult {
  std::string source;
  std::string target;
  Method method = Method::NoDa;
  std::vector<FoldResult> per_fold;
  std::vector<int> gold;  // target test labels, document order
  double mean_test_accuracy = 0.0;
};

struct ContingencyTable {
  long b = 0;  // model A correct, B wrong
  long c = 0;  // model A wrong, B correct
};

struct McNemarResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

struct GridPoint {
  int pivots = 0;
  int hidden_or_k = 0;
  double dev_accuracy = 0.0;
};

struct ClassDisagreements {
  long a_only_positive = 0;
  long a_only_negative = 0;
  long b_only_positive = 0;
  long b_only_negative = 0;
};

// Full per-fold pipeline with grid search on the source dev set.
SetupResult run_setup(const Corpus& source_labeled, const Corpus& source_unlabeled,
                      const Corpus& target_unlabeled, const Corpus& target_test,
                      const ExperimentConfig& config);

// Index of the dev-accuracy argmax; ties prefer smaller pivots, then smaller
// hidden/SVD dimension.
std::size_t tune_hyperparams(const std::vector<GridPoint>& grid);

// Continuity-corrected chi-square by default; exact two-sided binomial when
// `exact` is set (intended for small b+c).
McNemarResult mcnemar(const ContingencyTable& table, bool exact = false);

// Significant iff p < alpha in every fold.
bool setup_significance(const std::vector<ContingencyTable>& per_fold_tables, double alpha,
                        bool exact = false);

ContingencyTable contingency(const std::vector<int>& gold, const std::vector<int>& preds_a,
                             const std::vector<int>& preds_b);

ClassDisagreements class_disagreements(const std::vector<int>& gold, const std::vector<int>& preds_a,
                                       const std::vector<int>& preds_b);

// rank_A - rank_B of the queried pair's cosine among all pairwise cosines
// (rank 1 = most similar; ties share the lower rank).
long similarity_rank_diff(const std::vector<Eigen::VectorXd>& reprs_a,
                          const std::vector<Eigen::VectorXd>& reprs_b, int doc_i, int doc_j);

// Stable-order result files.
void write_results_tsv(const std::vector<SetupResult>& results, const std::string& path);
void write_summary_json(const std::vector<SetupResult>& results, double alpha, bool exact_mcnemar,
                        const std::string& path);

}  // namespace pivotrepr
