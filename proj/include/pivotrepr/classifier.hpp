#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotrepr/common.hpp"

namespace pivotrepr {

// Original binary features concatenated with the learned dense representation
// (dense part empty for No-DA).
struct HybridVector {
  SparseBinaryVector sparse_part;
  Eigen::VectorXd dense_part;
};

struct LogRegModel {
  Eigen::VectorXd sparse_weights;
  Eigen::VectorXd dense_weights;
  double bias = 0.0;
  double l2 = 1e-4;
};

using LabeledHybrid = std::pair<HybridVector, int>;

// Full-batch gradient descent with backtracking line search on the
// L2-regularized logistic objective (bias unregularized). Deterministic:
// starts from zero weights, so `seed` only fixes the interface.
LogRegModel train_logreg(const std::vector<LabeledHybrid>& data, double l2 = 1e-4,
                         int max_iters = 500, double tolerance = 1e-6, std::uint64_t seed = 0);

std::pair<double, int> predict(const LogRegModel& model, const HybridVector& x);

double accuracy(const LogRegModel& model, const std::vector<LabeledHybrid>& data);

std::string logreg_to_json(const LogRegModel& model);
LogRegModel logreg_from_json(const std::string& json_text);

}  // namespace pivotrepr
