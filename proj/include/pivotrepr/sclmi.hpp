#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotrepr/common.hpp"
#include "pivotrepr/features.hpp"
#include "pivotrepr/netrepr.hpp"

namespace pivotrepr {

// Column k = weight vector of pivot k's occurrence predictor over non-pivots.
struct PivotPredictorMatrix {
  Eigen::MatrixXd W;  // |f_np| x |f_p|
};

// theta has orthonormal rows; projects non-pivot vectors to k dimensions.
struct Projection {
  Eigen::MatrixXd theta;  // k x |f_np|
  int k = 0;
};

// One L2-regularized logistic predictor per pivot (no bias), trained by
// per-example SGD with a per-pivot derived seed.
PivotPredictorMatrix train_pivot_predictors(const std::vector<ReprExample>& unlabeled_vectorized,
                                            const FeatureSpace& space, double l2, int epochs,
                                            std::uint64_t seed, double learning_rate = 0.1);

// Top-k left singular vectors via seeded randomized subspace iteration
// (oversampling 10, 7 power iterations); exact for small matrices.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> truncated_svd(const Eigen::MatrixXd& M, int k,
                                                          std::uint64_t seed);

Projection make_projection(const PivotPredictorMatrix& predictors, int k, std::uint64_t seed);

Eigen::VectorXd project(const Projection& proj, const SparseBinaryVector& x_np);

std::string projection_to_json(const Projection& proj);
Projection projection_from_json(const std::string& json_text);

}  // namespace pivotrepr
