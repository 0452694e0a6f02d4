#include "pivotrepr/sclmi.hpp"

#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <json.hpp>

namespace pivotrepr {

PivotPredictorMatrix train_pivot_predictors(const std::vector<ReprExample>& unlabeled_vectorized,
                                            const FeatureSpace& space, double l2, int epochs,
                                            std::uint64_t seed, double learning_rate) {
  if (unlabeled_vectorized.empty()) throw std::invalid_argument("train_pivot_predictors: empty data");
  const int n_np = space.num_nonpivots();
  const int n_p = space.num_pivots;
  for (const auto& ex : unlabeled_vectorized)
    if (ex.x_np.dimension != n_np || ex.x_p.dimension != n_p)
      throw std::invalid_argument("train_pivot_predictors: dimension mismatch with space");

  PivotPredictorMatrix result;
  result.W.resize(n_np, n_p);

  std::vector<std::size_t> order(unlabeled_vectorized.size());
  for (int k = 0; k < n_p; ++k) {
    Rng rng(derive_seed(seed, "pivot-predictor", static_cast<std::uint64_t>(k)));
    Eigen::VectorXd w(n_np);
    for (int i = 0; i < n_np; ++i) w[i] = rng.uniform(-0.01, 0.01);

    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t idx : order) {
        const auto& ex = unlabeled_vectorized[idx];
        double z = 0.0;
        for (int i : ex.x_np.active) z += w[i];
        const double y = ex.x_p.contains(k) ? 1.0 : 0.0;
        const double g = sigmoid(z) - y;
        w *= 1.0 - learning_rate * l2;
        for (int i : ex.x_np.active) w[i] -= learning_rate * g;
      }
    }
    result.W.col(k) = w;
  }
  return result;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> truncated_svd(const Eigen::MatrixXd& M, int k,
                                                          std::uint64_t seed) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  if (k < 1 || k > std::min(rows, cols))
    throw std::invalid_argument("truncated_svd: k must be in [1, min(rows, cols)]");

  constexpr int kOversampling = 10;
  constexpr int kPowerIterations = 7;
  const int sketch = k + kOversampling;

  if (sketch >= std::min(rows, cols)) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
    return {svd.matrixU().leftCols(k), svd.singularValues().head(k)};
  }

  Rng rng(derive_seed(seed, "rsvd"));
  Eigen::MatrixXd omega(cols, sketch);
  for (int i = 0; i < cols; ++i)
    for (int j = 0; j < sketch; ++j) omega(i, j) = rng.normal();

  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(M * omega)
                          .householderQ() * Eigen::MatrixXd::Identity(rows, sketch);
  // QR after every multiply keeps the subspace numerically orthonormal.
  for (int it = 0; it < kPowerIterations; ++it) {
    Eigen::MatrixXd z = Eigen::HouseholderQR<Eigen::MatrixXd>(M.transpose() * q)
                            .householderQ() * Eigen::MatrixXd::Identity(cols, sketch);
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(M * z)
            .householderQ() * Eigen::MatrixXd::Identity(rows, sketch);
  }

  const Eigen::MatrixXd b = q.transpose() * M;  // sketch x cols
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
  return {q * svd.matrixU().leftCols(k), svd.singularValues().head(k)};
}

Projection make_projection(const PivotPredictorMatrix& predictors, int k, std::uint64_t seed) {
  auto [u, sigma] = truncated_svd(predictors.W, k, seed);
  Projection proj;
  proj.k = k;
  proj.theta = u.transpose();
  return proj;
}

Eigen::VectorXd project(const Projection& proj, const SparseBinaryVector& x_np) {
  if (x_np.dimension != proj.theta.cols()) throw std::invalid_argument("project: dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(proj.k);
  for (int i : x_np.active) out += proj.theta.col(i);
  return out;
}

std::string projection_to_json(const Projection& proj) {
  nlohmann::json obj;
  obj["format_version"] = 1;
  obj["k"] = proj.k;
  obj["cols"] = proj.theta.cols();
  std::vector<double> theta;
  for (int r = 0; r < proj.theta.rows(); ++r)
    for (int c = 0; c < proj.theta.cols(); ++c) theta.push_back(proj.theta(r, c));
  obj["theta"] = theta;
  return obj.dump();
}

Projection projection_from_json(const std::string& json_text) {
  const auto obj = nlohmann::json::parse(json_text);
  if (obj.at("format_version").get<int>() != 1)
    throw std::runtime_error("projection_from_json: unsupported format_version");
  Projection proj;
  proj.k = obj.at("k").get<int>();
  const auto cols = obj.at("cols").get<Eigen::Index>();
  const auto theta = obj.at("theta").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(theta.size()) != proj.k * cols)
    throw std::runtime_error("projection_from_json: theta size mismatch");
  proj.theta.resize(proj.k, cols);
  for (int r = 0; r < proj.k; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) proj.theta(r, c) = theta[static_cast<std::size_t>(r) * cols + c];
  return proj;
}

}  // namespace pivotrepr
