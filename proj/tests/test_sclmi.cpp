#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "pivotrepr/sclmi.hpp"

using namespace pivotrepr;

namespace {

FeatureSpace space_stub(int n_pivots, int n_nonpivots) {
  FeatureSpace space;
  space.num_pivots = n_pivots;
  for (int i = 0; i < n_pivots + n_nonpivots; ++i) {
    space.feature_keys.push_back("f" + std::to_string(i));
    space.index_of.emplace(space.feature_keys.back(), i);
    space.counts.emplace(space.feature_keys.back(), DomainCounts{10, 10});
  }
  return space;
}

// Independent oracle: singular values/left vectors of M from a hand-rolled
// cyclic Jacobi eigensolver on the symmetric matrix M*M^T.
struct JacobiResult {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXd U;                // columns aligned with singular_values
};

JacobiResult jacobi_svd_oracle(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd A = M * M.transpose();
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
        J(p, p) = c;
        J(q, q) = c;
        J(p, q) = s;
        J(q, p) = -s;
        A = J.transpose() * A * J;
        V = V * J;
      }
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return A(a, a) > A(b, b); });
  JacobiResult result;
  result.singular_values.resize(n);
  result.U.resize(n, n);
  for (int i = 0; i < n; ++i) {
    result.singular_values[i] = std::sqrt(std::max(0.0, A(order[i], order[i])));
    result.U.col(i) = V.col(order[i]);
  }
  return result;
}

}  // namespace

TEST_CASE("train_pivot_predictors learns predictive signs") {
  // non-pivot 0 on <=> pivot 0 on; non-pivot 1 on <=> pivot 0 off
  const FeatureSpace space = space_stub(1, 2);
  std::vector<ReprExample> docs;
  for (int i = 0; i < 200; ++i) {
    ReprExample ex;
    const bool on = i % 2 == 0;
    ex.x_p = SparseBinaryVector{1, on ? std::vector<int>{0} : std::vector<int>{}};
    ex.x_np = SparseBinaryVector{2, on ? std::vector<int>{0} : std::vector<int>{1}};
    docs.push_back(ex);
  }
  const PivotPredictorMatrix pred = train_pivot_predictors(docs, space, 1e-4, 10, 7);
  REQUIRE(pred.W.rows() == 2);
  REQUIRE(pred.W.cols() == 1);
  CHECK(pred.W(0, 0) > 0.2);
  CHECK(pred.W(1, 0) < -0.2);
}

TEST_CASE("train_pivot_predictors is deterministic and l2 shrinks weights") {
  const FeatureSpace space = space_stub(2, 4);
  std::vector<ReprExample> docs;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    ReprExample ex;
    ex.x_p.dimension = 2;
    ex.x_np.dimension = 4;
    for (int k = 0; k < 2; ++k)
      if (rng.uniform() < 0.4) ex.x_p.active.push_back(k);
    for (int k = 0; k < 4; ++k)
      if (rng.uniform() < 0.4) ex.x_np.active.push_back(k);
    docs.push_back(ex);
  }
  const PivotPredictorMatrix a = train_pivot_predictors(docs, space, 1e-4, 5, 9);
  const PivotPredictorMatrix b = train_pivot_predictors(docs, space, 1e-4, 5, 9);
  CHECK(a.W == b.W);

  const PivotPredictorMatrix tight = train_pivot_predictors(docs, space, 10.0, 5, 9);
  CHECK(tight.W.norm() < a.W.norm());

  CHECK_THROWS_AS(train_pivot_predictors({}, space, 1e-4, 5, 9), std::invalid_argument);
}

TEST_CASE("truncated_svd recovers diagonal structure exactly") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
  M(0, 0) = 5.0;
  M(1, 1) = 3.0;
  M(2, 2) = 1.0;
  auto [U, S] = truncated_svd(M, 2, 1);
  REQUIRE(U.cols() == 2);
  REQUIRE(S.size() == 2);
  CHECK(S[0] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(S[1] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::abs(U(0, 0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(U(1, 1)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("truncated_svd on a rank-1 matrix") {
  const Eigen::VectorXd u = (Eigen::VectorXd(3) << 2.0, -1.0, 2.0).finished() / 3.0;
  const Eigen::VectorXd v = (Eigen::VectorXd(5) << 1, 1, 1, 1, 1).finished() / std::sqrt(5.0);
  const Eigen::MatrixXd M = 7.0 * u * v.transpose();
  auto [U, S] = truncated_svd(M, 1, 2);
  CHECK(S[0] == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(std::abs(U.col(0).dot(u)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated_svd matches hand-rolled Jacobi oracle on random matrices") {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(derive_seed(100, "svdtrial", trial));
    const int rows = 5 + static_cast<int>(rng.uniform_int(10));
    const int cols = 5 + static_cast<int>(rng.uniform_int(10));
    Eigen::MatrixXd M(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) M(r, c) = rng.normal();
    const int k = 1 + static_cast<int>(rng.uniform_int(std::min(rows, cols) - 1));

    auto [U, S] = truncated_svd(M, k, trial);
    const JacobiResult oracle = jacobi_svd_oracle(M);

    REQUIRE(U.rows() == rows);
    REQUIRE(U.cols() == k);
    for (int i = 0; i < k; ++i) {
      CHECK(S[i] == doctest::Approx(oracle.singular_values[i]).epsilon(1e-6));
      if (i + 1 < static_cast<int>(oracle.singular_values.size())) {
        // only compare vectors when the gap makes them well defined
        const double gap = oracle.singular_values[i] - oracle.singular_values[i + 1];
        if (gap > 1e-3)
          CHECK(std::abs(U.col(i).dot(oracle.U.col(i))) == doctest::Approx(1.0).epsilon(1e-5));
      }
    }
    // columns are orthonormal
    const Eigen::MatrixXd gram = U.transpose() * U;
    CHECK((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("truncated_svd yields the best rank-k approximation error") {
  // matrix with a planted spectrum: clear gap after the fifth singular value
  Rng rng(17);
  const int rows = 40, cols = 60, k = 5;
  Eigen::MatrixXd A(rows, rows), B(cols, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < rows; ++c) A(r, c) = rng.normal();
  for (int r = 0; r < cols; ++r)
    for (int c = 0; c < cols; ++c) B(r, c) = rng.normal();
  const Eigen::MatrixXd Q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
  const Eigen::MatrixXd Q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(B).householderQ();
  Eigen::VectorXd spectrum = Eigen::VectorXd::Zero(rows);
  for (int i = 0; i < rows; ++i) spectrum[i] = i < k ? 10.0 - i : 0.5 / (1 + i - k);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, cols);
  D.diagonal() = spectrum;
  const Eigen::MatrixXd M = Q1 * D * Q2.transpose();

  auto [U, S] = truncated_svd(M, k, 8);
  // projection residual must match the optimal tail energy
  const double residual = (M - U * (U.transpose() * M)).squaredNorm();
  double tail = 0.0;
  for (int i = k; i < rows; ++i) tail += spectrum[i] * spectrum[i];
  CHECK(residual == doctest::Approx(tail).epsilon(1e-6));
  for (int i = 0; i < k; ++i) CHECK(S[i] == doctest::Approx(spectrum[i]).epsilon(1e-8));
}

TEST_CASE("truncated_svd is deterministic and validates k") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(30, 30);
  auto [U1, S1] = truncated_svd(M, 4, 5);
  auto [U2, S2] = truncated_svd(M, 4, 5);
  CHECK(U1 == U2);
  CHECK(S1 == S2);
  CHECK_THROWS_AS(truncated_svd(M, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(truncated_svd(M, 31, 5), std::invalid_argument);
}

TEST_CASE("make_projection and project") {
  PivotPredictorMatrix pred;
  pred.W = Eigen::MatrixXd::Zero(4, 3);
  pred.W(0, 0) = 5.0;
  pred.W(1, 1) = 3.0;
  pred.W(2, 2) = 1.0;
  const Projection proj = make_projection(pred, 2, 3);
  CHECK(proj.k == 2);
  REQUIRE(proj.theta.rows() == 2);
  REQUIRE(proj.theta.cols() == 4);
  // rows orthonormal
  const Eigen::MatrixXd gram = proj.theta * proj.theta.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

  // projecting an indicator picks the matching theta column
  const Eigen::VectorXd p0 = project(proj, SparseBinaryVector{4, {0}});
  CHECK(p0 == proj.theta.col(0));
  const Eigen::VectorXd p03 = project(proj, SparseBinaryVector{4, {0, 3}});
  CHECK((p03 - proj.theta.col(0) - proj.theta.col(3)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(project(proj, SparseBinaryVector{4, {}}).isZero());
  CHECK_THROWS_AS(project(proj, SparseBinaryVector{5, {}}), std::invalid_argument);
}

TEST_CASE("projection JSON round-trip is exact") {
  Projection proj;
  proj.k = 2;
  proj.theta = Eigen::MatrixXd::Random(2, 6);
  const Projection back = projection_from_json(projection_to_json(proj));
  CHECK(back.k == 2);
  CHECK(back.theta == proj.theta);
}
