#include "pivotrepr/classifier.hpp"

#include <cmath>

#include <json.hpp>

namespace pivotrepr {

namespace {

double margin(const Eigen::VectorXd& ws, const Eigen::VectorXd& wd, double bias,
              const HybridVector& x) {
  double z = bias;
  for (int i : x.sparse_part.active) z += ws[i];
  if (x.dense_part.size() > 0) z += wd.dot(x.dense_part);
  return z;
}

// log(1 + exp(a)) without overflow
double log1pexp(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

struct Objective {
  double value;
  Eigen::VectorXd grad_sparse;
  Eigen::VectorXd grad_dense;
  double grad_bias;
};

Objective evaluate(const std::vector<LabeledHybrid>& data, const Eigen::VectorXd& ws,
                   const Eigen::VectorXd& wd, double bias, double l2, bool with_grad) {
  const double n = static_cast<double>(data.size());
  Objective obj;
  obj.value = 0.0;
  obj.grad_bias = 0.0;
  if (with_grad) {
    obj.grad_sparse = Eigen::VectorXd::Zero(ws.size());
    obj.grad_dense = Eigen::VectorXd::Zero(wd.size());
  }
  for (const auto& [x, y] : data) {
    const double z = margin(ws, wd, bias, x);
    obj.value += log1pexp(z) - y * z;
    if (with_grad) {
      const double r = sigmoid(z) - y;
      for (int i : x.sparse_part.active) obj.grad_sparse[i] += r;
      if (x.dense_part.size() > 0) obj.grad_dense += r * x.dense_part;
      obj.grad_bias += r;
    }
  }
  obj.value = obj.value / n + 0.5 * l2 * (ws.squaredNorm() + wd.squaredNorm());
  if (with_grad) {
    obj.grad_sparse = obj.grad_sparse / n + l2 * ws;
    obj.grad_dense = obj.grad_dense / n + l2 * wd;
    obj.grad_bias /= n;
  }
  return obj;
}

}  // namespace

LogRegModel train_logreg(const std::vector<LabeledHybrid>& data, double l2, int max_iters,
                         double tolerance, std::uint64_t /*seed*/) {
  if (data.empty()) throw std::invalid_argument("train_logreg: empty data");
  int sparse_dim = data.front().first.sparse_part.dimension;
  Eigen::Index dense_dim = data.front().first.dense_part.size();
  bool has_pos = false, has_neg = false;
  for (const auto& [x, y] : data) {
    if (x.sparse_part.dimension != sparse_dim || x.dense_part.size() != dense_dim)
      throw std::invalid_argument("train_logreg: inconsistent feature dimensions");
    (y == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("train_logreg: both classes must be present");

  LogRegModel model;
  model.l2 = l2;
  model.sparse_weights = Eigen::VectorXd::Zero(sparse_dim);
  model.dense_weights = Eigen::VectorXd::Zero(dense_dim);
  model.bias = 0.0;

  constexpr double kArmijo = 1e-4;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Objective obj =
        evaluate(data, model.sparse_weights, model.dense_weights, model.bias, l2, true);
    double max_norm = std::abs(obj.grad_bias);
    if (obj.grad_sparse.size() > 0) max_norm = std::max(max_norm, obj.grad_sparse.cwiseAbs().maxCoeff());
    if (obj.grad_dense.size() > 0) max_norm = std::max(max_norm, obj.grad_dense.cwiseAbs().maxCoeff());
    if (max_norm < tolerance) break;

    const double grad_sq = obj.grad_sparse.squaredNorm() + obj.grad_dense.squaredNorm() +
                           obj.grad_bias * obj.grad_bias;
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd ws = model.sparse_weights - step * obj.grad_sparse;
      const Eigen::VectorXd wd = model.dense_weights - step * obj.grad_dense;
      const double b = model.bias - step * obj.grad_bias;
      const Objective trial = evaluate(data, ws, wd, b, l2, false);
      if (trial.value <= obj.value - kArmijo * step * grad_sq) {
        model.sparse_weights = ws;
        model.dense_weights = wd;
        model.bias = b;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow, gradient numerically flat
  }
  return model;
}

std::pair<double, int> predict(const LogRegModel& model, const HybridVector& x) {
  if (x.sparse_part.dimension != model.sparse_weights.size() ||
      x.dense_part.size() != model.dense_weights.size())
    throw std::invalid_argument("predict: dimension mismatch");
  const double p = sigmoid(margin(model.sparse_weights, model.dense_weights, model.bias, x));
  return {p, p >= 0.5 ? 1 : 0};
}

double accuracy(const LogRegModel& model, const std::vector<LabeledHybrid>& data) {
  if (data.empty()) throw std::invalid_argument("accuracy: empty data");
  long correct = 0;
  for (const auto& [x, y] : data)
    if (predict(model, x).second == y) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string logreg_to_json(const LogRegModel& model) {
  nlohmann::json obj;
  obj["format_version"] = 1;
  obj["sparse_weights"] = std::vector<double>(model.sparse_weights.begin(), model.sparse_weights.end());
  obj["dense_weights"] = std::vector<double>(model.dense_weights.begin(), model.dense_weights.end());
  obj["bias"] = model.bias;
  obj["l2"] = model.l2;
  return obj.dump();
}

LogRegModel logreg_from_json(const std::string& json_text) {
  const auto obj = nlohmann::json::parse(json_text);
  if (obj.at("format_version").get<int>() != 1)
    throw std::runtime_error("logreg_from_json: unsupported format_version");
  LogRegModel model;
  const auto ws = obj.at("sparse_weights").get<std::vector<double>>();
  const auto wd = obj.at("dense_weights").get<std::vector<double>>();
  model.sparse_weights = Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  model.dense_weights = Eigen::Map<const Eigen::VectorXd>(wd.data(), static_cast<Eigen::Index>(wd.size()));
  model.bias = obj.at("bias").get<double>();
  model.l2 = obj.at("l2").get<double>();
  return model;
}

}  // namespace pivotrepr
