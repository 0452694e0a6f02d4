#include "pivotrepr/netrepr.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

namespace pivotrepr {

namespace {

constexpr double kProbClip = 1e-7;

Eigen::VectorXd sum_active_columns(const Eigen::MatrixXd& m, const SparseBinaryVector& x) {
  Eigen::VectorXd pre = Eigen::VectorXd::Zero(m.rows());
  for (int i : x.active) pre += m.col(i);
  return pre;
}

// Shared backprop core: output-layer and hidden-layer deltas for one example.
struct Deltas {
  Eigen::VectorXd h;
  Eigen::VectorXd o;
  Eigen::VectorXd r_delta;  // (o - x_p) / |f_p|
  Eigen::VectorXd h_delta;  // dL/d(pre-activation of h)
};

Deltas backprop_deltas(const ReprModel& model, const SparseBinaryVector& x_np,
                       const SparseBinaryVector& x_p) {
  auto [h, o] = forward(model, x_np);
  Deltas d;
  d.h = std::move(h);
  d.o = std::move(o);
  d.r_delta = d.o;
  for (int k : x_p.active) d.r_delta[k] -= 1.0;
  d.r_delta /= static_cast<double>(model.num_pivots());
  d.h_delta = (model.w_r.transpose() * d.r_delta).cwiseProduct(
      d.h.cwiseProduct(Eigen::VectorXd::Ones(d.h.size()) - d.h));
  return d;
}

}  // namespace

ReprModel init_model(int hidden_dim, const FeatureSpace& space, DecoderMode mode,
                     const Eigen::MatrixXd* decoder, std::uint64_t seed, double init_scale) {
  const int n_np = space.num_nonpivots();
  const int n_p = space.num_pivots;
  if (hidden_dim < 1) throw std::invalid_argument("init_model: hidden_dim must be >= 1");

  ReprModel model;
  model.mode = mode;
  const double scale = init_scale > 0.0 ? init_scale : 1.0 / std::sqrt(std::max(1, n_np));
  Rng rng(derive_seed(seed, "repr-init"));
  model.w_h.resize(hidden_dim, n_np);
  for (int j = 0; j < hidden_dim; ++j)
    for (int i = 0; i < n_np; ++i) model.w_h(j, i) = rng.uniform(-scale, scale);

  if (mode == DecoderMode::Frozen) {
    if (!decoder) throw std::invalid_argument("init_model: frozen mode requires a decoder matrix");
    if (decoder->rows() != n_p)
      throw std::invalid_argument("init_model: decoder row count does not match pivot count");
    if (decoder->cols() != hidden_dim)
      throw std::invalid_argument("init_model: hidden_dim must equal the embedding dimension");
    model.w_r = *decoder;
  } else {
    model.w_r.resize(n_p, hidden_dim);
    for (int k = 0; k < n_p; ++k)
      for (int j = 0; j < hidden_dim; ++j) model.w_r(k, j) = rng.uniform(-scale, scale);
  }
  return model;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> forward(const ReprModel& model,
                                                    const SparseBinaryVector& x_np) {
  if (x_np.dimension != model.num_nonpivots())
    throw std::invalid_argument("forward: x_np dimension mismatch");
  Eigen::VectorXd h = sum_active_columns(model.w_h, x_np).unaryExpr([](double z) { return sigmoid(z); });
  Eigen::VectorXd o = (model.w_r * h).unaryExpr([](double z) { return sigmoid(z); });
  return {std::move(h), std::move(o)};
}

double repr_loss(const Eigen::VectorXd& o, const SparseBinaryVector& x_p) {
  if (o.size() != x_p.dimension) throw std::invalid_argument("repr_loss: dimension mismatch");
  double total = 0.0;
  std::size_t next_active = 0;
  for (int k = 0; k < o.size(); ++k) {
    const double p = std::clamp(o[k], kProbClip, 1.0 - kProbClip);
    const bool on = next_active < x_p.active.size() && x_p.active[next_active] == k;
    if (on) ++next_active;
    total += on ? std::log(p) : std::log(1.0 - p);
  }
  return -total / static_cast<double>(o.size());
}

ReprGradients gradients(const ReprModel& model, const SparseBinaryVector& x_np,
                        const SparseBinaryVector& x_p) {
  if (x_np.dimension != model.num_nonpivots() || x_p.dimension != model.num_pivots())
    throw std::invalid_argument("gradients: dimension mismatch");
  const Deltas d = backprop_deltas(model, x_np, x_p);

  ReprGradients g;
  g.grad_w_h = Eigen::MatrixXd::Zero(model.w_h.rows(), model.w_h.cols());
  for (int i : x_np.active) g.grad_w_h.col(i) = d.h_delta;
  if (model.mode == DecoderMode::Trainable) g.grad_w_r = d.r_delta * d.h.transpose();
  return g;
}

Eigen::VectorXd encode(const ReprModel& model, const SparseBinaryVector& x_np) {
  if (x_np.dimension != model.num_nonpivots())
    throw std::invalid_argument("encode: x_np dimension mismatch");
  return sum_active_columns(model.w_h, x_np);
}

std::pair<ReprModel, TrainReport> train(const ReprModel& model,
                                        const std::vector<ReprExample>& train_docs,
                                        const std::vector<ReprExample>& validation_docs,
                                        const SgdConfig& config, ValidationLossFn validation_loss) {
  if (train_docs.empty() || validation_docs.empty())
    throw std::invalid_argument("train: empty training or validation set");

  ReprModel current = model;
  TrainReport report;
  if (config.max_epochs <= 0) return {current, report};

  Eigen::MatrixXd v_h = Eigen::MatrixXd::Zero(current.w_h.rows(), current.w_h.cols());
  Eigen::MatrixXd v_r;
  const bool trainable = current.mode == DecoderMode::Trainable;
  if (trainable) v_r = Eigen::MatrixXd::Zero(current.w_r.rows(), current.w_r.cols());

  auto mean_validation_loss = [&](const ReprModel& m, int epoch) -> double {
    if (validation_loss) return validation_loss(m, epoch);
    double sum = 0.0;
    for (const auto& ex : validation_docs) sum += repr_loss(forward(m, ex.x_np).second, ex.x_p);
    return sum / static_cast<double>(validation_docs.size());
  };

  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, "repr-train"));

  ReprModel snapshot = current;  // weights at the start of the running epoch
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    snapshot = current;
    rng.shuffle(order);

    double train_loss_sum = 0.0;
    for (std::size_t idx : order) {
      const auto& ex = train_docs[idx];
      const Deltas d = backprop_deltas(current, ex.x_np, ex.x_p);
      train_loss_sum += repr_loss(d.o, ex.x_p);

      if (trainable) {
        v_r = config.momentum * v_r -
              config.learning_rate * (d.r_delta * d.h.transpose() + config.weight_decay * current.w_r);
        current.w_r += v_r;
      }
      v_h = config.momentum * v_h - (config.learning_rate * config.weight_decay) * current.w_h;
      for (int i : ex.x_np.active) v_h.col(i) -= config.learning_rate * d.h_delta;
      current.w_h += v_h;
    }

    report.train_loss_curve.push_back(train_loss_sum / static_cast<double>(train_docs.size()));
    report.validation_loss_curve.push_back(mean_validation_loss(current, epoch));
    report.epochs_run = epoch;

    if (epoch >= 2 && report.validation_loss_curve[epoch - 1] > report.validation_loss_curve[epoch - 2]) {
      report.stopped_early = true;
      return {snapshot, report};
    }
  }
  return {current, report};
}

std::string repr_model_to_json(const ReprModel& model) {
  nlohmann::json obj;
  obj["format_version"] = 1;
  obj["mode"] = model.mode == DecoderMode::Frozen ? "frozen_decoder" : "trainable_decoder";
  obj["hidden_dim"] = model.hidden_dim();
  obj["num_pivots"] = model.num_pivots();
  obj["num_nonpivots"] = model.num_nonpivots();
  std::vector<double> w_h, w_r;
  for (int j = 0; j < model.w_h.rows(); ++j)
    for (int i = 0; i < model.w_h.cols(); ++i) w_h.push_back(model.w_h(j, i));
  for (int k = 0; k < model.w_r.rows(); ++k)
    for (int j = 0; j < model.w_r.cols(); ++j) w_r.push_back(model.w_r(k, j));
  obj["w_h"] = w_h;
  obj["w_r"] = w_r;
  return obj.dump();
}

ReprModel repr_model_from_json(const std::string& json_text) {
  const auto obj = nlohmann::json::parse(json_text);
  if (obj.at("format_version").get<int>() != 1)
    throw std::runtime_error("repr_model_from_json: unsupported format_version");
  ReprModel model;
  const std::string mode = obj.at("mode").get<std::string>();
  if (mode == "frozen_decoder")
    model.mode = DecoderMode::Frozen;
  else if (mode == "trainable_decoder")
    model.mode = DecoderMode::Trainable;
  else
    throw std::runtime_error("repr_model_from_json: unknown mode " + mode);
  const int hidden = obj.at("hidden_dim").get<int>();
  const int n_p = obj.at("num_pivots").get<int>();
  const int n_np = obj.at("num_nonpivots").get<int>();
  const auto w_h = obj.at("w_h").get<std::vector<double>>();
  const auto w_r = obj.at("w_r").get<std::vector<double>>();
  if (static_cast<int>(w_h.size()) != hidden * n_np || static_cast<int>(w_r.size()) != n_p * hidden)
    throw std::runtime_error("repr_model_from_json: weight array size mismatch");
  model.w_h.resize(hidden, n_np);
  model.w_r.resize(n_p, hidden);
  for (int j = 0; j < hidden; ++j)
    for (int i = 0; i < n_np; ++i) model.w_h(j, i) = w_h[static_cast<std::size_t>(j) * n_np + i];
  for (int k = 0; k < n_p; ++k)
    for (int j = 0; j < hidden; ++j) model.w_r(k, j) = w_r[static_cast<std::size_t>(k) * hidden + j];
  return model;
}

}  // namespace pivotrepr
