#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotrepr/common.hpp"
#include "pivotrepr/features.hpp"

namespace pivotrepr {

enum class DecoderMode { Trainable, Frozen };

// Encoder/decoder pair: h = sigmoid(w_h * x_np), o = sigmoid(w_r * h).
// No bias terms. In Frozen mode w_r holds pre-trained pivot embeddings and is
// never updated.
struct ReprModel {
  Eigen::MatrixXd w_h;  // hidden_dim x |f_np|
  Eigen::MatrixXd w_r;  // |f_p| x hidden_dim
  DecoderMode mode = DecoderMode::Trainable;

  int hidden_dim() const { return static_cast<int>(w_h.rows()); }
  int num_nonpivots() const { return static_cast<int>(w_h.cols()); }
  int num_pivots() const { return static_cast<int>(w_r.rows()); }
};

struct SgdConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  int max_epochs = 30;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // <= 0 means 1/sqrt(|f_np|)
};

struct TrainReport {
  int epochs_run = 0;
  bool stopped_early = false;
  std::vector<double> train_loss_curve;
  std::vector<double> validation_loss_curve;
};

struct ReprExample {
  SparseBinaryVector x_np;
  SparseBinaryVector x_p;
};

struct ReprGradients {
  Eigen::MatrixXd grad_w_h;
  std::optional<Eigen::MatrixXd> grad_w_r;  // absent in Frozen mode
};

ReprModel init_model(int hidden_dim, const FeatureSpace& space, DecoderMode mode,
                     const Eigen::MatrixXd* decoder, std::uint64_t seed,
                     double init_scale = 0.0);

std::pair<Eigen::VectorXd, Eigen::VectorXd> forward(const ReprModel& model,
                                                    const SparseBinaryVector& x_np);

// Mean binary cross-entropy over pivots, in nats; o clipped to [1e-7, 1-1e-7].
double repr_loss(const Eigen::VectorXd& o, const SparseBinaryVector& x_p);

ReprGradients gradients(const ReprModel& model, const SparseBinaryVector& x_np,
                        const SparseBinaryVector& x_p);

// Per-epoch validation loss; overridable for early-stopping tests.
using ValidationLossFn = std::function<double(const ReprModel& model, int epoch)>;

// Per-example SGD with classical momentum and L2 weight decay, early-stopped
// at the first epoch whose validation loss exceeds the previous epoch's; the
// weights from before that epoch are returned.
std::pair<ReprModel, TrainReport> train(const ReprModel& model,
                                        const std::vector<ReprExample>& train_docs,
                                        const std::vector<ReprExample>& validation_docs,
                                        const SgdConfig& config,
                                        ValidationLossFn validation_loss = nullptr);

// The document representation fed downstream: w_h * x_np, no sigmoid.
Eigen::VectorXd encode(const ReprModel& model, const SparseBinaryVector& x_np);

std::string repr_model_to_json(const ReprModel& model);
ReprModel repr_model_from_json(const std::string& json_text);

}  // namespace pivotrepr
