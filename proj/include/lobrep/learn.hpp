#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "lobrep/matrix.hpp"

namespace lobrep {

enum class ModelKind : std::uint8_t { Linear, Mlp };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts linear, mlp.
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{100, 50};  // ignored for linear
  std::size_t classes = 3;
  std::uint64_t seed = 0;
};

/// Fully connected layer; weight is stored in x out, row-major.
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  friend bool operator==(const Dense&, const Dense&) = default;
};

/// Softmax classifier: a single linear layer, or ReLU hidden layers
/// followed by a linear output layer.
class Model {
 public:
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  std::vector<Dense>& layers() noexcept { return layers_; }
  const std::vector<Dense>& layers() const noexcept { return layers_; }

  /// Class probabilities for one input. Throws DimMismatch.
  std::vector<double> forward(std::span<const double> x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;

  std::size_t parameter_count() const noexcept;
  /// Layer by layer: weight (in x out) then bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  friend bool operator==(const Model& a, const Model& b) { return a.layers_ == b.layers_; }

 private:
  ModelSpec spec_;
  std::vector<Dense> layers_;
};

/// Mean cross-entropy over the rows of x.
double loss(const Model& model, const Matrix& x, std::span<const int> y);

/// Analytic gradient of the mean cross-entropy, shaped like model.layers().
std::vector<Dense> gradient(const Model& model, const Matrix& x, std::span<const int> y,
                            double* loss_out = nullptr);

struct Dataset {
  Matrix x;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
};

enum class Optimizer : std::uint8_t { Adam, Momentum };

std::string_view to_string(Optimizer opt) noexcept;
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  Optimizer optimizer = Optimizer::Adam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::size_t epochs = 30;
  /// Epochs without validation F-score improvement before stopping; 0 disables.
  std::size_t patience = 5;
  double momentum = 0.9;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_fscore;
  std::size_t best_epoch = 0;
  double best_val_fscore = -1;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

/// Mini-batch training; returns the checkpoint with the best validation
/// macro F-score (training F-score when val is empty). Deterministic given
/// spec.seed. Throws Diverged on a non-finite loss.
TrainResult train(ModelSpec spec, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg);

}  // namespace lobrep
