#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evonet/data.hpp"
#include "evonet/genome.hpp"

namespace evonet {

// Evolved layers (now trainable) plus a softmax classification head. Hidden
// layers carry no biases; only the head has one.
struct NetworkStack {
  std::vector<LayerPhenotype> layers;
  Matrix head_weights;  // C x k_p
  Vector head_bias;     // C

  int num_classes() const { return static_cast<int>(head_bias.size()); }
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 100;
  int max_epochs = 100;
  int patience = 3;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  int epoch = 0;  // 0 is the pre-training state
  double train_ccr = 0.0;
  double valid_ccr = 0.0;
  double loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // index of the (first) maximum validation CCR
};

struct Gradients {
  std::vector<Matrix> layer_weights;
  Matrix head_weights;
  Vector head_bias;
};

// Copies the evolved weights as trainable parameters. Head weights are
// uniform on [-4*sqrt(6)/sqrt(k_p + C), +4*sqrt(6)/sqrt(k_p + C)], head bias
// starts at zero.
NetworkStack assemble(const std::vector<LayerPhenotype>& layers, int num_classes, RngStream& rng);

// Same architecture as `reference` but with all hidden weights re-drawn
// uniformly at the head's initialization scale; baseline for measuring the
// value of the evolved initialization.
NetworkStack random_reinit(const NetworkStack& reference, RngStream& rng);

// Hidden forward pass followed by a max-stabilized softmax over the C logits.
Matrix softmax_forward(const NetworkStack& stack, const Matrix& X);

// Mean negative log probability of the true class, log clamped at 1e-12.
double cross_entropy_loss(const Matrix& probs, const std::vector<int>& y);

// Exact analytic gradients of the mean cross-entropy over the batch with
// respect to every weight matrix and the head bias.
Gradients backprop_gradients(const NetworkStack& stack, const Matrix& X, const std::vector<int>& y);

// Mini-batch SGD with early stopping: a validation fraction is split off
// uniformly, training halts when validation CCR has not improved for
// `patience` consecutive epochs (or at max_epochs), and the parameters are
// restored to the best epoch. With freeze_hidden only the head trains.
std::pair<NetworkStack, TrainHistory> finetune(const NetworkStack& stack, const Dataset& train,
                                               const TrainConfig& cfg, RngStream& rng,
                                               bool freeze_hidden = false);

// Argmax of softmax_forward per row; ties take the lowest class index.
std::vector<int> predict(const NetworkStack& stack, const Matrix& X);

// Gradient ascent on the unit's pre-activation input at layer `depth`
// (1-based) with respect to the network input, re-projected to the unit
// sphere after every step. Records the objective per iteration when trace is
// given.
Vector activation_maximization(const NetworkStack& stack, int depth, int unit, int iterations,
                               double learning_rate, RngStream& rng,
                               std::vector<double>* trace = nullptr);

nlohmann::json phenotypes_to_json(const std::vector<LayerPhenotype>& layers);
std::vector<LayerPhenotype> phenotypes_from_json(const nlohmann::json& j);
nlohmann::json stack_to_json(const NetworkStack& stack);
NetworkStack stack_from_json(const nlohmann::json& j);

// epoch,train_ccr,valid_ccr,loss
void write_train_history_csv(const std::filesystem::path& path, const TrainHistory& history);

}  // namespace evonet
