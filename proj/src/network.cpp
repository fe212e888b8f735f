#include "evonet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "evonet/errors.hpp"
#include "evonet/fitness.hpp"

namespace evonet {

namespace {

struct ForwardPass {
  std::vector<Matrix> pre;   // Z_i, one per hidden layer
  std::vector<Matrix> post;  // R_0 = X, then R_i = f_i(Z_i)
  Matrix logits;
  Matrix probs;
};

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - m).exp();
    probs.row(i) = e / e.sum();
  }
  return probs;
}

ForwardPass forward_all(const NetworkStack& stack, const Matrix& X) {
  ForwardPass fp;
  fp.post.push_back(X);
  for (const auto& layer : stack.layers) {
    if (fp.post.back().cols() != layer.input_dim())
      throw NumericError("network forward: layer dimension mismatch");
    fp.pre.push_back(fp.post.back() * layer.weights.transpose());
    fp.post.push_back(apply_activation(layer.activation, fp.pre.back()));
  }
  if (fp.post.back().cols() != stack.head_weights.cols())
    throw NumericError("network forward: head dimension mismatch");
  fp.logits = (fp.post.back() * stack.head_weights.transpose()).rowwise() +
              stack.head_bias.transpose();
  fp.probs = softmax_rows(fp.logits);
  return fp;
}

double dataset_ccr(const NetworkStack& stack, const Matrix& X, const std::vector<int>& y) {
  return ccr(predict(stack, X), y);
}

}  // namespace

NetworkStack assemble(const std::vector<LayerPhenotype>& layers, int num_classes, RngStream& rng) {
  if (layers.empty()) throw NumericError("assemble: need at least one layer");
  if (num_classes < 2) throw NumericError("assemble: need at least two classes");
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (layers[i].input_dim() != layers[i - 1].output_dim())
      throw NumericError("assemble: layer " + std::to_string(i) + " does not chain");
  }
  NetworkStack stack;
  stack.layers = layers;
  const Eigen::Index k_p = layers.back().output_dim();
  const double bound = 4.0 * std::sqrt(6.0) / std::sqrt(static_cast<double>(k_p + num_classes));
  stack.head_weights.resize(num_classes, k_p);
  for (Eigen::Index i = 0; i < stack.head_weights.rows(); ++i)
    for (Eigen::Index j = 0; j < stack.head_weights.cols(); ++j)
      stack.head_weights(i, j) = rng.uniform(-bound, bound);
  stack.head_bias = Vector::Zero(num_classes);
  return stack;
}

NetworkStack random_reinit(const NetworkStack& reference, RngStream& rng) {
  NetworkStack stack = reference;
  for (auto& layer : stack.layers) {
    const double bound =
        4.0 * std::sqrt(6.0) /
        std::sqrt(static_cast<double>(layer.input_dim() + layer.output_dim()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
        layer.weights(i, j) = rng.uniform(-bound, bound);
  }
  const Eigen::Index k_p = stack.layers.back().output_dim();
  const int c = stack.num_classes();
  const double bound = 4.0 * std::sqrt(6.0) / std::sqrt(static_cast<double>(k_p + c));
  for (Eigen::Index i = 0; i < stack.head_weights.rows(); ++i)
    for (Eigen::Index j = 0; j < stack.head_weights.cols(); ++j)
      stack.head_weights(i, j) = rng.uniform(-bound, bound);
  stack.head_bias.setZero();
  return stack;
}

Matrix softmax_forward(const NetworkStack& stack, const Matrix& X) {
  return forward_all(stack, X).probs;
}

double cross_entropy_loss(const Matrix& probs, const std::vector<int>& y) {
  if (static_cast<std::size_t>(probs.rows()) != y.size())
    throw NumericError("cross_entropy_loss: row/label count mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    if (label < 0 || label >= probs.cols())
      throw NumericError("cross_entropy_loss: label " + std::to_string(label) + " out of range");
    total -= std::log(std::max(probs(i, label), 1e-12));
  }
  return total / static_cast<double>(probs.rows());
}

Gradients backprop_gradients(const NetworkStack& stack, const Matrix& X, const std::vector<int>& y) {
  if (X.rows() == 0) throw NumericError("backprop_gradients: empty batch");
  const ForwardPass fp = forward_all(stack, X);
  const auto batch = static_cast<double>(X.rows());

  Matrix dlogits = fp.probs;
  for (Eigen::Index i = 0; i < dlogits.rows(); ++i) {
    const int label = y[static_cast<std::size_t>(i)];
    if (label < 0 || label >= dlogits.cols())
      throw NumericError("backprop_gradients: label out of range");
    dlogits(i, label) -= 1.0;
  }
  dlogits /= batch;

  Gradients grads;
  grads.head_weights = dlogits.transpose() * fp.post.back();
  grads.head_bias = dlogits.colwise().sum().transpose();

  Matrix dr = dlogits * stack.head_weights;  // gradient w.r.t. R_p
  grads.layer_weights.resize(stack.layers.size());
  for (std::size_t li = stack.layers.size(); li-- > 0;) {
    const Matrix dz =
        dr.cwiseProduct(apply_activation_derivative(stack.layers[li].activation, fp.pre[li]));
    grads.layer_weights[li] = dz.transpose() * fp.post[li];
    if (li > 0) dr = dz * stack.layers[li].weights;
  }
  return grads;
}

std::pair<NetworkStack, TrainHistory> finetune(const NetworkStack& stack, const Dataset& train,
                                               const TrainConfig& cfg, RngStream& rng,
                                               bool freeze_hidden) {
  if (cfg.batch_size < 1 || cfg.learning_rate <= 0.0 || cfg.patience < 1)
    throw ConfigError("finetune: invalid training configuration");
  if (train.size() < cfg.batch_size)
    throw DataError("finetune: dataset smaller than one batch");
  if (cfg.validation_fraction <= 0.0 || cfg.validation_fraction >= 1.0)
    throw ConfigError("finetune: validation_fraction must lie in (0, 1)");

  const auto parts = split(train, {cfg.validation_fraction}, rng, /*return_remainder=*/true);
  const Dataset& valid = parts[0];
  const Dataset& fit = parts[1];

  NetworkStack current = stack;
  auto epoch_record = [&](int epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_ccr = dataset_ccr(current, fit.X, fit.y);
    rec.valid_ccr = dataset_ccr(current, valid.X, valid.y);
    rec.loss = cross_entropy_loss(softmax_forward(current, fit.X), fit.y);
    return rec;
  };

  TrainHistory history;
  history.epochs.push_back(epoch_record(0));
  NetworkStack best = current;
  double best_valid = history.epochs[0].valid_ccr;
  history.best_epoch = 0;
  int epochs_since_best = 0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(fit.size()));
  for (Eigen::Index i = 0; i < fit.size(); ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto count =
          std::min(static_cast<std::size_t>(cfg.batch_size), order.size() - start);
      Matrix xb(static_cast<Eigen::Index>(count), fit.dim());
      std::vector<int> yb(count);
      for (std::size_t i = 0; i < count; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = fit.X.row(order[start + i]);
        yb[i] = fit.y[static_cast<std::size_t>(order[start + i])];
      }
      const Gradients grads = backprop_gradients(current, xb, yb);
      current.head_weights -= cfg.learning_rate * grads.head_weights;
      current.head_bias -= cfg.learning_rate * grads.head_bias;
      if (!freeze_hidden) {
        for (std::size_t li = 0; li < current.layers.size(); ++li)
          current.layers[li].weights -= cfg.learning_rate * grads.layer_weights[li];
      }
    }
    const EpochRecord rec = epoch_record(epoch);
    history.epochs.push_back(rec);
    if (rec.valid_ccr > best_valid) {
      best_valid = rec.valid_ccr;
      best = current;
      history.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }
  return {std::move(best), std::move(history)};
}

std::vector<int> predict(const NetworkStack& stack, const Matrix& X) {
  const Matrix probs = softmax_forward(stack, X);
  std::vector<int> labels(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    int best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > probs(i, best)) best = static_cast<int>(c);
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

Vector activation_maximization(const NetworkStack& stack, int depth, int unit, int iterations,
                               double learning_rate, RngStream& rng, std::vector<double>* trace) {
  if (depth < 1 || depth > static_cast<int>(stack.layers.size()))
    throw NumericError("activation_maximization: depth out of range");
  const auto& target = stack.layers[static_cast<std::size_t>(depth - 1)];
  if (unit < 0 || unit >= target.output_dim())
    throw NumericError("activation_maximization: unit out of range");

  const Eigen::Index d = stack.layers.front().input_dim();
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = rng.normal();
  x.normalize();

  const Eigen::RowVectorXd unit_row = target.weights.row(unit);
  for (int it = 0; it < iterations; ++it) {
    // Forward through the layers below the target, keeping pre-activations.
    std::vector<Vector> pre;
    Vector r = x;
    for (int li = 0; li < depth - 1; ++li) {
      const auto& layer = stack.layers[static_cast<std::size_t>(li)];
      pre.push_back(layer.weights * r);
      r = pre.back().unaryExpr(activation_function(layer.activation).forward);
    }
    const double objective = unit_row.dot(r);
    if (trace) trace->push_back(objective);

    Vector g = unit_row.transpose();
    for (int li = depth - 2; li >= 0; --li) {
      const auto& layer = stack.layers[static_cast<std::size_t>(li)];
      const Vector dz = g.cwiseProduct(
          pre[static_cast<std::size_t>(li)].unaryExpr(activation_function(layer.activation).derivative));
      g = layer.weights.transpose() * dz;
    }
    x += learning_rate * g;
    const double norm = x.norm();
    if (norm < 1e-12) {
      for (Eigen::Index i = 0; i < d; ++i) x[i] = rng.normal();
      x.normalize();
    } else {
      x /= norm;
    }
  }
  return x;
}

nlohmann::json phenotypes_to_json(const std::vector<LayerPhenotype>& layers) {
  nlohmann::json j;
  j["version"] = 1;
  auto& arr = j["layers"] = nlohmann::json::array();
  for (const auto& layer : layers) {
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      std::vector<double> row(layer.weights.cols());
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = layer.weights(r, c);
      weights.push_back(row);
    }
    arr.push_back({{"weights", std::move(weights)}, {"activation", activation_name(layer.activation)}});
  }
  return j;
}

namespace {

Matrix matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty()) throw DataError("model: weight matrix must be a non-empty array");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw DataError("model: ragged weight matrix");
    for (Eigen::Index jx = 0; jx < c; ++jx) m(i, jx) = row.at(static_cast<std::size_t>(jx)).get<double>();
  }
  return m;
}

}  // namespace

std::vector<LayerPhenotype> phenotypes_from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1) throw DataError("model: unsupported schema version");
  std::vector<LayerPhenotype> layers;
  for (const auto& item : j.at("layers")) {
    LayerPhenotype layer;
    layer.weights = matrix_from_json(item.at("weights"));
    layer.activation = activation_from_name(item.at("activation").get<std::string>());
    layers.push_back(std::move(layer));
  }
  return layers;
}

nlohmann::json stack_to_json(const NetworkStack& stack) {
  nlohmann::json j = phenotypes_to_json(stack.layers);
  nlohmann::json head;
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index r = 0; r < stack.head_weights.rows(); ++r) {
    std::vector<double> row(stack.head_weights.cols());
    for (Eigen::Index c = 0; c < stack.head_weights.cols(); ++c) row[static_cast<std::size_t>(c)] = stack.head_weights(r, c);
    weights.push_back(row);
  }
  head["weights"] = std::move(weights);
  head["bias"] = std::vector<double>(stack.head_bias.data(), stack.head_bias.data() + stack.head_bias.size());
  j["head"] = std::move(head);
  return j;
}

NetworkStack stack_from_json(const nlohmann::json& j) {
  NetworkStack stack;
  stack.layers = phenotypes_from_json(j);
  const auto& head = j.at("head");
  stack.head_weights = matrix_from_json(head.at("weights"));
  const auto bias = head.at("bias").get<std::vector<double>>();
  stack.head_bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
  if (stack.head_weights.rows() != stack.head_bias.size())
    throw DataError("model: head weight/bias shapes disagree");
  return stack;
}

void write_train_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write train history csv " + path.string());
  out << "epoch,train_ccr,valid_ccr,loss\n";
  for (const auto& rec : history.epochs)
    out << rec.epoch << ',' << rec.train_ccr << ',' << rec.valid_ccr << ',' << rec.loss << '\n';
}

}  // namespace evonet
