#include "evonet/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "evonet/errors.hpp"

namespace evonet {

Matrix forward_layer(const LayerPhenotype& layer, const Matrix& X) {
  if (X.cols() != layer.input_dim())
    throw NumericError("forward_layer: input has " + std::to_string(X.cols()) +
                       " columns, layer expects " + std::to_string(layer.input_dim()));
  return apply_activation(layer.activation, X * layer.weights.transpose());
}

Matrix forward_stack(const std::vector<LayerPhenotype>& layers, const Matrix& X) {
  Matrix r = X;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (r.cols() != layers[i].input_dim())
      throw NumericError("forward_stack: dimension mismatch at layer " + std::to_string(i));
    r = forward_layer(layers[i], r);
  }
  return r;
}

LinearSvmModel train_linear_svm(const Matrix& R, const std::vector<int>& y, RngStream& rng,
                                const SvmParams& params) {
  if (static_cast<std::size_t>(R.rows()) != y.size())
    throw NumericError("train_linear_svm: feature/label count mismatch");
  std::vector<int> classes(y);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw DataError("train_linear_svm: need at least 2 classes");

  const Eigen::Index n = R.rows(), d = R.cols();
  LinearSvmModel model;
  model.classes = classes;
  model.weights = Matrix::Zero(static_cast<Eigen::Index>(classes.size()), d);
  model.bias = Vector::Zero(static_cast<Eigen::Index>(classes.size()));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (std::size_t c = 0; c < classes.size(); ++c) {
    Vector w = Vector::Zero(d);
    double bias = 0.0;
    long t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(order);
      for (const auto i : order) {
        ++t;
        const double eta = 1.0 / (params.lambda * static_cast<double>(t));
        const double target = y[static_cast<std::size_t>(i)] == classes[c] ? 1.0 : -1.0;
        const double margin = target * (w.dot(R.row(i)) + bias);
        w *= (1.0 - eta * params.lambda);
        if (margin < 1.0) {
          w += eta * target * R.row(i).transpose();
          bias += eta * target;  // bias stays unregularized
        }
      }
    }
    model.weights.row(static_cast<Eigen::Index>(c)) = w.transpose();
    model.bias[static_cast<Eigen::Index>(c)] = bias;
  }
  return model;
}

std::vector<int> svm_predict(const LinearSvmModel& model, const Matrix& R) {
  const Matrix scores = R * model.weights.transpose();
  std::vector<int> pred(static_cast<std::size_t>(R.rows()));
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    Eigen::Index best = 0;
    double best_score = scores(i, 0) + model.bias[0];
    for (Eigen::Index c = 1; c < model.bias.size(); ++c) {
      const double s = scores(i, c) + model.bias[c];
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    pred[static_cast<std::size_t>(i)] = model.classes[static_cast<std::size_t>(best)];
  }
  return pred;
}

double ccr(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw NumericError("ccr: length mismatch");
  if (predicted.empty()) throw NumericError("ccr: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

LabeledSubset sample_eval_subset(const Matrix& X, const std::vector<int>& y, double fraction,
                                 RngStream& rng) {
  if (fraction <= 0.0 || fraction > 1.0) throw NumericError("sample_eval_subset: fraction out of (0, 1]");
  const auto n = static_cast<Eigen::Index>(y.size());

  std::map<int, std::vector<Eigen::Index>> by_class;
  for (Eigen::Index i = 0; i < n; ++i) by_class[y[static_cast<std::size_t>(i)]].push_back(i);
  bool stratify = by_class.size() >= 2;
  for (const auto& [label, rows] : by_class)
    if (fraction * static_cast<double>(rows.size()) < 1.0) stratify = false;

  std::vector<Eigen::Index> chosen;
  if (stratify) {
    for (auto& [label, rows] : by_class) {
      const auto k = static_cast<Eigen::Index>(
          std::lround(fraction * static_cast<double>(rows.size())));
      const auto pick = rng.sample_without_replacement(static_cast<Eigen::Index>(rows.size()),
                                                       std::max<Eigen::Index>(k, 1));
      for (auto p : pick) chosen.push_back(rows[static_cast<std::size_t>(p)]);
    }
  } else {
    const auto k = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::lround(fraction * static_cast<double>(n))));
    chosen = rng.sample_without_replacement(n, k);
  }
  std::sort(chosen.begin(), chosen.end());

  LabeledSubset subset;
  subset.X.resize(static_cast<Eigen::Index>(chosen.size()), X.cols());
  subset.y.reserve(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    subset.X.row(static_cast<Eigen::Index>(i)) = X.row(chosen[i]);
    subset.y.push_back(y[static_cast<std::size_t>(chosen[i])]);
  }
  subset.indices = std::move(chosen);
  return subset;
}

double fitness_on_subset(const Chromosome& chrom, const BasisSet& basis, const Matrix& upstream_eval,
                         const std::vector<int>& y_eval, RngStream& rng, const SvmParams& params) {
  LayerPhenotype layer;
  try {
    layer = decode(chrom, basis);
  } catch (const NumericError&) {
    return 0.0;  // degenerate decode
  }
  const Matrix features = forward_layer(layer, upstream_eval);
  try {
    const LinearSvmModel model = train_linear_svm(features, y_eval, rng, params);
    return ccr(svm_predict(model, features), y_eval);
  } catch (const DataError&) {
    return 0.0;  // single-class evaluation subset
  }
}

double fitness_of(const Chromosome& chrom, const BasisSet& basis, const Matrix& X,
                  const std::vector<int>& y, const std::vector<LayerPhenotype>& upstream,
                  double eval_fraction, RngStream& rng, const SvmParams& params) {
  const LabeledSubset subset = sample_eval_subset(X, y, eval_fraction, rng);
  const Matrix upstream_eval = forward_stack(upstream, subset.X);
  return fitness_on_subset(chrom, basis, upstream_eval, subset.y, rng, params);
}

}  // namespace evonet
