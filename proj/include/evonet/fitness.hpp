#pragma once

#include <vector>

#include "evonet/data.hpp"
#include "evonet/genome.hpp"

namespace evonet {

// One-vs-rest linear classifier; row c of weights scores class classes[c].
struct LinearSvmModel {
  Matrix weights;  // C x d
  Vector bias;     // C
  std::vector<int> classes;
};

// Rows of the training set selected for one fitness evaluation.
struct LabeledSubset {
  Matrix X;
  std::vector<int> y;
  std::vector<Eigen::Index> indices;  // ascending source row indices
};

struct SvmParams {
  int epochs = 20;
  double lambda = 1e-4;
};

// f(X W^T) applied elementwise; X is rows x n, result rows x k.
Matrix forward_layer(const LayerPhenotype& layer, const Matrix& X);

// Folds forward_layer over the layers in order; empty list returns X.
Matrix forward_stack(const std::vector<LayerPhenotype>& layers, const Matrix& X);

// Primal subgradient descent on the L2-regularized hinge loss, one binary
// classifier per class, step size 1/(lambda*t), sample order reshuffled per
// epoch from the given stream. Throws DataError when y holds fewer than two
// classes.
LinearSvmModel train_linear_svm(const Matrix& R, const std::vector<int>& y, RngStream& rng,
                                const SvmParams& params = {});

std::vector<int> svm_predict(const LinearSvmModel& model, const Matrix& R);

// Fraction of exact matches. Throws NumericError on length mismatch or empty
// input.
double ccr(const std::vector<int>& predicted, const std::vector<int>& truth);

// Samples ~fraction of the rows, stratified by class when every class has at
// least one expected sample, plain uniform otherwise. Indices are returned in
// ascending order, so fraction = 1 reproduces the input exactly.
LabeledSubset sample_eval_subset(const Matrix& X, const std::vector<int>& y, double fraction,
                                 RngStream& rng);

// Fitness core: decode the chromosome, push the pre-transformed evaluation
// rows through the candidate layer, train the SVM and return its training
// CCR. Degenerate labels give 0.
double fitness_on_subset(const Chromosome& chrom, const BasisSet& basis, const Matrix& upstream_eval,
                         const std::vector<int>& y_eval, RngStream& rng, const SvmParams& params = {});

// The five-step fitness: sample an evaluation subset, decode, compute
// representations through the upstream layers and the candidate layer, train
// the linear SVM, return its training-set CCR.
double fitness_of(const Chromosome& chrom, const BasisSet& basis, const Matrix& X,
                  const std::vector<int>& y, const std::vector<LayerPhenotype>& upstream,
                  double eval_fraction, RngStream& rng, const SvmParams& params = {});

}  // namespace evonet
