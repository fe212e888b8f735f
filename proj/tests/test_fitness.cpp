#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evonet/data.hpp"
#include "evonet/errors.hpp"
#include "evonet/fitness.hpp"

using namespace evonet;

namespace {

LayerPhenotype make_layer(Matrix w, Activation act) { return LayerPhenotype{std::move(w), act}; }

// Best accuracy any halfplane classifier reaches on the four points; scans
// directions and all threshold gaps.
double best_linear_accuracy(const Matrix& x, const std::vector<int>& y) {
  double best = 0.0;
  for (int angle = 0; angle < 360; ++angle) {
    const double theta = angle * M_PI / 180.0;
    Eigen::Vector2d w(std::cos(theta), std::sin(theta));
    std::vector<double> proj(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) proj[static_cast<std::size_t>(i)] = w.dot(x.row(i));
    std::vector<double> cuts = proj;
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> thresholds = {cuts.front() - 1.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) thresholds.push_back((cuts[i] + cuts[i + 1]) / 2);
    thresholds.push_back(cuts.back() + 1.0);
    for (double t : thresholds) {
      int hits = 0, inverted = 0;
      for (std::size_t i = 0; i < proj.size(); ++i) {
        const int side = proj[i] > t ? 1 : 0;
        if (side == y[i]) ++hits;
        if (1 - side == y[i]) ++inverted;
      }
      best = std::max({best, hits / double(proj.size()), inverted / double(proj.size())});
    }
  }
  return best;
}

}  // namespace

TEST_CASE("forward_layer applies the rectifier") {
  Matrix w = Matrix::Identity(2, 2);
  Matrix x(1, 2);
  x << -1.0, 2.0;
  const Matrix r = forward_layer(make_layer(w, Activation::kRectifier), x);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 2.0);
}

TEST_CASE("forward_layer sigmoid of zero input is one half") {
  Matrix w = Matrix::Random(3, 4);
  const Matrix r = forward_layer(make_layer(w, Activation::kSigmoid), Matrix::Zero(2, 4));
  CHECK((r.array() - 0.5).abs().maxCoeff() < 1e-15);
}

TEST_CASE("forward_layer tanh matches the scalar-loop oracle") {
  RngStream rng(1);
  Matrix w(3, 5), x(4, 5);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-2, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-2, 2);
  const Matrix r = forward_layer(make_layer(w, Activation::kTanh), x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
      double z = 0.0;
      for (Eigen::Index j = 0; j < 5; ++j) z += x(i, j) * w(k, j);
      CHECK(r(i, k) == doctest::Approx(std::tanh(z)).epsilon(1e-12));
      CHECK(r(i, k) > -1.0);
      CHECK(r(i, k) < 1.0);
    }
  }
}

TEST_CASE("forward_layer rejects mismatched input width") {
  CHECK_THROWS_AS(forward_layer(make_layer(Matrix::Identity(2, 2), Activation::kTanh), Matrix::Zero(1, 3)),
                  NumericError);
}

TEST_CASE("forward_stack folds layers in order") {
  RngStream rng(2);
  Matrix x(3, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1, 1);

  CHECK(forward_stack({}, x) == x);

  std::vector<LayerPhenotype> layers;
  Matrix w1(3, 4), w2(2, 3);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1(i) = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2(i) = rng.uniform(-1, 1);
  layers.push_back(make_layer(w1, Activation::kTanh));
  CHECK(forward_stack(layers, x) == forward_layer(layers[0], x));

  layers.push_back(make_layer(w2, Activation::kSigmoid));
  const Matrix manual = forward_layer(layers[1], forward_layer(layers[0], x));
  CHECK((forward_stack(layers, x) - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward_stack names the offending layer") {
  std::vector<LayerPhenotype> layers = {make_layer(Matrix::Identity(4, 4), Activation::kTanh),
                                        make_layer(Matrix::Identity(3, 3), Activation::kTanh)};
  CHECK_THROWS_WITH_AS(forward_stack(layers, Matrix::Zero(1, 4)),
                       "forward_stack: dimension mismatch at layer 1", NumericError);
}

TEST_CASE("forward_stack of rectifier layers is positively homogeneous") {
  RngStream rng(3);
  std::vector<LayerPhenotype> layers;
  Matrix w1(3, 4), w2(3, 3);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1(i) = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2(i) = rng.uniform(-1, 1);
  layers.push_back(make_layer(w1, Activation::kRectifier));
  layers.push_back(make_layer(w2, Activation::kRectifier));
  Matrix x(5, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1, 1);
  const double c = 3.7;
  const Matrix scaled = forward_stack(layers, Matrix(c * x));
  const Matrix reference = c * forward_stack(layers, x);
  CHECK((scaled - reference).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("train_linear_svm separates two distant blobs") {
  RngStream rng(4);
  const Dataset blobs = gen_blobs(100, 2, 2, 10.0, rng);
  RngStream svm_rng(5);
  const LinearSvmModel model = train_linear_svm(blobs.X, blobs.y, svm_rng);
  CHECK(ccr(svm_predict(model, blobs.X), blobs.y) == 1.0);
}

TEST_CASE("train_linear_svm rejects single-class labels") {
  RngStream rng(6);
  Matrix x = Matrix::Random(10, 3);
  std::vector<int> y(10, 0);
  CHECK_THROWS_AS(train_linear_svm(x, y, rng), DataError);
}

TEST_CASE("train_linear_svm on XOR cannot beat the best linear separator") {
  Matrix x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  const std::vector<int> y = {0, 1, 1, 0};
  CHECK(best_linear_accuracy(x, y) == doctest::Approx(0.75));  // enumeration oracle
  RngStream rng(7);
  const LinearSvmModel model = train_linear_svm(x, y, rng);
  CHECK(ccr(svm_predict(model, x), y) <= 0.75);
}

TEST_CASE("ccr counts exact matches") {
  CHECK(ccr({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(ccr({1, 1}, {2, 2}) == 0.0);
  CHECK(ccr({1, 2, 3, 4}, {1, 2, 3, 0}) == 0.75);
  CHECK_THROWS_AS(ccr({1}, {1, 2}), NumericError);
}

TEST_CASE("sample_eval_subset with fraction 1 reproduces the dataset") {
  RngStream rng(8);
  const Dataset blobs = gen_blobs(40, 3, 2, 5.0, rng);
  const LabeledSubset subset = sample_eval_subset(blobs.X, blobs.y, 1.0, rng);
  REQUIRE(subset.indices.size() == 40);
  for (Eigen::Index i = 0; i < 40; ++i) CHECK(subset.indices[static_cast<std::size_t>(i)] == i);
  CHECK(subset.X == blobs.X);
  CHECK(subset.y == blobs.y);
}

TEST_CASE("sample_eval_subset stratifies when classes are large enough") {
  RngStream rng(9);
  const Dataset blobs = gen_blobs(200, 3, 4, 5.0, rng);
  const LabeledSubset subset = sample_eval_subset(blobs.X, blobs.y, 0.1, rng);
  int counts[4] = {0, 0, 0, 0};
  for (int label : subset.y) ++counts[label];
  for (int c = 0; c < 4; ++c) CHECK(counts[c] == 5);  // 10% of 50 per class
  CHECK(std::is_sorted(subset.indices.begin(), subset.indices.end()));
}

TEST_CASE("fitness_of reaches 1 on separable blobs with a full-rank tanh layer") {
  RngStream data_rng(10);
  const Dataset blobs = gen_blobs(120, 4, 2, 12.0, data_rng);
  RngStream basis_rng(11);
  const BasisSet basis = generate_orthogonal_basis(4, basis_rng);
  Chromosome chrom;
  chrom.coeffs = Vector::Constant(4, 0.5);
  chrom.mask = {1, 1, 1};
  chrom.act_bits = 1;  // tanh keeps the map injective
  RngStream rng(12);
  const double fit = fitness_of(chrom, basis, blobs.X, blobs.y, {}, 0.5, rng);
  CHECK(fit == 1.0);
}

TEST_CASE("fitness_of with k = 1 rarely beats the full-mask sibling") {
  RngStream data_rng(13);
  const Dataset blobs = gen_blobs(150, 6, 3, 8.0, data_rng);
  int narrower_not_better = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    RngStream trial_rng(derive_seed(1000, static_cast<std::uint64_t>(t)));
    const BasisSet basis = generate_orthogonal_basis(6, trial_rng);
    Chromosome full = random_chromosome(6, trial_rng);
    std::fill(full.mask.begin(), full.mask.end(), 1);
    Chromosome narrow = full;
    std::fill(narrow.mask.begin(), narrow.mask.end(), 0);

    RngStream eval_a(derive_seed(2000, static_cast<std::uint64_t>(t)));
    RngStream eval_b(derive_seed(2000, static_cast<std::uint64_t>(t)));
    const double fit_full = fitness_of(full, basis, blobs.X, blobs.y, {}, 0.3, eval_a);
    const double fit_narrow = fitness_of(narrow, basis, blobs.X, blobs.y, {}, 0.3, eval_b);
    if (fit_narrow <= fit_full) ++narrower_not_better;
  }
  CHECK(narrower_not_better >= 90);
}

TEST_CASE("fitness values stay in [0, 1] and are deterministic") {
  RngStream data_rng(14);
  const Dataset blobs = gen_blobs(60, 5, 2, 6.0, data_rng);
  RngStream basis_rng(15);
  const BasisSet basis = generate_orthogonal_basis(5, basis_rng);
  for (int t = 0; t < 20; ++t) {
    RngStream chrom_rng(derive_seed(3000, static_cast<std::uint64_t>(t)));
    const Chromosome chrom = random_chromosome(5, chrom_rng);
    RngStream eval1(derive_seed(4000, static_cast<std::uint64_t>(t)));
    RngStream eval2(derive_seed(4000, static_cast<std::uint64_t>(t)));
    const double f1 = fitness_of(chrom, basis, blobs.X, blobs.y, {}, 0.25, eval1);
    const double f2 = fitness_of(chrom, basis, blobs.X, blobs.y, {}, 0.25, eval2);
    CHECK(f1 == f2);
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
    CHECK_FALSE(std::isnan(f1));
  }
}

TEST_CASE("fitness_of equals the split sample + core evaluation path") {
  RngStream data_rng(16);
  const Dataset blobs = gen_blobs(80, 4, 2, 7.0, data_rng);
  RngStream basis_rng(17);
  const BasisSet basis = generate_orthogonal_basis(4, basis_rng);
  RngStream chrom_rng(18);
  const Chromosome chrom = random_chromosome(4, chrom_rng);

  RngStream direct(19);
  const double f_direct = fitness_of(chrom, basis, blobs.X, blobs.y, {}, 0.5, direct);

  RngStream staged(19);
  const LabeledSubset subset = sample_eval_subset(blobs.X, blobs.y, 0.5, staged);
  const double f_staged = fitness_on_subset(chrom, basis, subset.X, subset.y, staged);
  CHECK(f_direct == f_staged);
}
