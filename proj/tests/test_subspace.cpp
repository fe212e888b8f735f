#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evonet/errors.hpp"
#include "evonet/subspace.hpp"
#include "reference_example.hpp"

using namespace evonet;

namespace {

// Naive cofactor-expansion determinant, the independent oracle for |det| = 1.
double cofactor_det(const Matrix& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
      Eigen::Index mc = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, mc++) = m(i, j);
      }
    }
    det += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return det;
}

double max_abs_offdiag_gram(const Matrix& rows) {
  const Matrix gram = rows * rows.transpose();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(gram(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("generate_orthogonal_basis produces an orthonormal square basis") {
  RngStream rng(123);
  const BasisSet basis = generate_orthogonal_basis(2, rng);
  REQUIRE(basis.rows() == 2);
  REQUIRE(basis.dim() == 2);
  CHECK(std::abs(basis.vectors.row(0).norm() - 1.0) < 1e-8);
  CHECK(std::abs(basis.vectors.row(1).norm() - 1.0) < 1e-8);
  CHECK(std::abs(basis.vectors.row(0).dot(basis.vectors.row(1))) < 1e-8);
}

TEST_CASE("generate_orthogonal_basis is deterministic per seed") {
  RngStream rng1(77);
  RngStream rng2(77);
  const BasisSet a = generate_orthogonal_basis(5, rng1);
  const BasisSet b = generate_orthogonal_basis(5, rng2);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("generate_orthogonal_basis has |det| = 1 (cofactor oracle)") {
  RngStream rng(2024);
  const BasisSet basis = generate_orthogonal_basis(5, rng);
  CHECK(std::abs(std::abs(cofactor_det(basis.vectors)) - 1.0) < 1e-6);
}

TEST_CASE("generate_orthogonal_basis satisfies S S^T = I elementwise") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RngStream rng(seed);
    const BasisSet basis = generate_orthogonal_basis(7, rng);
    const Matrix gram = basis.vectors * basis.vectors.transpose();
    CHECK((gram - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("generate_orthogonal_basis rejects n < 2") {
  RngStream rng(0);
  CHECK_THROWS_AS(generate_orthogonal_basis(1, rng), NumericError);
}

TEST_CASE("combine matches the scalar-loop oracle on the reference example") {
  const BasisSet s = reference_example::basis();
  const Vector b = reference_example::coefficients();
  const Vector a1 = combine(s, b);

  Vector oracle = Vector::Zero(5);
  for (Eigen::Index i = 0; i < 5; ++i) oracle += b[i] * s.vectors.row(i).transpose();
  CHECK((a1 - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a1 - reference_example::combination()).cwiseAbs().maxCoeff() < 1e-6);

  // The tabulated null-space vectors are orthogonal to this combination,
  // pinning the row-convention and the arithmetic against external data.
  const Matrix listed = reference_example::listed_null_rows();
  const Vector unit = a1 / a1.norm();
  for (Eigen::Index i = 0; i < listed.rows(); ++i)
    CHECK(std::abs(listed.row(i).dot(unit)) < 1e-3);
}

TEST_CASE("combine with the identity basis returns the coefficients") {
  BasisSet identity{Matrix::Identity(5, 5)};
  Vector b = Vector::Zero(5);
  b[0] = 0.7;
  const Vector a1 = combine(identity, b);
  CHECK((a1 - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combine of the zero coefficient vector is the zero vector") {
  RngStream rng(5);
  const BasisSet s = generate_orthogonal_basis(6, rng);
  const Vector a1 = combine(s, Vector::Zero(6));
  CHECK(a1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combine rejects mismatched dimensions") {
  RngStream rng(5);
  const BasisSet s = generate_orthogonal_basis(4, rng);
  CHECK_THROWS_AS(combine(s, Vector::Zero(5)), NumericError);
}

TEST_CASE("combine is linear") {
  RngStream rng(99);
  const BasisSet s = generate_orthogonal_basis(8, rng);
  Vector b(8), c(8);
  for (int i = 0; i < 8; ++i) {
    b[i] = rng.uniform(-1, 1);
    c[i] = rng.uniform(-1, 1);
  }
  const double alpha = 0.37, beta = -2.11;
  const Vector lhs = combine(s, alpha * b + beta * c);
  const Vector rhs = alpha * combine(s, b) + beta * combine(s, c);
  CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
}

TEST_CASE("null_space_basis of the reference combination spans the tabulated completion") {
  const Vector a1 = combine(reference_example::basis(), reference_example::coefficients());
  const BasisSet null_rows = null_space_basis(a1);
  REQUIRE(null_rows.rows() == 4);
  REQUIRE(null_rows.dim() == 5);

  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(std::abs(null_rows.vectors.row(i).norm() - 1.0) < 1e-8);
    CHECK(std::abs(null_rows.vectors.row(i).dot(a1)) < 1e-8 * a1.norm());
  }
  CHECK(max_abs_offdiag_gram(null_rows.vectors) < 1e-8);

  // Together with a1 the rows span R^5.
  Matrix stack(5, 5);
  stack.row(0) = a1.transpose() / a1.norm();
  stack.bottomRows(4) = null_rows.vectors;
  Eigen::FullPivLU<Matrix> lu(stack);
  CHECK(lu.rank() == 5);

  // Each externally tabulated vector reconstructs from our null basis.
  const Matrix listed = reference_example::listed_null_rows();
  for (Eigen::Index i = 0; i < listed.rows(); ++i) {
    const Vector v = listed.row(i).transpose();
    const Vector projected = null_rows.vectors.transpose() * (null_rows.vectors * v);
    CHECK((v - projected).norm() < 1e-3);
  }
}

TEST_CASE("null_space_basis of a coordinate axis") {
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  const BasisSet null_rows = null_space_basis(e1);
  REQUIRE(null_rows.rows() == 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(std::abs(null_rows.vectors(i, 0)) < 1e-12);  // orthogonal to e1
    CHECK(std::abs(null_rows.vectors.row(i).norm() - 1.0) < 1e-8);
  }
  CHECK(max_abs_offdiag_gram(null_rows.vectors) < 1e-8);
}

TEST_CASE("null_space_basis stacked with the input is orthonormal (Gram oracle)") {
  RngStream rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    Vector a1(4);
    for (int i = 0; i < 4; ++i) a1[i] = rng.uniform(-2, 2);
    if (a1.norm() <= kZeroVectorThreshold) continue;
    const BasisSet null_rows = null_space_basis(a1);
    Matrix g(4, 4);
    g.row(0) = a1.transpose() / a1.norm();
    g.bottomRows(3) = null_rows.vectors;
    CHECK((g * g.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("null_space_basis rejects a numerically zero vector") {
  CHECK_THROWS_AS(null_space_basis(Vector::Zero(4)), NumericError);
}
