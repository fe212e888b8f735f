#pragma once

#include <Eigen/Dense>

#include "evonet/rng.hpp"

namespace evonet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows are basis vectors of a (sub)space of R^n. Generated sets are
// orthonormal: unit rows, pairwise dot products below 1e-8, k <= n.
struct BasisSet {
  Matrix vectors;  // k x n

  Eigen::Index rows() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

// Orthonormalizes a matrix of i.i.d. standard normal entries into a full
// n x n basis. Deterministic for a fixed rng state. Throws NumericError for
// n < 2.
BasisSet generate_orthogonal_basis(int n, RngStream& rng);

// a1 = sum_i coeffs[i] * row_i(basis). Throws NumericError on a dimension
// mismatch.
Vector combine(const BasisSet& basis, const Vector& coeffs);

// Orthonormal basis of the null space of a1, i.e. n-1 unit vectors mutually
// orthogonal and orthogonal to a1, taken from the right singular vectors of
// a1 viewed as a 1 x n matrix. Throws NumericError when ||a1|| <= 1e-10.
BasisSet null_space_basis(const Vector& a1);

inline constexpr double kZeroVectorThreshold = 1e-10;

}  // namespace evonet
