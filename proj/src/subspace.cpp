#include "evonet/subspace.hpp"

#include <Eigen/SVD>

#include "evonet/errors.hpp"

namespace evonet {

BasisSet generate_orthogonal_basis(int n, RngStream& rng) {
  if (n < 2) throw NumericError("generate_orthogonal_basis: dimension must be >= 2, got " + std::to_string(n));
  Matrix gauss(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gauss(i, j) = rng.normal();
  // Householder QR of a Gaussian matrix gives a uniformly distributed
  // orthogonal Q; its rows serve as the basis vectors.
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  return BasisSet{q.transpose()};
}

Vector combine(const BasisSet& basis, const Vector& coeffs) {
  if (basis.rows() != coeffs.size())
    throw NumericError("combine: basis has " + std::to_string(basis.rows()) + " vectors but got " +
                       std::to_string(coeffs.size()) + " coefficients");
  return basis.vectors.transpose() * coeffs;
}

BasisSet null_space_basis(const Vector& a1) {
  if (a1.norm() <= kZeroVectorThreshold)
    throw NumericError("null_space_basis: input vector is numerically zero");
  const Eigen::Index n = a1.size();
  Eigen::JacobiSVD<Matrix> svd(a1.transpose(), Eigen::ComputeFullV);
  // Right singular vectors beyond the first have singular value zero and
  // span null(a1).
  Matrix null_rows = svd.matrixV().rightCols(n - 1).transpose();
  return BasisSet{std::move(null_rows)};
}

}  // namespace evonet
