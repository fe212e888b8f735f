#pragma once

#include <Eigen/Dense>

#include "evonet/subspace.hpp"

// Fixed 5-dimensional worked example used as cross-implementation reference
// data: an orthonormal basis S, combination coefficients b, and an externally
// computed orthonormal completion of null(a1) where a1 = sum_i b[i] * s_i.
// The basis vectors s_i are the rows of kReferenceBasis.
namespace reference_example {

inline evonet::BasisSet basis() {
  Eigen::MatrixXd s(5, 5);
  // Stored column-by-column as originally tabulated; rows of the returned
  // basis are the s_i.
  s << -0.4861, -0.6498, 0.2718, 0.1572, 0.4927,
       -0.4617, -0.2830, -0.1205, -0.6073, -0.5686,
       -0.4438, 0.3468, 0.5339, 0.4669, -0.4240,
       -0.4721, 0.6142, -0.0597, -0.3831, 0.4995,
       -0.3614, 0.0075, -0.7893, 0.4916, -0.0681;
  return evonet::BasisSet{s.transpose()};
}

inline Eigen::VectorXd coefficients() {
  Eigen::VectorXd b(5);
  b << 0.7303, 0.4886, 0.5785, 0.2373, 0.4588;
  return b;
}

// a1 = sum_i b[i] * s_i computed from the tabulated values above.
inline Eigen::VectorXd combination() {
  Eigen::VectorXd a1(5);
  a1 << -0.25190049, -0.95014853, 0.07046466, 0.05904801, -0.63146357;
  return a1;
}

// The combination vector as listed alongside the tabulated example. It is
// inconsistent with the listed S and b (it equals ~2.566 * s_5 rather than
// sum b_i s_i) and with the listed null-space vectors below, which are
// orthogonal to combination(), not to this vector. Kept verbatim so the
// reproduction check can report the discrepancy.
inline Eigen::VectorXd listed_combination() {
  Eigen::VectorXd a1(5);
  a1 << 1.2642, -1.4589, -1.0880, 1.2815, -0.1746;
  return a1;
}

// Externally computed orthonormal basis of null(a1), one vector per row.
inline Eigen::MatrixXd listed_null_rows() {
  Eigen::MatrixXd rows(4, 5);
  rows << -0.8108, 0.4590, 0.0400, 0.0336, -0.3596,
          0.0600, 0.0400, 0.9970, -0.0025, 0.0266,
          0.0504, 0.0336, -0.0025, 0.9979, 0.0224,
          -0.5388, -0.3596, 0.0266, 0.0224, 0.7611;
  return rows;
}

// Mask and activation gene completing the example chromosome.
inline std::vector<std::uint8_t> mask() { return {0, 1, 1, 0}; }
inline constexpr int kActBits = 2;  // rectifier

}  // namespace reference_example
