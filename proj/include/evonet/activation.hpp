#pragma once

#include <Eigen/Core>

#include <string_view>

namespace evonet {

enum class Activation : int {
  kSigmoid = 0,
  kTanh = 1,
  kRectifier = 2,
};

// Scalar forward/derivative pair for one activation. The rectifier is not
// differentiable at 0; its derivative is defined as 0 there.
struct ActivationFunction {
  Activation id;
  double (*forward)(double);
  double (*derivative)(double);
};

const ActivationFunction& activation_function(Activation id);

// Maps a repaired 2-bit gene value (0..2) to an activation. Throws
// NumericError for anything else.
Activation activation_from_bits(int bits);

const char* activation_name(Activation id);
Activation activation_from_name(std::string_view name);

Eigen::MatrixXd apply_activation(Activation id, const Eigen::MatrixXd& z);
Eigen::MatrixXd apply_activation_derivative(Activation id, const Eigen::MatrixXd& z);

}  // namespace evonet
