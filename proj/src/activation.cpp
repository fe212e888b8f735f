#include "evonet/activation.hpp"

#include <array>
#include <cmath>
#include <string>

#include "evonet/errors.hpp"

namespace evonet {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double sigmoid_deriv(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}
double tanh_fwd(double x) { return std::tanh(x); }
double tanh_deriv(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}
double rectifier(double x) { return x > 0.0 ? x : 0.0; }
double rectifier_deriv(double x) { return x > 0.0 ? 1.0 : 0.0; }

constexpr std::array<ActivationFunction, 3> kTable = {{
    {Activation::kSigmoid, &sigmoid, &sigmoid_deriv},
    {Activation::kTanh, &tanh_fwd, &tanh_deriv},
    {Activation::kRectifier, &rectifier, &rectifier_deriv},
}};

}  // namespace

const ActivationFunction& activation_function(Activation id) {
  return kTable[static_cast<std::size_t>(id)];
}

Activation activation_from_bits(int bits) {
  if (bits < 0 || bits > 2)
    throw NumericError("activation_from_bits: unrepaired gene value " + std::to_string(bits));
  return static_cast<Activation>(bits);
}

const char* activation_name(Activation id) {
  switch (id) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kRectifier: return "rectifier";
  }
  return "unknown";
}

Activation activation_from_name(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "rectifier") return Activation::kRectifier;
  throw DataError("unknown activation name: " + std::string(name));
}

Eigen::MatrixXd apply_activation(Activation id, const Eigen::MatrixXd& z) {
  switch (id) {
    case Activation::kSigmoid: return z.unaryExpr(&sigmoid);
    case Activation::kTanh: return z.array().tanh().matrix();
    case Activation::kRectifier: return z.cwiseMax(0.0);
  }
  throw NumericError("apply_activation: invalid activation id");
}

Eigen::MatrixXd apply_activation_derivative(Activation id, const Eigen::MatrixXd& z) {
  switch (id) {
    case Activation::kSigmoid: return z.unaryExpr(&sigmoid_deriv);
    case Activation::kTanh: return z.unaryExpr(&tanh_deriv);
    case Activation::kRectifier: return z.unaryExpr(&rectifier_deriv);
  }
  throw NumericError("apply_activation_derivative: invalid activation id");
}

}  // namespace evonet
