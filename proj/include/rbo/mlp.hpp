#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbo/idx.hpp"
#include "rbo/types.hpp"

namespace rbo {

enum class Activation { relu, tanh };

Activation activation_by_name(const std::string& name);
const char* to_string(Activation a);

struct MlpSpec {
  std::vector<Index> layers{784, 256, 256, 10};  // input, hidden..., output
  Activation activation = Activation::relu;
  std::uint64_t seed = 0;

  void validate() const;
  // sum over layers of (fan_in + 1) * fan_out.
  Index parameter_count() const;
};

struct LayerParams {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weights;
  Vector bias;
};

// Flat layout, layer after layer: weights fan_out x fan_in row-major, then
// fan_out biases.
std::vector<LayerParams> unflatten(const MlpSpec& spec, const Vector& params);
Vector flatten(const MlpSpec& spec, const std::vector<LayerParams>& layers);

// Weights uniform in +- sqrt(6 / (fan_in + fan_out)), biases zero.
Vector init_params(const MlpSpec& spec, std::uint64_t seed);

// Mean softmax cross-entropy over `batch` and, when `grad` is non-null, its
// gradient by backpropagation. Large inputs are processed in fixed-size row
// chunks whose sums are added in order.
double loss_and_grad(const MlpSpec& spec, const Vector& params, const Dataset& batch, Vector* grad);

struct Metrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Full-pass mean loss and top-1 accuracy; argmax ties go to the lowest class.
Metrics evaluate(const MlpSpec& spec, const Vector& params, const Dataset& data);

}  // namespace rbo
