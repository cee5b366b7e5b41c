#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xrai/nn/tensor.hpp"
#include "xrai/rng.hpp"

namespace xrai::nn {

enum class Activation { relu, sigmoid, linear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Dense feedforward network. Layer l maps layer_dims[l] -> layer_dims[l+1]
/// through weights[l] (out x in), biases[l] and activations[l].
struct Mlp {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  std::vector<Activation> activations;
  // Bumped on every parameter mutation made through the library; forward
  // caches remember it so backward can reject stale caches.
  std::uint64_t revision = 0;

  /// All-zero network of the given shape.
  static Mlp zeros(std::vector<int> layer_dims, std::vector<Activation> activations);

  /// He-uniform for ReLU layers, Glorot-uniform otherwise; biases zero.
  static Mlp initialized(std::vector<int> layer_dims, std::vector<Activation> activations,
                         Rng& rng);

  std::size_t layer_count() const { return weights.size(); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }

  std::size_t parameter_count() const;

  /// Layers in order; per layer the weight matrix row-major, then the bias.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  bool all_finite() const;

  /// Throws DimensionError if the shape invariants do not hold.
  void validate() const;
};

/// Parameter count for the given layer sizes.
std::size_t parameter_count(std::span<const int> layer_dims);

struct ForwardCache {
  // activations[0] is the input, activations[l+1] the output of layer l.
  std::vector<Matrix> activations;
  std::vector<Matrix> pre_activations;
  std::vector<int> layer_dims;
  std::uint64_t revision = 0;
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Gradients zeros_like(const Mlp& net);
  bool all_finite() const;
  std::vector<double> flatten() const;
};

Matrix forward(const Mlp& net, const Matrix& inputs, ForwardCache* cache);

inline Matrix predict(const Mlp& net, const Matrix& inputs) {
  return forward(net, inputs, nullptr);
}

/// `output_grad` is dLoss/dOutput (post-activation), one row per sample.
Gradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_grad);

}  // namespace xrai::nn
