#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "xrai/nn/mlp.hpp"

namespace xrai::nn {

enum class OptimizerKind { sgd, adam, adadelta };

std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double rho = 0.95;

  /// SGD lr 0.01; Adam lr 1e-3, betas 0.9/0.999, eps 1e-8;
  /// Adadelta rho 0.95, eps 1e-6 and unit learning rate.
  static OptimizerConfig defaults(OptimizerKind kind);
};

/// Moment buffers are shape-congruent with the network they were created for.
/// Adam uses first/second as m/v; Adadelta uses them as E[g^2]/E[dx^2].
struct OptimizerState {
  OptimizerConfig config;
  std::vector<Matrix> first_w, second_w;
  std::vector<Vector> first_b, second_b;
  std::uint64_t step_count = 0;

  static OptimizerState create(const Mlp& net, const OptimizerConfig& config);
};

/// One optimizer step in place. Throws DivergenceError on non-finite
/// gradients (the network is left untouched in that case).
void apply_update(Mlp& net, const Gradients& grads, OptimizerState& state);

}  // namespace xrai::nn
