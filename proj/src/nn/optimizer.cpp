#include "xrai/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::nn {

std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adadelta: return "adadelta";
  }
  return "?";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adadelta") return OptimizerKind::adadelta;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

OptimizerConfig OptimizerConfig::defaults(OptimizerKind kind) {
  OptimizerConfig c;
  c.kind = kind;
  switch (kind) {
    case OptimizerKind::sgd: c.learning_rate = 0.01; break;
    case OptimizerKind::adam:
      c.learning_rate = 1e-3;
      c.beta1 = 0.9;
      c.beta2 = 0.999;
      c.epsilon = 1e-8;
      break;
    case OptimizerKind::adadelta:
      c.learning_rate = 1.0;
      c.rho = 0.95;
      c.epsilon = 1e-6;
      break;
  }
  return c;
}

OptimizerState OptimizerState::create(const Mlp& net, const OptimizerConfig& config) {
  OptimizerState s;
  s.config = config;
  if (config.kind == OptimizerKind::sgd) return s;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    s.first_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.second_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.first_b.push_back(Vector::Zero(net.biases[l].size()));
    s.second_b.push_back(Vector::Zero(net.biases[l].size()));
  }
  return s;
}

namespace {

template <class Param>
void adam_step(Param& p, const Param& g, Param& m, Param& v, const OptimizerConfig& c,
               double correction1, double correction2) {
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v.array() = c.beta2 * v.array() + (1.0 - c.beta2) * g.array().square();
  p.array() -= c.learning_rate * (m.array() / correction1) /
               ((v.array() / correction2).sqrt() + c.epsilon);
}

template <class Param>
void adadelta_step(Param& p, const Param& g, Param& acc_grad, Param& acc_delta,
                   const OptimizerConfig& c) {
  acc_grad.array() = c.rho * acc_grad.array() + (1.0 - c.rho) * g.array().square();
  const auto delta = ((acc_delta.array() + c.epsilon).sqrt() /
                      (acc_grad.array() + c.epsilon).sqrt() * g.array())
                         .eval();
  acc_delta.array() = c.rho * acc_delta.array() + (1.0 - c.rho) * delta.square();
  p.array() -= c.learning_rate * delta;
}

}  // namespace

void apply_update(Mlp& net, const Gradients& grads, OptimizerState& state) {
  if (grads.weights.size() != net.layer_count() || grads.biases.size() != net.layer_count()) {
    throw DimensionError("gradient layer count does not match the network");
  }
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    if (grads.weights[l].rows() != net.weights[l].rows() ||
        grads.weights[l].cols() != net.weights[l].cols() ||
        grads.biases[l].size() != net.biases[l].size()) {
      throw DimensionError("gradient shape mismatch in layer " + std::to_string(l));
    }
  }
  if (!grads.all_finite()) {
    throw DivergenceError("non-finite gradient", std::nan(""));
  }
  const OptimizerConfig& c = state.config;
  if (c.kind != OptimizerKind::sgd && state.first_w.size() != net.layer_count()) {
    throw ContractError("optimizer state was created for a different network");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    switch (c.kind) {
      case OptimizerKind::sgd:
        net.weights[l] -= c.learning_rate * grads.weights[l];
        net.biases[l] -= c.learning_rate * grads.biases[l];
        break;
      case OptimizerKind::adam: {
        const double c1 = 1.0 - std::pow(c.beta1, t);
        const double c2 = 1.0 - std::pow(c.beta2, t);
        adam_step(net.weights[l], grads.weights[l], state.first_w[l], state.second_w[l], c, c1, c2);
        adam_step(net.biases[l], grads.biases[l], state.first_b[l], state.second_b[l], c, c1, c2);
        break;
      }
      case OptimizerKind::adadelta:
        adadelta_step(net.weights[l], grads.weights[l], state.first_w[l], state.second_w[l], c);
        adadelta_step(net.biases[l], grads.biases[l], state.first_b[l], state.second_b[l], c);
        break;
    }
  }
  ++net.revision;
}

}  // namespace xrai::nn
