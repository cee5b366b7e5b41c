#include "xrai/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "linear") return Activation::linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

namespace {

void check_shape(const std::vector<int>& dims, const std::vector<Activation>& acts) {
  if (dims.size() < 2) throw DimensionError("an MLP needs at least an input and an output size");
  for (int d : dims) {
    if (d <= 0) throw DimensionError("layer sizes must be positive");
  }
  if (acts.size() != dims.size() - 1) {
    throw DimensionError("expected " + std::to_string(dims.size() - 1) + " activations, got " +
                         std::to_string(acts.size()));
  }
}

Matrix activate(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid:
      return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    case Activation::linear: return z;
  }
  return z;
}

// dA/dZ given both z and a = act(z).
Matrix activation_derivative(Activation act, const Matrix& z, const Matrix& a) {
  switch (act) {
    case Activation::relu:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::sigmoid: return a.array() * (1.0 - a.array());
    case Activation::linear: return Matrix::Ones(z.rows(), z.cols());
  }
  return Matrix::Ones(z.rows(), z.cols());
}

}  // namespace

Mlp Mlp::zeros(std::vector<int> layer_dims, std::vector<Activation> activations) {
  check_shape(layer_dims, activations);
  Mlp net;
  net.layer_dims = std::move(layer_dims);
  net.activations = std::move(activations);
  for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
    net.weights.push_back(Matrix::Zero(net.layer_dims[l + 1], net.layer_dims[l]));
    net.biases.push_back(Vector::Zero(net.layer_dims[l + 1]));
  }
  return net;
}

Mlp Mlp::initialized(std::vector<int> layer_dims, std::vector<Activation> activations,
                     Rng& rng) {
  Mlp net = zeros(std::move(layer_dims), std::move(activations));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double fan_in = net.layer_dims[l];
    const double fan_out = net.layer_dims[l + 1];
    const double limit = net.activations[l] == Activation::relu
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    Matrix& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-limit, limit);
  }
  return net;
}

std::size_t parameter_count(std::span<const int> layer_dims) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    total += static_cast<std::size_t>(layer_dims[l + 1]) * (layer_dims[l] + 1);
  }
  return total;
}

std::size_t Mlp::parameter_count() const { return nn::parameter_count(layer_dims); }

std::vector<double> Mlp::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    flat.insert(flat.end(), weights[l].data(), weights[l].data() + weights[l].size());
    flat.insert(flat.end(), biases[l].data(), biases[l].data() + biases[l].size());
  }
  return flat;
}

void Mlp::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("parameter vector has " + std::to_string(flat.size()) +
                         " entries, network expects " + std::to_string(parameter_count()));
  }
  std::size_t pos = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    std::copy_n(flat.data() + pos, weights[l].size(), weights[l].data());
    pos += static_cast<std::size_t>(weights[l].size());
    std::copy_n(flat.data() + pos, biases[l].size(), biases[l].data());
    pos += static_cast<std::size_t>(biases[l].size());
  }
  ++revision;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

void Mlp::validate() const {
  check_shape(layer_dims, activations);
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw DimensionError("layer count does not match layer_dims");
  }
  for (std::size_t l = 0; l < layer_count(); ++l) {
    if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l]) {
      throw DimensionError("weights[" + std::to_string(l) + "] has the wrong shape");
    }
    if (biases[l].size() != layer_dims[l + 1]) {
      throw DimensionError("biases[" + std::to_string(l) + "] has the wrong length");
    }
  }
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return g;
}

bool Gradients::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].data(), weights[l].data() + weights[l].size());
    flat.insert(flat.end(), biases[l].data(), biases[l].data() + biases[l].size());
  }
  return flat;
}

Matrix forward(const Mlp& net, const Matrix& inputs, ForwardCache* cache) {
  if (inputs.cols() != net.input_dim()) {
    throw DimensionError("input has " + std::to_string(inputs.cols()) +
                         " columns, network expects " + std::to_string(net.input_dim()));
  }
  if (cache) {
    cache->activations.clear();
    cache->pre_activations.clear();
    cache->activations.push_back(inputs);
    cache->layer_dims = net.layer_dims;
    cache->revision = net.revision;
  }
  Matrix a = inputs;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Matrix z = a * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    a = activate(net.activations[l], z);
    if (cache) {
      cache->pre_activations.push_back(std::move(z));
      cache->activations.push_back(a);
    }
  }
  return a;
}

Gradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_grad) {
  if (cache.layer_dims != net.layer_dims || cache.revision != net.revision ||
      cache.pre_activations.size() != net.layer_count()) {
    throw ContractError("forward cache does not belong to this network state");
  }
  const Matrix& out = cache.activations.back();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    throw DimensionError("output gradient shape does not match the network output");
  }
  Gradients g = Gradients::zeros_like(net);
  Matrix delta = output_grad;
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    delta.array() *= activation_derivative(net.activations[l], cache.pre_activations[l],
                                           cache.activations[l + 1])
                         .array();
    g.weights[l].noalias() = delta.transpose() * cache.activations[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix next = delta * net.weights[l];
      delta = std::move(next);
    }
  }
  return g;
}

}  // namespace xrai::nn
