#pragma once

#include <cstddef>
#include <functional>

#include "xrai/nn/loss.hpp"
#include "xrai/nn/mlp.hpp"
#include "xrai/rng.hpp"

namespace xrai::nn {

/// Loss of the network output; the target is captured by the closure.
using OutputLoss = std::function<LossResult(const Matrix& pred)>;

/// Values whose zero crossings are kinks of the loss (e.g. pred - target for
/// an absolute-value loss). Empty for smooth losses.
using KinkArguments = std::function<Matrix(const Matrix& pred)>;

struct GradCheckOptions {
  std::size_t coordinates = 100;
  double step = 1e-5;
  double relative_tolerance = 1e-4;
  // Coordinates whose perturbation brings a ReLU pre-activation or a kink
  // argument within this distance of zero (or across it) are skipped.
  double kink_margin = 1e-6;
  // Denominator floor of the relative error.
  double scale_floor = 1e-6;
};

struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  double max_relative_error = 0.0;
};

/// Compare backprop gradients against central finite differences on randomly
/// chosen parameter coordinates.
GradCheckReport gradient_check(const Mlp& net, const Matrix& inputs, const OutputLoss& loss,
                               const KinkArguments& kinks, Rng& rng,
                               const GradCheckOptions& options = {});

}  // namespace xrai::nn
