#pragma once

#include "xrai/nn/tensor.hpp"

namespace xrai::nn {

struct LossResult {
  double value = 0.0;
  Matrix grad;  // d value / d pred, same shape as pred
};

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy. Predictions are clamped to [eps, 1-eps];
/// the gradient is zero where the clamp is active.
LossResult loss_bce(const Matrix& pred, const Matrix& target);

/// Mean absolute error, subgradient 0 at exact ties.
LossResult loss_mae(const Matrix& pred, const Matrix& target);

/// Mean absolute difference between predicted and true minterm indicators,
/// 1/(s*N) * sum |target - pred|. N (columns) must be a power of two.
LossResult loss_boolean(const Matrix& pred, const Matrix& target);

/// Multi-label BCE over minterm indicators; same shape rules as loss_boolean.
LossResult loss_boolean_bce(const Matrix& pred, const Matrix& target);

/// Value-space polynomial loss: 1/(s*m) * sum_i sum_j |p_i(x_j) - t_i(x_j)|.
/// `design` holds the canonical monomial values at the m sample points (m x K).
LossResult loss_polynomial_design(const Matrix& pred_coeffs, const Matrix& target_coeffs,
                                  const Matrix& design);

/// Same loss with the basis derived from the sample points (m x n); the
/// degree is recovered from K = C(n+d, d).
LossResult loss_polynomial(const Matrix& pred_coeffs, const Matrix& target_coeffs,
                           const Matrix& sample_points);

}  // namespace xrai::nn
