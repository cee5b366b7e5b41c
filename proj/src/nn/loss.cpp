#include "xrai/nn/loss.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "xrai/errors.hpp"
#include "xrai/families/monomial.hpp"

namespace xrai::nn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": prediction and target shapes differ");
  }
  if (a.size() == 0) throw DimensionError(std::string(what) + ": empty input");
}

void require_minterm_width(const Matrix& m) {
  const auto cols = static_cast<std::uint64_t>(m.cols());
  if (!std::has_single_bit(cols)) {
    throw ConfigError("boolean encodings need 2^n columns, got " + std::to_string(cols));
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

LossResult loss_bce(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "loss_bce");
  const double count = static_cast<double>(pred.size());
  LossResult r;
  r.grad.resize(pred.rows(), pred.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double raw = pred.data()[i];
    const double p = std::clamp(raw, kBceEpsilon, 1.0 - kBceEpsilon);
    const double t = target.data()[i];
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    const bool clamped = raw < kBceEpsilon || raw > 1.0 - kBceEpsilon;
    r.grad.data()[i] = clamped ? 0.0 : (p - t) / (p * (1.0 - p)) / count;
  }
  r.value = total / count;
  return r;
}

LossResult loss_mae(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "loss_mae");
  const double count = static_cast<double>(pred.size());
  const Matrix diff = pred - target;
  LossResult r;
  r.value = diff.cwiseAbs().sum() / count;
  r.grad = diff.unaryExpr([count](double v) { return sign(v) / count; });
  return r;
}

LossResult loss_boolean(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "loss_boolean");
  require_minterm_width(pred);
  return loss_mae(pred, target);
}

LossResult loss_boolean_bce(const Matrix& pred, const Matrix& target) {
  require_same_shape(pred, target, "loss_boolean_bce");
  require_minterm_width(pred);
  return loss_bce(pred, target);
}

LossResult loss_polynomial_design(const Matrix& pred_coeffs, const Matrix& target_coeffs,
                                  const Matrix& design) {
  require_same_shape(pred_coeffs, target_coeffs, "loss_polynomial");
  if (design.rows() == 0) throw ConfigError("polynomial loss needs at least one sample point");
  if (design.cols() != pred_coeffs.cols()) {
    throw DimensionError("design matrix width does not match the coefficient count");
  }
  const double count = static_cast<double>(pred_coeffs.rows() * design.rows());
  // Both polynomials are linear in their coefficients, so the value difference
  // at every point is (pred - target) * design^T.
  const Matrix value_diff = (pred_coeffs - target_coeffs) * design.transpose();
  LossResult r;
  r.value = value_diff.cwiseAbs().sum() / count;
  const Matrix signs = value_diff.unaryExpr([count](double v) { return sign(v) / count; });
  r.grad = signs * design;
  return r;
}

LossResult loss_polynomial(const Matrix& pred_coeffs, const Matrix& target_coeffs,
                           const Matrix& sample_points) {
  if (sample_points.rows() == 0) {
    throw ConfigError("polynomial loss needs at least one sample point");
  }
  const int n = static_cast<int>(sample_points.cols());
  const int d = families::degree_for_count(n, static_cast<std::size_t>(pred_coeffs.cols()));
  const Matrix design =
      families::design_matrix(families::enumerate_monomials(n, d), sample_points);
  return loss_polynomial_design(pred_coeffs, target_coeffs, design);
}

}  // namespace xrai::nn
