#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "xrai/families/boolean.hpp"
#include "xrai/families/polynomial.hpp"
#include "xrai/nn/mlp.hpp"
#include "xrai/pipeline/config.hpp"
#include "xrai/pipeline/lambda.hpp"

namespace xrai::eval {

using families::BooleanFunction;
using families::Polynomial;
using families::Range;
using nn::Matrix;
using nn::Mlp;
using nn::Vector;

struct BooleanScores {
  double minterm_accuracy = 0.0;  // pooled over functions and minterms
  double exact_match_rate = 0.0;  // functions with every minterm right
  std::size_t functions = 0;
};

/// Decode each row of raw predictions with the 0.5 threshold and compare
/// with the binary targets.
BooleanScores score_boolean_predictions(const Matrix& raw_predictions, const Matrix& targets);

BooleanScores eval_inet_boolean(const Mlp& inet, const Matrix& inputs, const Matrix& targets);

/// Value-space MAE between predicted and true coefficient rows over the points.
double score_polynomial_predictions(const Matrix& predicted_coeffs, const Matrix& target_coeffs,
                                    const Matrix& eval_points);

double eval_inet_polynomial(const Mlp& inet, const Matrix& inputs, const Matrix& targets,
                            const Matrix& eval_points);

/// Mean agreement between each lambda net's thresholded outputs and its
/// truth table, pooled over all records and minterms. Diverged records are
/// skipped. `at_epoch` selects a checkpoint instead of the final mu.
double eval_lambda_boolean(std::span<const pipeline::LambdaRecord> records,
                           const pipeline::ExperimentConfig& cfg,
                           std::optional<int> at_epoch = std::nullopt);

/// Both boolean scores for the lambda nets themselves.
BooleanScores lambda_boolean_scores(std::span<const pipeline::LambdaRecord> records,
                                    const pipeline::ExperimentConfig& cfg,
                                    std::optional<int> at_epoch = std::nullopt);

/// Mean |target(x) - net(x)| over points and records.
double eval_lambda_polynomial(std::span<const pipeline::LambdaRecord> records,
                              const pipeline::ExperimentConfig& cfg, const Matrix& eval_points,
                              std::optional<int> at_epoch = std::nullopt);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Per-minterm accuracy of fair-coin guesses against uniformly sampled
/// functions. Throws ConfigError for zero trials.
MonteCarloEstimate baseline_boolean(int n, std::size_t trials, Rng& rng);

/// Value-space MAE of uniformly guessed coefficients against uniformly
/// sampled targets over `eval_points`. Throws ConfigError for zero samples.
MonteCarloEstimate baseline_polynomial(int n, int d, Range coeff_range, std::size_t samples,
                                       const Matrix& eval_points, Rng& rng);

/// Threshold the net over all 2^n inputs (ties at 0.5 count as present).
BooleanFunction oracle_distill_boolean(const Mlp& lambda_net, int n);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Least-squares fit in the canonical basis via the normal equations.
/// Requires at least 2*C(n+d,d) fit points.
Polynomial oracle_lstsq_polynomial(const ScalarFunction& f, int n, int d,
                                   const Matrix& fit_points);
Polynomial oracle_lstsq_polynomial(const Mlp& lambda_net, int n, int d,
                                   const Matrix& fit_points);

/// One headline number with its context.
struct EvalReport {
  families::Family family = families::Family::boolean;
  int n = 0;
  std::string metric;  // minterm_accuracy | exact_match_rate | polynomial_mae
  double inet_score = 0.0;
  std::optional<double> lambda_score;
  double baseline_score = 0.0;
  double baseline_std_error = 0.0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::string config_digest;

  /// Throws Error if scores are non-finite or out of range for the metric.
  void validate() const;
};

}  // namespace xrai::eval
