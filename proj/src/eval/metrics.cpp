#include "xrai/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "xrai/errors.hpp"
#include "xrai/nn/loss.hpp"

namespace xrai::eval {

using pipeline::ExperimentConfig;
using pipeline::LambdaRecord;

BooleanScores score_boolean_predictions(const Matrix& raw_predictions, const Matrix& targets) {
  if (raw_predictions.rows() != targets.rows() || raw_predictions.cols() != targets.cols()) {
    throw DimensionError("prediction and target shapes differ");
  }
  if (raw_predictions.rows() == 0) throw ConfigError("no rows to score");
  BooleanScores s;
  s.functions = static_cast<std::size_t>(raw_predictions.rows());
  std::size_t correct_bits = 0;
  std::size_t exact = 0;
  for (Eigen::Index i = 0; i < raw_predictions.rows(); ++i) {
    const std::span<const double> row(raw_predictions.row(i).data(),
                                      static_cast<std::size_t>(raw_predictions.cols()));
    const BooleanFunction decoded = families::decode_boolean(row);
    std::size_t row_correct = 0;
    for (Eigen::Index j = 0; j < targets.cols(); ++j) {
      const bool truth = targets(i, j) >= 0.5;
      if (decoded.contains(static_cast<std::size_t>(j)) == truth) ++row_correct;
    }
    correct_bits += row_correct;
    if (row_correct == static_cast<std::size_t>(targets.cols())) ++exact;
  }
  s.minterm_accuracy =
      static_cast<double>(correct_bits) / static_cast<double>(raw_predictions.size());
  s.exact_match_rate = static_cast<double>(exact) / static_cast<double>(s.functions);
  return s;
}

BooleanScores eval_inet_boolean(const Mlp& inet, const Matrix& inputs, const Matrix& targets) {
  return score_boolean_predictions(nn::predict(inet, inputs), targets);
}

double score_polynomial_predictions(const Matrix& predicted_coeffs, const Matrix& target_coeffs,
                                    const Matrix& eval_points) {
  return nn::loss_polynomial(predicted_coeffs, target_coeffs, eval_points).value;
}

double eval_inet_polynomial(const Mlp& inet, const Matrix& inputs, const Matrix& targets,
                            const Matrix& eval_points) {
  return score_polynomial_predictions(nn::predict(inet, inputs), targets, eval_points);
}

namespace {

const std::vector<double>& mu_at(const LambdaRecord& r, std::optional<int> at_epoch) {
  if (!at_epoch) return r.mu;
  const auto it = r.checkpoints.find(*at_epoch);
  if (it == r.checkpoints.end()) {
    throw ConfigError("lambda record " + std::to_string(r.index) + " has no checkpoint at epoch " +
                      std::to_string(*at_epoch));
  }
  return it->second;
}

Matrix all_assignments(int n) {
  const std::size_t rows = std::size_t{1} << n;
  Matrix x(static_cast<Eigen::Index>(rows), n);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto a = families::assignment_of(i, n);
    for (int v = 0; v < n; ++v) x(static_cast<Eigen::Index>(i), v) = a[static_cast<std::size_t>(v)];
  }
  return x;
}

}  // namespace

BooleanScores lambda_boolean_scores(std::span<const LambdaRecord> records,
                                    const ExperimentConfig& cfg, std::optional<int> at_epoch) {
  std::size_t correct = 0;
  std::size_t total = 0;
  BooleanScores s;
  std::size_t exact = 0;
  for (const auto& r : records) {
    if (r.diverged) continue;
    const auto& truth = std::get<BooleanFunction>(r.function);
    const BooleanFunction distilled =
        oracle_distill_boolean(pipeline::lambda_net_from_mu(cfg, mu_at(r, at_epoch)), cfg.n);
    std::size_t row_correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (distilled.contains(i) == truth.contains(i)) ++row_correct;
    }
    correct += row_correct;
    total += truth.size();
    exact += row_correct == truth.size();
    ++s.functions;
  }
  if (total == 0) throw ConfigError("no usable lambda records to evaluate");
  s.minterm_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  s.exact_match_rate = static_cast<double>(exact) / static_cast<double>(s.functions);
  return s;
}

double eval_lambda_boolean(std::span<const LambdaRecord> records, const ExperimentConfig& cfg,
                           std::optional<int> at_epoch) {
  return lambda_boolean_scores(records, cfg, at_epoch).minterm_accuracy;
}

double eval_lambda_polynomial(std::span<const LambdaRecord> records, const ExperimentConfig& cfg,
                              const Matrix& eval_points, std::optional<int> at_epoch) {
  if (eval_points.rows() == 0) throw ConfigError("no evaluation points");
  const Matrix design =
      families::design_matrix(*families::canonical_basis(cfg.n, cfg.d), eval_points);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.diverged) continue;
    const auto& coeffs = std::get<Polynomial>(r.function).coeffs();
    const Eigen::Map<const Vector> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    const Vector truth = design * c;
    const Matrix pred = nn::predict(pipeline::lambda_net_from_mu(cfg, mu_at(r, at_epoch)), eval_points);
    sum += (pred.col(0) - truth).cwiseAbs().sum();
    count += static_cast<std::size_t>(eval_points.rows());
  }
  if (count == 0) throw ConfigError("no usable lambda records to evaluate");
  return sum / static_cast<double>(count);
}

namespace {

MonteCarloEstimate summarize(double sum, double sum_sq, std::size_t trials) {
  MonteCarloEstimate e;
  e.trials = trials;
  const double t = static_cast<double>(trials);
  e.mean = sum / t;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - t * e.mean * e.mean) / (t - 1.0));
    e.std_error = std::sqrt(var / t);
  }
  return e;
}

}  // namespace

MonteCarloEstimate baseline_boolean(int n, std::size_t trials, Rng& rng) {
  if (trials == 0) throw ConfigError("baseline needs at least one trial");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const BooleanFunction target = families::sample_boolean(n, rng);
    const BooleanFunction guess = families::sample_boolean(n, rng);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < target.size(); ++i) agree += target.contains(i) == guess.contains(i);
    const double acc = static_cast<double>(agree) / static_cast<double>(target.size());
    sum += acc;
    sum_sq += acc * acc;
  }
  return summarize(sum, sum_sq, trials);
}

MonteCarloEstimate baseline_polynomial(int n, int d, Range coeff_range, std::size_t samples,
                                       const Matrix& eval_points, Rng& rng) {
  if (samples == 0) throw ConfigError("baseline needs at least one sample");
  if (eval_points.rows() == 0) throw ConfigError("baseline needs evaluation points");
  const Matrix design = families::design_matrix(*families::canonical_basis(n, d), eval_points);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Polynomial target = families::sample_polynomial(n, d, coeff_range, rng);
    const Polynomial guess = families::sample_polynomial(n, d, coeff_range, rng);
    Vector diff(static_cast<Eigen::Index>(target.coeffs().size()));
    for (Eigen::Index k = 0; k < diff.size(); ++k) {
      diff(k) = guess.coeffs()[static_cast<std::size_t>(k)] - target.coeffs()[static_cast<std::size_t>(k)];
    }
    const double mae = (design * diff).cwiseAbs().mean();
    sum += mae;
    sum_sq += mae * mae;
  }
  return summarize(sum, sum_sq, samples);
}

BooleanFunction oracle_distill_boolean(const Mlp& lambda_net, int n) {
  if (lambda_net.input_dim() != n || lambda_net.output_dim() != 1) {
    throw DimensionError("boolean distillation needs an n -> 1 network");
  }
  const Matrix out = nn::predict(lambda_net, all_assignments(n));
  return families::decode_boolean(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())));
}

namespace {

Polynomial fit_normal_equations(const Matrix& fit_points, const Vector& values, int n, int d) {
  const auto basis = families::canonical_basis(n, d);
  const Matrix design = families::design_matrix(*basis, fit_points);
  const Eigen::MatrixXd normal = design.transpose() * design;
  const Vector rhs = design.transpose() * values;
  const Vector c = normal.ldlt().solve(rhs);
  return Polynomial(n, d, std::vector<double>(c.data(), c.data() + c.size()));
}

void check_fit_points(const Matrix& fit_points, int n, int d) {
  if (fit_points.cols() != n) throw DimensionError("fit points have the wrong dimension");
  const std::size_t k = families::monomial_count(n, d);
  if (static_cast<std::size_t>(fit_points.rows()) < 2 * k) {
    throw ConfigError("least-squares fit needs at least 2*C(n+d,d) = " + std::to_string(2 * k) +
                      " points");
  }
}

}  // namespace

Polynomial oracle_lstsq_polynomial(const ScalarFunction& f, int n, int d, const Matrix& fit_points) {
  check_fit_points(fit_points, n, d);
  Vector y(fit_points.rows());
  for (Eigen::Index i = 0; i < fit_points.rows(); ++i) {
    y(i) = f(std::span<const double>(fit_points.row(i).data(), static_cast<std::size_t>(n)));
  }
  return fit_normal_equations(fit_points, y, n, d);
}

Polynomial oracle_lstsq_polynomial(const Mlp& lambda_net, int n, int d, const Matrix& fit_points) {
  if (lambda_net.input_dim() != n || lambda_net.output_dim() != 1) {
    throw DimensionError("polynomial fit needs an n -> 1 network");
  }
  check_fit_points(fit_points, n, d);
  return fit_normal_equations(fit_points, nn::predict(lambda_net, fit_points).col(0), n, d);
}

void EvalReport::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(inet_score) || !finite(baseline_score) || (lambda_score && !finite(*lambda_score))) {
    throw Error("report '" + metric + "' has a non-finite score");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (metric == "minterm_accuracy" || metric == "exact_match_rate") {
    if (!in_unit(inet_score) || !in_unit(baseline_score) || (lambda_score && !in_unit(*lambda_score))) {
      throw Error("report '" + metric + "' has a score outside [0, 1]");
    }
  } else if (metric == "polynomial_mae") {
    if (inet_score < 0 || baseline_score < 0 || (lambda_score && *lambda_score < 0)) {
      throw Error("report 'polynomial_mae' has a negative score");
    }
  } else {
    throw Error("unknown metric '" + metric + "'");
  }
}

}  // namespace xrai::eval
