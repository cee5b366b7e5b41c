#include "xrai/pipeline/config.hpp"

#include <cmath>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::pipeline {

std::string_view to_string(BooleanInetLoss l) { return l == BooleanInetLoss::l1 ? "l1" : "bce"; }

BooleanInetLoss boolean_loss_from_string(std::string_view name) {
  if (name == "l1") return BooleanInetLoss::l1;
  if (name == "bce") return BooleanInetLoss::bce;
  throw ConfigError("unknown boolean I-Net loss '" + std::string(name) + "' (expected l1 or bce)");
}

std::vector<int> checkpoint_cadence(int every, int epochs) {
  std::vector<int> out;
  if (every <= 0) return out;
  for (int e = every; e <= epochs; e += every) out.push_back(e);
  return out;
}

ExperimentConfig ExperimentConfig::defaults(Family family, int n, int d) {
  if (n < 1) throw ConfigError("n must be at least 1");
  ExperimentConfig c;
  c.family = family;
  c.n = n;
  if (family == Family::boolean) {
    if (n > families::kMaxBooleanVariables) throw ConfigError("boolean n is too large");
    const std::size_t minterms = std::size_t{1} << n;
    c.d = 0;
    c.n_range = {0.0, 1.0};
    c.coeff_range = {0.0, 1.0};
    c.lambda_count = 65536;
    c.lambda_train_size = minterms;
    c.lambda_batch_size = minterms;
    c.lambda_hidden = static_cast<int>(5 * minterms);
    c.lambda_learning_rate = 0.05;
    c.inet_batch_size = 64;
    c.inet_optimizer = nn::OptimizerConfig::defaults(nn::OptimizerKind::adadelta);
  } else {
    if (d < 0) throw ConfigError("d must be non-negative");
    c.d = d;
    c.n_range = {-1.0, 1.0};
    c.coeff_range = {-10.0, 10.0};
    c.lambda_count = 50000;
    c.lambda_train_size = 1000;
    c.lambda_batch_size = 64;
    c.lambda_hidden = static_cast<int>(5 * families::monomial_count(n, d));
    c.lambda_learning_rate = 0.01;
    c.inet_batch_size = 128;
    c.inet_optimizer = nn::OptimizerConfig::defaults(nn::OptimizerKind::adam);
  }
  c.lambda_epochs = 200;
  c.inet_hidden = 2048;
  c.inet_epochs = 100;
  c.checkpoint_epochs = checkpoint_cadence(10, c.lambda_epochs);
  return c;
}

ExperimentConfig with_variables(const ExperimentConfig& cfg, int n) {
  const ExperimentConfig old_defaults = ExperimentConfig::defaults(cfg.family, cfg.n, cfg.d);
  const ExperimentConfig new_defaults = ExperimentConfig::defaults(cfg.family, n, cfg.d);
  ExperimentConfig out = cfg;
  out.n = n;
  if (cfg.lambda_train_size == old_defaults.lambda_train_size) {
    out.lambda_train_size = new_defaults.lambda_train_size;
  }
  if (cfg.lambda_batch_size == old_defaults.lambda_batch_size) {
    out.lambda_batch_size = new_defaults.lambda_batch_size;
  }
  if (cfg.lambda_hidden == old_defaults.lambda_hidden) out.lambda_hidden = new_defaults.lambda_hidden;
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& rule) { throw ConfigError("invalid config: " + rule); }

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1) fail("n >= 1");
  if (family == Family::boolean) {
    if (n > families::kMaxBooleanVariables) fail("boolean n <= 20");
    if (d != 0) fail("boolean configs use d = 0 (degree is not applicable)");
    const std::size_t minterms = std::size_t{1} << n;
    if (lambda_train_size != minterms) {
      fail("boolean lambda_train_size must equal 2^n = " + std::to_string(minterms) +
           " (the complete truth table)");
    }
    if (!(n_range == Range{0.0, 1.0})) fail("boolean n_range must be 0,1");
  } else {
    if (d < 0) fail("d >= 0");
    if (!(n_range.lo <= n_range.hi)) fail("n_range lo <= hi");
    if (!(coeff_range.lo <= coeff_range.hi)) fail("coeff_range lo <= hi");
    if (loss_points < 1) fail("loss_points (m) >= 1");
    if (eval_points < 1) fail("eval_points >= 1");
  }
  if (lambda_count < 1) fail("lambda_count >= 1");
  if (lambda_train_size < 1) fail("lambda_train_size >= 1");
  if (lambda_epochs < 1) fail("lambda_epochs >= 1");
  if (lambda_batch_size < 1) fail("lambda_batch_size >= 1");
  if (lambda_hidden < 1) fail("lambda_hidden >= 1");
  if (!(lambda_learning_rate > 0.0)) fail("lambda_learning_rate > 0");
  if (inet_hidden < 1) fail("inet_hidden >= 1");
  if (inet_epochs < 1) fail("inet_epochs >= 1");
  if (inet_batch_size < 1) fail("inet_batch_size >= 1");
  if (!(inet_optimizer.learning_rate > 0.0)) fail("inet_learning_rate > 0");
  for (double f : {train_fraction, val_fraction, test_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) fail("split fractions lie in [0, 1]");
  }
  if (std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    fail("train/val/test fractions sum to 1 within 1e-9");
  }
  int previous = 0;
  for (int e : checkpoint_epochs) {
    if (e <= previous) fail("checkpoint_epochs strictly increasing and positive");
    if (e > lambda_epochs) fail("checkpoint_epochs <= lambda_epochs");
    previous = e;
  }
}

}  // namespace xrai::pipeline
