#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "xrai/families/encoding.hpp"
#include "xrai/nn/optimizer.hpp"

namespace xrai::pipeline {

using families::Family;
using families::Range;

enum class BooleanInetLoss {
  l1,   // mean absolute difference of minterm indicators (default)
  bce,  // multi-label binary cross-entropy
};

std::string_view to_string(BooleanInetLoss l);
BooleanInetLoss boolean_loss_from_string(std::string_view name);

/// Complete description of one pipeline run. Build with `defaults` and then
/// override fields; `validate` enforces the cross-field rules.
struct ExperimentConfig {
  Family family = Family::boolean;
  int n = 4;
  int d = 0;  // not applicable to booleans
  Range n_range{0.0, 1.0};
  Range coeff_range{0.0, 1.0};

  std::size_t lambda_count = 65536;
  std::size_t lambda_train_size = 16;
  int lambda_epochs = 200;
  std::size_t lambda_batch_size = 16;
  int lambda_hidden = 80;
  double lambda_learning_rate = 0.05;
  // All lambda nets start from one shared initialization.
  bool lambda_shared_init = true;

  int inet_hidden = 2048;
  int inet_epochs = 100;
  std::size_t inet_batch_size = 64;
  nn::OptimizerConfig inet_optimizer = nn::OptimizerConfig::defaults(nn::OptimizerKind::adadelta);
  bool inet_standardize = true;  // z-score I-Net inputs on the train split
  BooleanInetLoss inet_boolean_loss = BooleanInetLoss::l1;

  double train_fraction = 0.70;
  double val_fraction = 0.05;
  double test_fraction = 0.25;

  std::size_t loss_points = 50;   // m for the polynomial I-Net loss
  std::size_t eval_points = 1000; // scoring points, disjoint seed from loss_points
  std::vector<int> checkpoint_epochs;
  std::uint64_t master_seed = 42;

  /// Table-driven defaults for a family and size. Boolean: hidden 5*2^n,
  /// batch 2^n, train size 2^n, 65,536 lambda nets, Adadelta I-Net with
  /// batch 64. Polynomial: hidden 5*C(n+d,d), batch 64, 1,000 points per
  /// function, 50,000 lambda nets, Adam I-Net with batch 128.
  static ExperimentConfig defaults(Family family, int n, int d);

  std::size_t encoding_length() const { return families::encoding_length(family, n, d); }

  /// Throws ConfigError naming the violated rule.
  void validate() const;
};

/// Same run with a different variable count. Size-derived fields (train size,
/// batch size and hidden width of the lambda nets) follow the new n when they
/// were at their defaults for the old one; every other field is kept.
ExperimentConfig with_variables(const ExperimentConfig& cfg, int n);

/// Every `every` epochs up to and including `epochs`.
std::vector<int> checkpoint_cadence(int every, int epochs);

}  // namespace xrai::pipeline
