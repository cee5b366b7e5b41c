#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "xrai/families/encoding.hpp"
#include "xrai/nn/batch.hpp"
#include "xrai/nn/mlp.hpp"
#include "xrai/pipeline/config.hpp"

namespace xrai::pipeline {

using families::TargetFunction;

/// One trained lambda net and the function it was trained on.
struct LambdaRecord {
  std::size_t index = 0;
  TargetFunction function = families::BooleanFunction(1);
  std::vector<double> mu;                       // final flattened parameters
  std::map<int, std::vector<double>> checkpoints;  // epoch -> flattened parameters
  double final_loss = 0.0;
  std::uint64_t task_seed = 0;
  bool diverged = false;
};

/// Training set for one function. Booleans enumerate all 2^n assignments once
/// in minterm order (s is ignored); polynomials draw s points uniformly from
/// n_range^n.
nn::Batch generate_lambda_dataset(const TargetFunction& f, std::size_t s, Range n_range,
                                  Rng& rng);

/// n -> hidden (ReLU) -> 1 (sigmoid for booleans, linear for polynomials).
std::vector<int> lambda_layer_dims(const ExperimentConfig& cfg);
std::vector<nn::Activation> lambda_activations(const ExperimentConfig& cfg);

/// (n*H + H) + (H + 1).
std::size_t lambda_parameter_count(const ExperimentConfig& cfg);

/// Rebuild a lambda net from a flattened parameter vector.
nn::Mlp lambda_net_from_mu(const ExperimentConfig& cfg, std::span<const double> mu);

/// Starting point of a lambda net trained with `task_seed`.
nn::Mlp lambda_initial_net(const ExperimentConfig& cfg, std::uint64_t task_seed);

TargetFunction sample_target(const ExperimentConfig& cfg, Rng& rng);

/// SGD with BCE (boolean) or MAE (polynomial) for cfg.lambda_epochs epochs,
/// snapshotting mu at every epoch listed in cfg.checkpoint_epochs.
/// Deterministic in (f, cfg, task_seed). A non-finite loss stops training
/// and sets `diverged`.
LambdaRecord train_lambda_net(const TargetFunction& f, const ExperimentConfig& cfg,
                              std::uint64_t task_seed);

struct PopulationOptions {
  unsigned workers = 1;
  // Called after each finished record with (done, total); may be empty.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// cfg.lambda_count records. Function i is drawn from
/// derive_seed(master, i, "fn") and trained with derive_seed(master, i, "train"),
/// so the result does not depend on scheduling or worker count.
std::vector<LambdaRecord> run_lambda_population(const ExperimentConfig& cfg,
                                                const PopulationOptions& options = {});

std::size_t count_diverged(std::span<const LambdaRecord> records);

}  // namespace xrai::pipeline
