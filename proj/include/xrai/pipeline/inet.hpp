#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "xrai/nn/mlp.hpp"
#include "xrai/pipeline/config.hpp"
#include "xrai/pipeline/lambda.hpp"

namespace xrai::pipeline {

enum class Split : std::uint8_t { train = 0, val = 1, test = 2 };

std::string_view to_string(Split s);
Split split_from_string(std::string_view name);

/// Rows pair a lambda net's parameters with the encoding of its target.
struct InetDataset {
  nn::Matrix inputs;   // |records| x |mu|
  nn::Matrix targets;  // |records| x encoding length
  std::vector<Split> split;
  std::vector<std::size_t> record_index;

  std::size_t rows() const { return split.size(); }
  std::vector<std::size_t> rows_in(Split s) const;
  nn::Matrix inputs_in(Split s) const;
  nn::Matrix targets_in(Split s) const;
};

/// Split sizes are round(N*test) and round(N*val), the rest train. Rows are
/// ranked by derive_seed(master, record_index, "split"), so a record's split
/// key depends only on the master seed and its index.
std::vector<Split> assign_splits(std::span<const std::size_t> record_index,
                                 const ExperimentConfig& cfg);

/// Uses the final mu, or the checkpoint at `at_epoch`. Diverged records are
/// skipped and counted in the log. Throws ConfigError for a missing checkpoint.
InetDataset build_inet_dataset(std::span<const LambdaRecord> records,
                               const ExperimentConfig& cfg,
                               std::optional<int> at_epoch = std::nullopt);

std::vector<int> inet_layer_dims(const ExperimentConfig& cfg, std::size_t input_dim);
std::vector<nn::Activation> inet_activations(const ExperimentConfig& cfg);

/// Fixed loss points for the polynomial I-Net loss, derived from "losspts".
nn::Matrix loss_sample_points(const ExperimentConfig& cfg);

/// Scoring points, drawn from a seed disjoint from the loss points.
nn::Matrix evaluation_points(const ExperimentConfig& cfg);

struct InetTrainOptions {
  // Use only the first k training rows (training-set-size sweeps).
  std::optional<std::size_t> train_limit;
  bool log_progress = false;
};

struct InetTrainResult {
  nn::Mlp net;
  std::vector<double> epoch_losses;  // mean training loss per epoch
};

/// |mu| -> inet_hidden (ReLU) -> encoding length, trained for inet_epochs.
/// Throws DivergenceError carrying the last finite loss.
InetTrainResult train_inet(const InetDataset& ds, const ExperimentConfig& cfg,
                           const InetTrainOptions& options = {});

}  // namespace xrai::pipeline
