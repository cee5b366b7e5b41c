#include "xrai/pipeline/inet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xrai/errors.hpp"
#include "xrai/log.hpp"
#include "xrai/nn/loss.hpp"
#include "xrai/nn/optimizer.hpp"

namespace xrai::pipeline {

using nn::Matrix;
using nn::Vector;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw FormatError("unknown split '" + std::string(name) + "'");
}

std::vector<std::size_t> InetDataset::rows_in(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

namespace {

constexpr double kConstantFeature = 1e-9;

Matrix gather(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

Matrix InetDataset::inputs_in(Split s) const { return gather(inputs, rows_in(s)); }
Matrix InetDataset::targets_in(Split s) const { return gather(targets, rows_in(s)); }

std::vector<Split> assign_splits(std::span<const std::size_t> record_index,
                                 const ExperimentConfig& cfg) {
  const std::size_t total = record_index.size();
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(total) * cfg.test_fraction));
  auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(total) * cfg.val_fraction));
  n_test = std::min(n_test, total);
  n_val = std::min(n_val, total - n_test);

  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(total);
  for (std::size_t i = 0; i < total; ++i) {
    keyed[i] = {derive_seed(cfg.master_seed, record_index[i], "split"), i};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<Split> split(total, Split::train);
  for (std::size_t rank = 0; rank < total; ++rank) {
    if (rank < n_test) {
      split[keyed[rank].second] = Split::test;
    } else if (rank < n_test + n_val) {
      split[keyed[rank].second] = Split::val;
    }
  }
  return split;
}

InetDataset build_inet_dataset(std::span<const LambdaRecord> records, const ExperimentConfig& cfg,
                               std::optional<int> at_epoch) {
  if (at_epoch && std::find(cfg.checkpoint_epochs.begin(), cfg.checkpoint_epochs.end(),
                            *at_epoch) == cfg.checkpoint_epochs.end()) {
    std::string available;
    for (int e : cfg.checkpoint_epochs) available += (available.empty() ? "" : ", ") + std::to_string(e);
    throw ConfigError("no checkpoint at epoch " + std::to_string(*at_epoch) +
                      "; available epochs: " + (available.empty() ? "none" : available));
  }
  const std::size_t width = lambda_parameter_count(cfg);
  const std::size_t enc = cfg.encoding_length();

  std::vector<const LambdaRecord*> kept;
  for (const auto& r : records) {
    if (!r.diverged) kept.push_back(&r);
  }
  if (kept.size() != records.size()) {
    log::info("I-Net dataset: excluded " + std::to_string(records.size() - kept.size()) +
              " diverged lambda nets");
  }

  InetDataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(width));
  ds.targets.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(enc));
  for (std::size_t row = 0; row < kept.size(); ++row) {
    const LambdaRecord& r = *kept[row];
    const std::vector<double>* mu = &r.mu;
    if (at_epoch) {
      const auto it = r.checkpoints.find(*at_epoch);
      if (it == r.checkpoints.end()) {
        throw ConfigError("lambda record " + std::to_string(r.index) +
                          " has no checkpoint at epoch " + std::to_string(*at_epoch));
      }
      mu = &it->second;
    }
    if (mu->size() != width) {
      throw DimensionError("lambda record " + std::to_string(r.index) + " has " +
                           std::to_string(mu->size()) + " parameters, expected " +
                           std::to_string(width));
    }
    if (families::family_of(r.function) != cfg.family) {
      throw ConfigError("lambda record family does not match the configuration");
    }
    const std::vector<double> target = families::encode(r.function);
    if (target.size() != enc) throw DimensionError("target encoding has the wrong length");
    const auto i = static_cast<Eigen::Index>(row);
    ds.inputs.row(i) = Eigen::Map<const Eigen::RowVectorXd>(mu->data(), static_cast<Eigen::Index>(width));
    ds.targets.row(i) = Eigen::Map<const Eigen::RowVectorXd>(target.data(), static_cast<Eigen::Index>(enc));
    ds.record_index.push_back(r.index);
  }
  ds.split = assign_splits(ds.record_index, cfg);
  return ds;
}

std::vector<int> inet_layer_dims(const ExperimentConfig& cfg, std::size_t input_dim) {
  return {static_cast<int>(input_dim), cfg.inet_hidden, static_cast<int>(cfg.encoding_length())};
}

std::vector<nn::Activation> inet_activations(const ExperimentConfig& cfg) {
  return {nn::Activation::relu, cfg.family == Family::boolean ? nn::Activation::sigmoid
                                                              : nn::Activation::linear};
}

namespace {

Matrix sample_points(const ExperimentConfig& cfg, std::size_t count, std::string_view role) {
  Rng rng(derive_seed(cfg.master_seed, role));
  Matrix pts(static_cast<Eigen::Index>(count), cfg.n);
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    pts.data()[i] = rng.uniform(cfg.n_range.lo, cfg.n_range.hi);
  }
  return pts;
}

}  // namespace

Matrix loss_sample_points(const ExperimentConfig& cfg) {
  return sample_points(cfg, cfg.loss_points, "losspts");
}

Matrix evaluation_points(const ExperimentConfig& cfg) {
  return sample_points(cfg, cfg.eval_points, "evalpts");
}

InetTrainResult train_inet(const InetDataset& ds, const ExperimentConfig& cfg,
                           const InetTrainOptions& options) {
  std::vector<std::size_t> train_rows = ds.rows_in(Split::train);
  if (options.train_limit && *options.train_limit < train_rows.size()) {
    train_rows.resize(*options.train_limit);
  }
  if (train_rows.empty()) throw ConfigError("I-Net training split is empty");
  if (static_cast<std::size_t>(ds.targets.cols()) != cfg.encoding_length()) {
    throw DimensionError("dataset targets do not match the configured encoding length");
  }

  const auto cols = ds.inputs.cols();
  Vector mean = Vector::Zero(cols);
  Vector scale = Vector::Ones(cols);
  if (cfg.inet_standardize) {
    for (std::size_t r : train_rows) mean += ds.inputs.row(static_cast<Eigen::Index>(r)).transpose();
    mean /= static_cast<double>(train_rows.size());
    Vector var = Vector::Zero(cols);
    for (std::size_t r : train_rows) {
      var += (ds.inputs.row(static_cast<Eigen::Index>(r)).transpose() - mean).array().square().matrix();
    }
    var /= static_cast<double>(train_rows.size());
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double sd = std::sqrt(var(j));
      if (sd > kConstantFeature * std::max(1.0, std::abs(mean(j)))) scale(j) = sd;
    }
  }

  Rng init_rng(derive_seed(cfg.master_seed, "inet-init"));
  Rng shuffle_rng(derive_seed(cfg.master_seed, "inet-shuffle"));
  InetTrainResult result{
      nn::Mlp::initialized(inet_layer_dims(cfg, static_cast<std::size_t>(ds.inputs.cols())),
                           inet_activations(cfg), init_rng),
      {}};
  nn::Mlp& net = result.net;
  nn::OptimizerState state = nn::OptimizerState::create(net, cfg.inet_optimizer);

  Matrix design;
  if (cfg.family == Family::polynomial) {
    design = families::design_matrix(*families::canonical_basis(cfg.n, cfg.d),
                                     loss_sample_points(cfg));
  }
  auto loss_fn = [&](const Matrix& pred, const Matrix& target) {
    if (cfg.family == Family::polynomial) return nn::loss_polynomial_design(pred, target, design);
    return cfg.inet_boolean_loss == BooleanInetLoss::l1 ? nn::loss_boolean(pred, target)
                                                        : nn::loss_boolean_bce(pred, target);
  };

  double last_finite = std::nan("");
  nn::ForwardCache cache;
  const std::size_t batch = cfg.inet_batch_size;
  for (int epoch = 1; epoch <= cfg.inet_epochs; ++epoch) {
    shuffle_rng.shuffle(train_rows.begin(), train_rows.end());
    double weighted = 0.0;
    for (std::size_t start = 0; start < train_rows.size(); start += batch) {
      const std::size_t end = std::min(train_rows.size(), start + batch);
      const std::vector<std::size_t> rows(train_rows.begin() + static_cast<std::ptrdiff_t>(start),
                                          train_rows.begin() + static_cast<std::ptrdiff_t>(end));
      Matrix x = gather(ds.inputs, rows);
      if (cfg.inet_standardize) {
        x = ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
      }
      const Matrix y = gather(ds.targets, rows);
      const Matrix pred = nn::forward(net, x, &cache);
      const nn::LossResult loss = loss_fn(pred, y);
      if (!std::isfinite(loss.value)) {
        throw DivergenceError("I-Net loss became non-finite in epoch " + std::to_string(epoch),
                              last_finite);
      }
      try {
        nn::apply_update(net, nn::backward(net, cache, loss.grad), state);
      } catch (const DivergenceError&) {
        throw DivergenceError("I-Net gradient became non-finite in epoch " + std::to_string(epoch),
                              last_finite);
      }
      last_finite = loss.value;
      weighted += loss.value * static_cast<double>(end - start);
    }
    result.epoch_losses.push_back(weighted / static_cast<double>(train_rows.size()));
    if (options.log_progress) {
      log::info("I-Net epoch " + std::to_string(epoch) + "/" + std::to_string(cfg.inet_epochs) +
                " loss " + std::to_string(result.epoch_losses.back()));
    }
  }
  if (cfg.inet_standardize) {
    // Fold the input transform into the first layer so the model takes raw mu.
    Matrix& w = net.weights.front();
    w = (w.array().rowwise() / scale.transpose().array()).matrix();
    net.biases.front() -= w * mean;
    ++net.revision;
  }
  return result;
}

}  // namespace xrai::pipeline
