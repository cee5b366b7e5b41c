#include "xrai/pipeline/lambda.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "xrai/errors.hpp"
#include "xrai/log.hpp"
#include "xrai/nn/loss.hpp"
#include "xrai/nn/optimizer.hpp"

namespace xrai::pipeline {

using families::BooleanFunction;
using families::Polynomial;
using nn::Matrix;

nn::Batch generate_lambda_dataset(const TargetFunction& f, std::size_t s, Range n_range,
                                  Rng& rng) {
  nn::Batch batch;
  if (const auto* b = std::get_if<BooleanFunction>(&f)) {
    const int n = b->n();
    const auto rows = static_cast<Eigen::Index>(b->size());
    batch.inputs.resize(rows, n);
    batch.targets.resize(rows, 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto a = families::assignment_of(static_cast<std::size_t>(i), n);
      for (int v = 0; v < n; ++v) batch.inputs(i, v) = a[static_cast<std::size_t>(v)];
      batch.targets(i, 0) = b->minterms()[static_cast<std::size_t>(i)];
    }
    return batch;
  }
  if (s < 1) throw ConfigError("lambda training set size must be at least 1");
  const auto& p = std::get<Polynomial>(f);
  const auto rows = static_cast<Eigen::Index>(s);
  batch.inputs.resize(rows, p.n());
  batch.targets.resize(rows, 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int v = 0; v < p.n(); ++v) batch.inputs(i, v) = rng.uniform(n_range.lo, n_range.hi);
    batch.targets(i, 0) = families::eval_polynomial(
        p, std::span<const double>(batch.inputs.row(i).data(), static_cast<std::size_t>(p.n())));
  }
  return batch;
}

std::vector<int> lambda_layer_dims(const ExperimentConfig& cfg) {
  return {cfg.n, cfg.lambda_hidden, 1};
}

std::vector<nn::Activation> lambda_activations(const ExperimentConfig& cfg) {
  return {nn::Activation::relu, cfg.family == Family::boolean ? nn::Activation::sigmoid
                                                              : nn::Activation::linear};
}

std::size_t lambda_parameter_count(const ExperimentConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.n);
  const auto h = static_cast<std::size_t>(cfg.lambda_hidden);
  return (n * h + h) + (h + 1);
}

nn::Mlp lambda_net_from_mu(const ExperimentConfig& cfg, std::span<const double> mu) {
  nn::Mlp net = nn::Mlp::zeros(lambda_layer_dims(cfg), lambda_activations(cfg));
  net.assign(mu);
  return net;
}

nn::Mlp lambda_initial_net(const ExperimentConfig& cfg, std::uint64_t task_seed) {
  Rng rng(cfg.lambda_shared_init ? derive_seed(cfg.master_seed, "lambda-init")
                                 : derive_seed(task_seed, "init"));
  return nn::Mlp::initialized(lambda_layer_dims(cfg), lambda_activations(cfg), rng);
}

TargetFunction sample_target(const ExperimentConfig& cfg, Rng& rng) {
  if (cfg.family == Family::boolean) return families::sample_boolean(cfg.n, rng);
  return families::sample_polynomial(cfg.n, cfg.d, cfg.coeff_range, rng);
}

namespace {

nn::LossResult lambda_loss(const ExperimentConfig& cfg, const Matrix& pred, const Matrix& target) {
  return cfg.family == Family::boolean ? nn::loss_bce(pred, target) : nn::loss_mae(pred, target);
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

LambdaRecord train_lambda_net(const TargetFunction& f, const ExperimentConfig& cfg,
                              std::uint64_t task_seed) {
  if (families::family_of(f) != cfg.family) {
    throw ConfigError("target function family does not match the configuration");
  }
  LambdaRecord record;
  record.function = f;
  record.task_seed = task_seed;

  Rng data_rng(derive_seed(task_seed, "data"));
  Rng shuffle_rng(derive_seed(task_seed, "shuffle"));
  const nn::Batch data = generate_lambda_dataset(f, cfg.lambda_train_size, cfg.n_range, data_rng);
  const auto rows = static_cast<std::size_t>(data.size());

  nn::Mlp net = lambda_initial_net(cfg, task_seed);
  nn::OptimizerConfig sgd = nn::OptimizerConfig::defaults(nn::OptimizerKind::sgd);
  sgd.learning_rate = cfg.lambda_learning_rate;
  nn::OptimizerState state = nn::OptimizerState::create(net, sgd);

  const std::set<int> checkpoints(cfg.checkpoint_epochs.begin(), cfg.checkpoint_epochs.end());
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const bool full_batch = cfg.lambda_batch_size >= rows;

  nn::ForwardCache cache;
  for (int epoch = 1; epoch <= cfg.lambda_epochs && !record.diverged; ++epoch) {
    if (!full_batch) shuffle_rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < rows; start += cfg.lambda_batch_size) {
      const std::size_t end = std::min(rows, start + cfg.lambda_batch_size);
      const Matrix& x = full_batch ? data.inputs : gather_rows(data.inputs, {&order[start], end - start});
      const Matrix& y = full_batch ? data.targets : gather_rows(data.targets, {&order[start], end - start});
      const Matrix pred = nn::forward(net, x, &cache);
      const nn::LossResult loss = lambda_loss(cfg, pred, y);
      if (!std::isfinite(loss.value)) {
        record.diverged = true;
        break;
      }
      try {
        nn::apply_update(net, nn::backward(net, cache, loss.grad), state);
      } catch (const DivergenceError&) {
        record.diverged = true;
        break;
      }
    }
    if (!record.diverged && checkpoints.contains(epoch)) record.checkpoints[epoch] = net.flatten();
  }

  record.mu = net.flatten();
  const double final_loss = lambda_loss(cfg, nn::predict(net, data.inputs), data.targets).value;
  record.final_loss = final_loss;
  if (!std::isfinite(final_loss) || !net.all_finite()) record.diverged = true;
  return record;
}

std::vector<LambdaRecord> run_lambda_population(const ExperimentConfig& cfg,
                                                const PopulationOptions& options) {
  cfg.validate();
  const std::size_t total = cfg.lambda_count;
  std::vector<LambdaRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        Rng fn_rng(derive_seed(cfg.master_seed, i, "fn"));
        const TargetFunction f = sample_target(cfg, fn_rng);
        LambdaRecord r = train_lambda_net(f, cfg, derive_seed(cfg.master_seed, i, "train"));
        r.index = i;
        records[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(finished, total);
      }
    }
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t diverged = count_diverged(records);
  if (diverged > 0) {
    log::info("lambda population: " + std::to_string(diverged) + " of " + std::to_string(total) +
              " nets diverged and will be excluded");
  }
  if (static_cast<double>(diverged) > 0.01 * static_cast<double>(total)) {
    log::warn("lambda divergence rate exceeds 1% (" + std::to_string(diverged) + "/" +
              std::to_string(total) + ")");
  }
  return records;
}

std::size_t count_diverged(std::span<const LambdaRecord> records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.diverged; }));
}

}  // namespace xrai::pipeline
