#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "xrai/errors.hpp"
#include "xrai/eval/metrics.hpp"
#include "xrai/families/monomial.hpp"
#include "xrai/nn/loss.hpp"
#include "xrai/pipeline/config.hpp"
#include "xrai/pipeline/inet.hpp"
#include "xrai/pipeline/lambda.hpp"

using namespace xrai;
using namespace xrai::pipeline;
using families::BooleanFunction;
using families::Polynomial;

namespace {

ExperimentConfig boolean_cfg(int n, std::size_t count) {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::boolean, n, 0);
  cfg.lambda_count = count;
  return cfg;
}

ExperimentConfig polynomial_cfg(int n, int d, std::size_t count) {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::polynomial, n, d);
  cfg.lambda_count = count;
  return cfg;
}

std::size_t truth_table_hits(const LambdaRecord& r, const ExperimentConfig& cfg) {
  const auto& f = std::get<BooleanFunction>(r.function);
  const BooleanFunction g = eval::oracle_distill_boolean(lambda_net_from_mu(cfg, r.mu), cfg.n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < f.size(); ++i) hits += f.minterms()[i] == g.minterms()[i];
  return hits;
}

double boolean_bce(const ExperimentConfig& cfg, const LambdaRecord& r, std::span<const double> mu) {
  Rng unused(0);
  const nn::Batch data = generate_lambda_dataset(r.function, cfg.lambda_train_size, cfg.n_range, unused);
  return nn::loss_bce(nn::predict(lambda_net_from_mu(cfg, mu), data.inputs), data.targets).value;
}

}  // namespace

TEST_CASE("config defaults follow the architecture rules") {
  const ExperimentConfig b = ExperimentConfig::defaults(Family::boolean, 4, 0);
  CHECK(b.lambda_hidden == 80);
  CHECK(b.lambda_batch_size == 16);
  CHECK(b.lambda_train_size == 16);
  CHECK(b.lambda_epochs == 200);
  CHECK(b.inet_hidden == 2048);
  CHECK(b.inet_epochs == 100);
  CHECK(b.inet_optimizer.kind == nn::OptimizerKind::adadelta);
  CHECK(b.checkpoint_epochs.front() == 10);
  CHECK(b.checkpoint_epochs.size() == 20);
  const ExperimentConfig p = ExperimentConfig::defaults(Family::polynomial, 4, 3);
  CHECK(p.lambda_hidden == 175);
  CHECK(p.inet_optimizer.kind == nn::OptimizerKind::adam);
  CHECK(p.coeff_range == Range{-10, 10});
  CHECK(p.n_range == Range{-1, 1});
  CHECK_NOTHROW(b.validate());
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("config validation cites the violated rule") {
  ExperimentConfig cfg = boolean_cfg(4, 10);
  cfg.lambda_train_size = 10;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("2^n"), ConfigError);
  cfg = boolean_cfg(4, 10);
  cfg.test_fraction = 0.3;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("sum to 1"), ConfigError);
  cfg = boolean_cfg(4, 10);
  cfg.d = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = polynomial_cfg(2, 2, 10);
  cfg.checkpoint_epochs = {500};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("with_variables rescales only defaulted size fields") {
  ExperimentConfig cfg = boolean_cfg(4, 10);
  const ExperimentConfig five = with_variables(cfg, 5);
  CHECK(five.lambda_hidden == 160);
  CHECK(five.lambda_train_size == 32);
  cfg.lambda_hidden = 12;
  CHECK(with_variables(cfg, 5).lambda_hidden == 12);
}

TEST_CASE("boolean lambda data is the complete truth table") {
  Rng rng(1);
  const BooleanFunction f(3, {0, 0, 0, 1, 1, 0, 0, 1});
  const nn::Batch b = generate_lambda_dataset(f, 8, {0, 1}, rng);
  REQUIRE(b.size() == 8);
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < 8; ++i) {
    std::vector<std::uint8_t> a(3);
    for (int v = 0; v < 3; ++v) a[static_cast<std::size_t>(v)] = b.inputs(i, v) > 0.5;
    seen.insert({b.inputs(i, 0), b.inputs(i, 1), b.inputs(i, 2)});
    CHECK(b.targets(i, 0) == families::eval_boolean(f, a));
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("polynomial lambda data samples the target") {
  Rng rng(2);
  const nn::Batch zero = generate_lambda_dataset(Polynomial(3, 2), 100, {-1, 1}, rng);
  CHECK(zero.targets.isZero());
  CHECK(zero.inputs.cwiseAbs().maxCoeff() <= 1.0);
  const nn::Batch ident = generate_lambda_dataset(Polynomial(1, 3, {0, 0, 1, 0}), 100, {-1, 1}, rng);
  CHECK(ident.size() == 100);
  CHECK(ident.targets == ident.inputs);
}

TEST_CASE("parameter count formula matches flattening for many shapes") {
  for (int n = 1; n <= 6; ++n) {
    for (Family fam : {Family::boolean, Family::polynomial}) {
      const ExperimentConfig cfg = fam == Family::boolean ? boolean_cfg(n, 1) : polynomial_cfg(n, 3, 1);
      const auto h = static_cast<std::size_t>(cfg.lambda_hidden);
      const std::size_t expected = (static_cast<std::size_t>(n) * h + h) + (h + 1);
      CHECK(lambda_parameter_count(cfg) == expected);
      CHECK(lambda_initial_net(cfg, 1).flatten().size() == expected);
    }
  }
}

TEST_CASE("boolean lambda nets reproduce most of their truth table") {
  const ExperimentConfig cfg = boolean_cfg(4, 20);
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < 20; ++i) {
    Rng rng(derive_seed(99, i, "fn"));
    const LambdaRecord r = train_lambda_net(sample_target(cfg, rng), cfg, derive_seed(99, i, "train"));
    CHECK_FALSE(r.diverged);
    hits.push_back(truth_table_hits(r, cfg));
  }
  std::nth_element(hits.begin(), hits.begin() + 10, hits.end());
  CHECK(hits[10] >= 14);
}

TEST_CASE("constant-false target beats the uninformed loss") {
  const ExperimentConfig cfg = boolean_cfg(4, 1);
  const LambdaRecord r = train_lambda_net(BooleanFunction(4), cfg, 5);
  CHECK(r.final_loss < std::numbers::ln2);
}

TEST_CASE("lambda training is deterministic") {
  const ExperimentConfig cfg = polynomial_cfg(2, 2, 1);
  Rng rng(7);
  const auto f = sample_target(cfg, rng);
  ExperimentConfig quick = cfg;
  quick.lambda_epochs = 20;
  quick.checkpoint_epochs = {10, 20};
  const LambdaRecord a = train_lambda_net(f, quick, 123);
  const LambdaRecord b = train_lambda_net(f, quick, 123);
  CHECK(a.mu == b.mu);
  CHECK(a.checkpoints == b.checkpoints);
  CHECK(a.checkpoints.at(20) == a.mu);
  CHECK(a.final_loss == b.final_loss);
}

TEST_CASE("population results do not depend on the worker count") {
  ExperimentConfig cfg = boolean_cfg(3, 10);
  const auto one = run_lambda_population(cfg, {1, {}});
  const auto eight = run_lambda_population(cfg, {8, {}});
  REQUIRE(one.size() == 10);
  REQUIRE(eight.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(one[i].index == i);
    CHECK(one[i].function == eight[i].function);
    CHECK(one[i].mu == eight[i].mu);
    CHECK(one[i].checkpoints == eight[i].checkpoints);
    CHECK(one[i].task_seed == derive_seed(cfg.master_seed, i, "train"));
    CHECK(one[i].mu.size() == lambda_parameter_count(cfg));
  }
  CHECK(count_diverged(one) == 0);
}

TEST_CASE("population targets are nearly all distinct") {
  ExperimentConfig cfg = boolean_cfg(4, 100);
  cfg.lambda_epochs = 1;
  cfg.checkpoint_epochs.clear();
  const auto records = run_lambda_population(cfg);
  std::set<std::vector<std::uint8_t>> distinct;
  for (const auto& r : records) distinct.insert(std::get<BooleanFunction>(r.function).minterms());
  CHECK(distinct.size() >= 95);
}

TEST_CASE("final checkpoint loss does not exceed the first for most records") {
  ExperimentConfig cfg = boolean_cfg(3, 60);
  const auto records = run_lambda_population(cfg);
  std::size_t improved = 0;
  for (const auto& r : records) {
    const double first = boolean_bce(cfg, r, r.checkpoints.begin()->second);
    const double last = boolean_bce(cfg, r, r.checkpoints.rbegin()->second);
    improved += last <= first;
  }
  CHECK(improved >= 57);
}

TEST_CASE("splits are reproducible, disjoint and sized by the fractions") {
  const ExperimentConfig cfg = boolean_cfg(3, 100);
  std::vector<std::size_t> idx(100);
  for (std::size_t i = 0; i < 100; ++i) idx[i] = i;
  const auto s = assign_splits(idx, cfg);
  CHECK(std::count(s.begin(), s.end(), Split::train) == 70);
  CHECK(std::count(s.begin(), s.end(), Split::val) == 5);
  CHECK(std::count(s.begin(), s.end(), Split::test) == 25);
  CHECK(assign_splits(idx, cfg) == s);
  ExperimentConfig full = boolean_cfg(3, 50000);
  std::vector<std::size_t> big(50000);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = i;
  const auto sb = assign_splits(big, full);
  CHECK(std::count(sb.begin(), sb.end(), Split::test) == 12500);
}

TEST_CASE("I-Net dataset pairs mu with target encodings") {
  ExperimentConfig cfg = polynomial_cfg(2, 2, 8);
  cfg.lambda_epochs = 10;
  cfg.checkpoint_epochs = {5, 10};
  const auto records = run_lambda_population(cfg);
  const InetDataset ds = build_inet_dataset(records, cfg);
  CHECK(ds.rows() == 8);
  CHECK(ds.targets.cols() == 6);
  CHECK(static_cast<std::size_t>(ds.inputs.cols()) == lambda_parameter_count(cfg));
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& coeffs = std::get<Polynomial>(records[i].function).coeffs();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      CHECK(ds.targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) == coeffs[k]);
    }
  }
  const InetDataset early = build_inet_dataset(records, cfg, 5);
  CHECK(early.inputs(0, 0) == records[0].checkpoints.at(5)[0]);
  CHECK_THROWS_WITH_AS(build_inet_dataset(records, cfg, 7), doctest::Contains("5, 10"), ConfigError);
}

TEST_CASE("diverged records are excluded from the I-Net dataset") {
  ExperimentConfig cfg = boolean_cfg(2, 4);
  cfg.lambda_epochs = 2;
  cfg.checkpoint_epochs.clear();
  auto records = run_lambda_population(cfg);
  records[1].diverged = true;
  const InetDataset ds = build_inet_dataset(records, cfg);
  CHECK(ds.rows() == 3);
  CHECK(ds.record_index == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("I-Net training reduces loss, memorizes small sets and is deterministic") {
  ExperimentConfig cfg = boolean_cfg(4, 10);
  cfg.train_fraction = 1.0;
  cfg.val_fraction = 0.0;
  cfg.test_fraction = 0.0;
  cfg.lambda_epochs = 20;
  cfg.checkpoint_epochs.clear();
  const auto records = run_lambda_population(cfg);
  const InetDataset ds = build_inet_dataset(records, cfg);
  REQUIRE(ds.rows_in(Split::train).size() == 10);
  const InetTrainResult a = train_inet(ds, cfg);
  CHECK(a.epoch_losses.size() == 100);
  CHECK(a.epoch_losses.back() < a.epoch_losses.front());
  const auto scores = eval::eval_inet_boolean(a.net, ds.inputs_in(Split::train), ds.targets_in(Split::train));
  CHECK(scores.minterm_accuracy >= 0.99);
  const InetTrainResult b = train_inet(ds, cfg);
  CHECK(a.net.flatten() == b.net.flatten());
}

TEST_CASE("I-Net output layer follows the family") {
  const ExperimentConfig b = boolean_cfg(4, 1);
  CHECK(inet_layer_dims(b, 481) == std::vector<int>{481, 2048, 16});
  CHECK(inet_activations(b).back() == nn::Activation::sigmoid);
  const ExperimentConfig p = polynomial_cfg(4, 3, 1);
  CHECK(inet_layer_dims(p, 1051) == std::vector<int>{1051, 2048, 35});
  CHECK(inet_activations(p).back() == nn::Activation::linear);
}

TEST_CASE("loss and evaluation point sets are fixed and disjoint") {
  const ExperimentConfig cfg = polynomial_cfg(4, 3, 1);
  const nn::Matrix l1 = loss_sample_points(cfg);
  const nn::Matrix e1 = evaluation_points(cfg);
  CHECK(l1.rows() == 50);
  CHECK(e1.rows() == 1000);
  CHECK(l1 == loss_sample_points(cfg));
  CHECK(l1.row(0) != e1.row(0));
  CHECK(l1.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("an empty training split is refused") {
  ExperimentConfig cfg = boolean_cfg(2, 2);
  cfg.lambda_epochs = 1;
  cfg.checkpoint_epochs.clear();
  const InetDataset ds = build_inet_dataset(run_lambda_population(cfg), cfg);
  InetTrainOptions opts;
  opts.train_limit = 0;
  CHECK_THROWS_AS(train_inet(ds, cfg, opts), ConfigError);
}
