#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "xrai/errors.hpp"
#include "xrai/eval/experiments.hpp"
#include "xrai/eval/metrics.hpp"
#include "xrai/eval/verify.hpp"
#include "xrai/families/monomial.hpp"
#include "xrai/pipeline/inet.hpp"
#include "xrai/pipeline/lambda.hpp"

using namespace xrai;
using namespace xrai::eval;
using pipeline::ExperimentConfig;
using pipeline::Family;
namespace fs = std::filesystem;

namespace {

Matrix random_binary(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.coin() ? 1.0 : 0.0;
  return m;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo, double hi) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("xrai_eval_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// An n -> 1 ReLU net that memorizes a truth table: one hidden unit per true minterm.
Mlp memorizing_net(const BooleanFunction& f) {
  const int n = f.n();
  const auto h = static_cast<int>(f.size());
  Mlp net = Mlp::zeros({n, h, 1}, {nn::Activation::relu, nn::Activation::sigmoid});
  for (std::size_t m = 0; m < f.size(); ++m) {
    const auto row = static_cast<Eigen::Index>(m);
    const auto a = families::assignment_of(m, n);
    int ones = 0;
    for (int v = 0; v < n; ++v) {
      net.weights[0](row, v) = a[static_cast<std::size_t>(v)] ? 1.0 : -1.0;
      ones += a[static_cast<std::size_t>(v)];
    }
    net.biases[0](row) = 1.0 - ones;  // fires (value 1) only on its own minterm
    net.weights[1](0, row) = f.contains(m) ? 20.0 : 0.0;
  }
  net.biases[1](0) = -10.0;
  return net;
}

}  // namespace

TEST_CASE("boolean scoring examples") {
  Rng rng(1);
  const Matrix t = random_binary(20, 16, rng);
  const BooleanScores same = score_boolean_predictions(t, t);
  CHECK(same.minterm_accuracy == 1.0);
  CHECK(same.exact_match_rate == 1.0);
  CHECK(same.functions == 20);

  const Matrix big = random_binary(4000, 16, rng);
  const Matrix below = Matrix::Constant(4000, 16, 0.5 - 1e-9);
  CHECK(score_boolean_predictions(below, big).minterm_accuracy == doctest::Approx(0.5).epsilon(0.02));

  Matrix one = t.topRows(1);
  Matrix wrong = one;
  wrong(0, 5) = 1.0 - wrong(0, 5);
  const BooleanScores s = score_boolean_predictions(wrong, one);
  CHECK(s.minterm_accuracy == doctest::Approx(15.0 / 16.0));
  CHECK(s.exact_match_rate == 0.0);
  CHECK_THROWS_AS(score_boolean_predictions(Matrix(0, 16), Matrix(0, 16)), ConfigError);
}

TEST_CASE("exact match never exceeds minterm accuracy and scores ignore row order") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix t = random_binary(30, 8, rng);
    Matrix p = t;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (rng.uniform() < 0.05) p.data()[i] = 1.0 - p.data()[i];
    }
    const BooleanScores s = score_boolean_predictions(p, t);
    CHECK(s.exact_match_rate <= s.minterm_accuracy);
    Matrix pr = p.colwise().reverse(), tr = t.colwise().reverse();
    const BooleanScores r = score_boolean_predictions(pr, tr);
    CHECK(r.minterm_accuracy == s.minterm_accuracy);
    CHECK(r.exact_match_rate == s.exact_match_rate);
  }
}

TEST_CASE("polynomial scoring examples") {
  Rng rng(3);
  const Matrix pts = random_matrix(100, 2, rng, -1, 1);
  const Matrix t = random_matrix(5, 10, rng, -10, 10);
  CHECK(score_polynomial_predictions(t, t, pts) == 0.0);
  Matrix c = Matrix::Zero(1, 10);
  c(0, 9) = -3.25;  // constant term
  CHECK(score_polynomial_predictions(Matrix::Zero(1, 10), c, pts) == doctest::Approx(3.25));

  const Matrix p = random_matrix(5, 10, rng, -10, 10);
  const auto mons = families::enumerate_monomials(2, 3);
  double expected = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 100; ++j) {
      const std::vector<double> x{pts(j, 0), pts(j, 1)};
      const Polynomial pp(2, 3, std::vector<double>(p.row(i).data(), p.row(i).data() + 10));
      const Polynomial tt(2, 3, std::vector<double>(t.row(i).data(), t.row(i).data() + 10));
      expected += std::abs(pp(x) - tt(x));
    }
  }
  CHECK(std::abs(score_polynomial_predictions(p, t, pts) - expected / 500.0) <= 1e-10);
}

TEST_CASE("lambda-net boolean accuracy") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::boolean, 3, 0);
  Rng rng(4);
  std::vector<pipeline::LambdaRecord> memorized, untrained;
  for (std::size_t i = 0; i < 200; ++i) {
    const BooleanFunction f = families::sample_boolean(3, rng);
    ExperimentConfig small = cfg;
    small.lambda_hidden = 8;
    pipeline::LambdaRecord r;
    r.index = i;
    r.function = f;
    r.mu = memorizing_net(f).flatten();
    memorized.push_back(r);
    r.mu.assign(r.mu.size(), 0.0);
    untrained.push_back(r);
  }
  cfg.lambda_hidden = 8;
  CHECK(eval_lambda_boolean(memorized, cfg) == 1.0);
  const double zero = eval_lambda_boolean(untrained, cfg);
  CHECK(zero == doctest::Approx(0.5).epsilon(0.06));
  CHECK(zero >= 0.0);
  CHECK(zero <= 1.0);
}

TEST_CASE("lambda-net polynomial error") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::polynomial, 2, 1);
  cfg.lambda_hidden = 4;
  // relu(x) - relu(-x) = x, so this net computes x1 + 2 x2 - 0.5 exactly.
  Mlp net = Mlp::zeros({2, 4, 1}, {nn::Activation::relu, nn::Activation::linear});
  net.weights[0] << 1, 0, -1, 0, 0, 1, 0, -1;
  net.weights[1] << 1, -1, 2, -2;
  net.biases[1] << -0.5;
  pipeline::LambdaRecord perfect;
  perfect.function = Polynomial(2, 1, {1, 2, -0.5});
  perfect.mu = net.flatten();
  Rng rng(5);
  const Matrix pts = random_matrix(200, 2, rng, -1, 1);
  CHECK(eval_lambda_polynomial(std::vector{perfect}, cfg, pts) == doctest::Approx(0.0).scale(1.0));
  pipeline::LambdaRecord zero;
  zero.function = Polynomial(2, 1);
  zero.mu.assign(net.parameter_count(), 0.0);
  CHECK(eval_lambda_polynomial(std::vector{zero}, cfg, pts) == 0.0);

  pipeline::LambdaRecord off = perfect;
  off.function = Polynomial(2, 1, {0, 0, 1});
  double expected = 0.0;
  for (Eigen::Index j = 0; j < 200; ++j) expected += std::abs(pts(j, 0) + 2 * pts(j, 1) - 0.5 - 1.0);
  CHECK(eval_lambda_polynomial(std::vector{off}, cfg, pts) == doctest::Approx(expected / 200));
}

TEST_CASE("boolean naive baseline") {
  Rng a(6), b(6);
  const MonteCarloEstimate est = baseline_boolean(4, 100000, a);
  CHECK(std::abs(est.mean - 0.5) <= 0.01);
  CHECK(std::abs(est.mean - 0.5) <= 3 * est.std_error + 1e-12);
  CHECK(baseline_boolean(4, 100000, b).mean == est.mean);
  for (int n : {1, 3, 6}) {
    Rng r(derive_seed(6, static_cast<std::uint64_t>(n), "baseline"));
    const MonteCarloEstimate e = baseline_boolean(n, 20000, r);
    CHECK(std::abs(e.mean - 0.5) <= 3 * e.std_error);
  }
  CHECK_THROWS_AS(baseline_boolean(4, 0, a), ConfigError);
}

TEST_CASE("polynomial naive baseline") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::polynomial, 4, 3);
  const Matrix pts = pipeline::evaluation_points(cfg);
  Rng a(7), b(8);
  const MonteCarloEstimate x = baseline_polynomial(4, 3, {-10, 10}, 12500, pts, a);
  const MonteCarloEstimate y = baseline_polynomial(4, 3, {-10, 10}, 12500, pts, b);
  CHECK(x.mean >= 14.94 * 0.85);
  CHECK(x.mean <= 14.94 * 1.15);
  CHECK(std::abs(x.mean - y.mean) / x.mean <= 0.02);
  Rng c(9);
  CHECK(baseline_polynomial(4, 3, {0, 0}, 100, pts, c).mean == 0.0);
  CHECK_THROWS_AS(baseline_polynomial(4, 3, {-10, 10}, 0, pts, c), ConfigError);
}

TEST_CASE("distillation oracle") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const BooleanFunction f = families::sample_boolean(4, rng);
    CHECK(oracle_distill_boolean(memorizing_net(f), 4) == f);
  }
  const Mlp zero = Mlp::zeros({3, 5, 1}, {nn::Activation::relu, nn::Activation::sigmoid});
  CHECK(oracle_distill_boolean(zero, 3).minterms() == std::vector<std::uint8_t>(8, 1));
}

TEST_CASE("distillation agrees with lambda accuracy by construction") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::boolean, 3, 0);
  cfg.lambda_count = 30;
  cfg.lambda_epochs = 15;
  cfg.checkpoint_epochs.clear();
  const auto records = pipeline::run_lambda_population(cfg);
  double agree = 0.0;
  for (const auto& r : records) {
    const auto g = oracle_distill_boolean(pipeline::lambda_net_from_mu(cfg, r.mu), 3);
    const auto& f = std::get<BooleanFunction>(r.function);
    for (std::size_t m = 0; m < 8; ++m) agree += f.minterms()[m] == g.minterms()[m];
  }
  CHECK(eval_lambda_boolean(records, cfg) == doctest::Approx(agree / (30.0 * 8)));
}

TEST_CASE("least-squares oracle recovers exact polynomials") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Polynomial p = families::sample_polynomial(4, 3, {-10, 10}, rng);
    const Matrix pts = random_matrix(70, 4, rng, -1, 1);
    const Polynomial fit =
        oracle_lstsq_polynomial([&](std::span<const double> x) { return p(x); }, 4, 3, pts);
    for (std::size_t k = 0; k < 35; ++k) CHECK(std::abs(fit.coeffs()[k] - p.coeffs()[k]) <= 1e-8);
  }
  const Matrix pts = random_matrix(20, 2, rng, -1, 1);
  const Polynomial zero = oracle_lstsq_polynomial([](std::span<const double>) { return 0.0; }, 2, 2, pts);
  CHECK(zero.coeffs() == std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(oracle_lstsq_polynomial([](std::span<const double>) { return 0.0; }, 2, 2,
                                          random_matrix(11, 2, rng, -1, 1)),
                  ConfigError);
}

TEST_CASE("least-squares residual shrinks in trend as fit points grow") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::polynomial, 2, 2);
  cfg.lambda_epochs = 30;
  cfg.checkpoint_epochs.clear();
  Rng frng(12);
  const auto f = pipeline::sample_target(cfg, frng);
  const auto rec = pipeline::train_lambda_net(f, cfg, 77);
  const Mlp net = pipeline::lambda_net_from_mu(cfg, rec.mu);
  Rng rng(13);
  const Matrix check = random_matrix(4000, 2, rng, -1, 1);
  auto held_out_error = [&](std::size_t m, std::uint64_t seed) {
    Rng r(seed);
    const Polynomial fit = oracle_lstsq_polynomial(net, 2, 2, random_matrix(static_cast<Eigen::Index>(m), 2, r, -1, 1));
    const Matrix out = nn::predict(net, check);
    double err = 0.0;
    for (Eigen::Index j = 0; j < check.rows(); ++j) {
      const std::vector<double> x{check(j, 0), check(j, 1)};
      err += std::pow(fit(x) - out(j, 0), 2);
    }
    return err / static_cast<double>(check.rows());
  };
  double small = 0.0, large = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    small += held_out_error(12, s);
    large += held_out_error(400, 100 + s);
  }
  CHECK(large <= small);
}

TEST_CASE("reports validate their invariants") {
  EvalReport r;
  r.metric = "minterm_accuracy";
  r.inet_score = 0.9;
  CHECK_NOTHROW(r.validate());
  r.inet_score = 1.2;
  CHECK_THROWS(r.validate());
  r.metric = "polynomial_mae";
  r.inet_score = -1;
  CHECK_THROWS(r.validate());
  r.inet_score = std::nan("");
  CHECK_THROWS(r.validate());
}

TEST_CASE("experiment series write the documented CSV schemas") {
  ExperimentConfig cfg = ExperimentConfig::defaults(Family::boolean, 2, 0);
  cfg.lambda_count = 60;
  cfg.lambda_epochs = 20;
  cfg.inet_hidden = 32;
  cfg.inet_epochs = 5;
  cfg.checkpoint_epochs = {10, 20};
  SeriesOptions opts;
  opts.variable_counts = {2, 3};
  opts.baseline_trials = 1000;
  opts.train_sizes = {10, 20, 1000};
  const fs::path dir = scratch("series");

  const auto s1 = experiment_series(1, cfg, dir, opts);
  const auto l1 = read_lines(dir / "series1.csv");
  REQUIRE(l1.size() == 5);
  CHECK(l1[0] == "family,n,metric,inet,lambda,baseline");
  CHECK(l1[1].starts_with("boolean,2,minterm_accuracy,"));
  CHECK(l1[2].starts_with("boolean,2,exact_match_rate,"));
  CHECK(l1[4].ends_with(",0.00390625"));  // 0.5^8
  CHECK(s1.size() == 4);

  const auto s2 = experiment_series(2, cfg, dir, opts);
  const auto l2 = read_lines(dir / "series2.csv");
  CHECK(l2[0] == "family,n,epoch,model,score");
  CHECK(l2.size() == 5);  // one row per (epoch, model)
  CHECK(l2[1].starts_with("boolean,2,10,inet,"));
  CHECK(l2[2].starts_with("boolean,2,10,lambda,"));
  CHECK(s2.size() == 2);

  const auto s3 = experiment_series(3, cfg, dir, opts);
  const auto l3 = read_lines(dir / "series3.csv");
  CHECK(l3[0] == "family,n,train_size,model,score");
  CHECK(l3.size() == 5);  // size 1000 exceeds the training split and is skipped
  CHECK(s3.size() == 2);
  CHECK(s3[0].train_samples == 10);

  CHECK_THROWS_AS(experiment_series(4, cfg, dir, opts), ConfigError);
}

TEST_CASE("oracle suite passes") {
  std::ostringstream out;
  CHECK(run_oracle_suite(out));
  CHECK(out.str().find("FAIL") == std::string::npos);
}
