#include "xrai/eval/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <string>

#include "xrai/eval/metrics.hpp"
#include "xrai/nn/gradcheck.hpp"
#include "xrai/pipeline/lambda.hpp"

namespace xrai::eval {

namespace {

using families::BooleanFunction;
using families::Exponents;
using nn::Activation;

bool check_encodings() {
  // 3x^3 - 5xy^2 + x^2 - 3y - 4 and the CDNF !x1x2x3 | x1!x2!x3 | x1x2x3.
  const Polynomial p = families::encode_polynomial(
      {{{3, 0}, 3.0}, {{1, 2}, -5.0}, {{2, 0}, 1.0}, {{0, 1}, -3.0}, {{0, 0}, -4.0}}, 2, 3);
  const std::vector<double> expected_p{3, 0, 0, -5, 1, 0, 0, 0, -3, -4};
  std::vector<std::uint8_t> table(8);
  std::vector<std::uint8_t> formula(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto a = families::assignment_of(i, 3);
    table[i] = (!a[0] && a[1] && a[2]) || (a[0] && !a[1] && !a[2]) || (a[0] && a[1] && a[2]);
    formula[i] = (a[0] && !a[2]) || (a[1] && a[2]);
  }
  const BooleanFunction b = families::encode_boolean(table);
  const std::vector<std::uint8_t> expected_b{0, 0, 0, 1, 1, 0, 0, 1};
  const std::vector<std::uint8_t> expected_formula{0, 0, 0, 1, 1, 0, 1, 1};
  if (families::encode_boolean(formula).minterms() != expected_formula) return false;
  return p.coeffs() == expected_p && b.minterms() == expected_b;
}

bool check_boolean_round_trip() {
  for (int n : {2, 3}) {
    const std::size_t len = std::size_t{1} << n;
    for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
      std::vector<std::uint8_t> bits(len);
      std::vector<double> raw(len);
      for (std::size_t i = 0; i < len; ++i) {
        bits[i] = (code >> i) & 1u;
        raw[i] = bits[i];
      }
      if (families::decode_boolean(raw) != families::encode_boolean(bits)) return false;
    }
  }
  return true;
}

bool check_monomial_counts() {
  for (int n = 1; n <= 6; ++n) {
    for (int d = 0; d <= 3; ++d) {
      // Generate-and-filter over the (d+1)^n exponent box.
      std::set<Exponents> brute;
      Exponents e(static_cast<std::size_t>(n), 0);
      for (;;) {
        int sum = 0;
        for (int x : e) sum += x;
        if (sum <= d) brute.insert(e);
        std::size_t v = 0;
        while (v < e.size() && ++e[v] > d) e[v++] = 0;
        if (v == e.size()) break;
      }
      const auto list = families::enumerate_monomials(n, d);
      const std::set<Exponents> uniq(list.begin(), list.end());
      if (uniq.size() != list.size() || uniq != brute) return false;
    }
  }
  return true;
}

nn::Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

bool check_gradients() {
  Rng rng(7);
  const nn::Matrix x = uniform_matrix(6, 3, rng);
  for (Activation hidden : {Activation::relu, Activation::sigmoid, Activation::linear}) {
    for (Activation out : {Activation::relu, Activation::sigmoid, Activation::linear}) {
      const nn::Mlp net = nn::Mlp::initialized({3, 5, 4}, {hidden, out}, rng);
      nn::Matrix target(6, 4);
      for (Eigen::Index i = 0; i < target.size(); ++i) target.data()[i] = rng.coin() ? 1.0 : 0.0;
      const nn::KinkArguments abs_kink = [&](const nn::Matrix& p) { return nn::Matrix(p - target); };
      const nn::Matrix pts = uniform_matrix(7, 2, rng);
      const nn::Matrix design =
          families::design_matrix(families::enumerate_monomials(2, 1), pts);  // K = 3
      const nn::Matrix poly_target = uniform_matrix(6, 3, rng);
      struct Case {
        nn::OutputLoss loss;
        nn::KinkArguments kinks;
        bool needs_unit_interval;
      };
      const std::vector<Case> cases = {
          {[&](const nn::Matrix& p) { return nn::loss_bce(p, target); }, {}, true},
          {[&](const nn::Matrix& p) { return nn::loss_mae(p, target); }, abs_kink, false},
          {[&](const nn::Matrix& p) { return nn::loss_boolean(p, target); }, abs_kink, false},
          {[&](const nn::Matrix& p) { return nn::loss_boolean_bce(p, target); }, {}, true},
      };
      for (const auto& c : cases) {
        if (c.needs_unit_interval && out != Activation::sigmoid) continue;
        const auto report = nn::gradient_check(net, x, c.loss, c.kinks, rng);
        if (report.failures != 0 || report.checked == 0) return false;
      }
      const nn::Mlp poly_net = nn::Mlp::initialized({3, 5, 3}, {hidden, out}, rng);
      const auto report = nn::gradient_check(
          poly_net, x,
          [&](const nn::Matrix& p) { return nn::loss_polynomial_design(p, poly_target, design); },
          [&](const nn::Matrix& p) { return nn::Matrix((p - poly_target) * design.transpose()); },
          rng);
      if (report.failures != 0 || report.checked == 0) return false;
    }
  }
  return true;
}

bool check_lstsq() {
  Rng rng(11);
  const Polynomial truth = families::sample_polynomial(3, 3, {-10, 10}, rng);
  nn::Matrix pts(80, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform(-1, 1);
  const Polynomial fit = oracle_lstsq_polynomial(
      [&](std::span<const double> x) { return families::eval_polynomial(truth, x); }, 3, 3, pts);
  for (std::size_t k = 0; k < truth.coeffs().size(); ++k) {
    if (std::fabs(fit.coeffs()[k] - truth.coeffs()[k]) > 1e-8) return false;
  }
  return true;
}

bool check_distill() {
  auto cfg = pipeline::ExperimentConfig::defaults(families::Family::boolean, 3, 0);
  cfg.lambda_epochs = 400;
  cfg.lambda_learning_rate = 0.5;
  cfg.checkpoint_epochs.clear();
  std::vector<std::uint8_t> table{0, 0, 0, 1, 1, 0, 0, 1};
  const BooleanFunction target = families::encode_boolean(table);
  const auto rec = pipeline::train_lambda_net(target, cfg, 3);
  const auto net = pipeline::lambda_net_from_mu(cfg, rec.mu);
  return oracle_distill_boolean(net, 3) == target;
}

bool check_baseline() {
  Rng rng(derive_seed(0, "verify-baseline"));
  const auto est = baseline_boolean(4, 100000, rng);
  return std::fabs(est.mean - 0.5) <= 0.01;
}

}  // namespace

bool run_oracle_suite(std::ostream& out) {
  const std::vector<std::pair<const char*, std::function<bool()>>> checks = {
      {"encoding anchors", check_encodings},
      {"boolean round trip (exhaustive, n = 2, 3)", check_boolean_round_trip},
      {"monomial enumeration vs brute force (n <= 6, d <= 3)", check_monomial_counts},
      {"backprop vs finite differences", check_gradients},
      {"least-squares coefficient recovery", check_lstsq},
      {"truth-table distillation", check_distill},
      {"boolean naive baseline", check_baseline},
  };
  bool all = true;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      out << "ERROR " << name << ": " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace xrai::eval
