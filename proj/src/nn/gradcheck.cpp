#include "xrai/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace xrai::nn {

namespace {

// True if an entry that moves between a and b comes within `margin` of zero or changes sign.
// Entries left unchanged by the probe do not depend on the coordinate and cannot bias it.
bool near_kink(const Matrix& a, const Matrix& b, double margin) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    if (x == y) continue;
    if (std::fabs(x) < margin || std::fabs(y) < margin || (x > 0) != (y > 0)) return true;
  }
  return false;
}

struct Probe {
  double loss = 0.0;
  ForwardCache cache;
  Matrix pred;
};

Probe probe(const Mlp& net, const Matrix& inputs, const OutputLoss& loss) {
  Probe p;
  p.pred = forward(net, inputs, &p.cache);
  p.loss = loss(p.pred).value;
  return p;
}

}  // namespace

GradCheckReport gradient_check(const Mlp& net, const Matrix& inputs, const OutputLoss& loss,
                               const KinkArguments& kinks, Rng& rng,
                               const GradCheckOptions& options) {
  ForwardCache cache;
  const Matrix pred = forward(net, inputs, &cache);
  const std::vector<double> analytic = backward(net, cache, loss(pred).grad).flatten();
  const std::vector<double> base = net.flatten();

  GradCheckReport report;
  Mlp work = net;
  std::vector<double> theta = base;
  for (std::size_t c = 0; c < options.coordinates; ++c) {
    const std::size_t k = static_cast<std::size_t>(rng.below(base.size()));
    theta[k] = base[k] + options.step;
    work.assign(theta);
    const Probe plus = probe(work, inputs, loss);
    theta[k] = base[k] - options.step;
    work.assign(theta);
    const Probe minus = probe(work, inputs, loss);
    theta[k] = base[k];

    bool skip = false;
    for (std::size_t l = 0; l < net.layer_count() && !skip; ++l) {
      if (net.activations[l] == Activation::relu) {
        skip = near_kink(plus.cache.pre_activations[l], minus.cache.pre_activations[l],
                         options.kink_margin);
      }
    }
    if (!skip && kinks) skip = near_kink(kinks(plus.pred), kinks(minus.pred), options.kink_margin);
    if (skip) {
      ++report.skipped;
      continue;
    }

    const double numeric = (plus.loss - minus.loss) / (2.0 * options.step);
    const double scale = std::max({std::fabs(numeric), std::fabs(analytic[k]), options.scale_floor});
    const double rel = std::fabs(numeric - analytic[k]) / scale;
    report.max_relative_error = std::max(report.max_relative_error, rel);
    ++report.checked;
    if (rel > options.relative_tolerance) ++report.failures;
  }
  return report;
}

}  // namespace xrai::nn
