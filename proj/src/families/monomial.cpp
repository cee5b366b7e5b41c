#include "xrai/families/monomial.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::families {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / num) {
      throw ConfigError("binomial coefficient overflows 64 bits");
    }
    result = result * num / static_cast<std::uint64_t>(i);
  }
  return result;
}

namespace {

void extend(Exponents& current, int var, int remaining, std::vector<Exponents>& out) {
  if (var == static_cast<int>(current.size())) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    current[var] = e;
    extend(current, var + 1, remaining - e, out);
  }
  current[var] = 0;
}

}  // namespace

std::vector<Exponents> enumerate_monomials(int n, int d) {
  if (n < 1) throw ConfigError("monomials need at least one variable");
  if (d < 0) throw ConfigError("monomial degree must be non-negative");
  std::vector<Exponents> out;
  out.reserve(monomial_count(n, d));
  Exponents current(static_cast<std::size_t>(n), 0);
  extend(current, 0, d, out);
  std::sort(out.begin(), out.end(), [](const Exponents& a, const Exponents& b) {
    const int deg_a = std::accumulate(a.begin(), a.end(), 0);
    const int deg_b = std::accumulate(b.begin(), b.end(), 0);
    if (deg_a != deg_b) return deg_a > deg_b;
    const int max_a = *std::max_element(a.begin(), a.end());
    const int max_b = *std::max_element(b.begin(), b.end());
    if (max_a != max_b) return max_a > max_b;
    return a > b;
  });
  return out;
}

int degree_for_count(int n, std::size_t count) {
  for (int d = 0; d <= 64; ++d) {
    const std::size_t c = monomial_count(n, d);
    if (c == count) return d;
    if (c > count) break;
  }
  throw ConfigError(std::to_string(count) + " coefficients is not C(n+d, d) for n = " +
                    std::to_string(n));
}

double monomial_value(const Exponents& e, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e[i]; ++k) v *= x[i];
  }
  return v;
}

nn::Matrix design_matrix(const std::vector<Exponents>& monomials, const nn::Matrix& points) {
  nn::Matrix out(points.rows(), static_cast<Eigen::Index>(monomials.size()));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const std::span<const double> x(points.row(r).data(), static_cast<std::size_t>(points.cols()));
    for (std::size_t k = 0; k < monomials.size(); ++k) {
      if (monomials[k].size() != x.size()) {
        throw DimensionError("point dimension does not match monomial arity");
      }
      out(r, static_cast<Eigen::Index>(k)) = monomial_value(monomials[k], x);
    }
  }
  return out;
}

}  // namespace xrai::families
