#include "xrai/families/polynomial.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::families {

std::shared_ptr<const std::vector<Exponents>> canonical_basis(int n, int d) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<Exponents>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, d}];
  if (!slot) slot = std::make_shared<const std::vector<Exponents>>(enumerate_monomials(n, d));
  return slot;
}

Polynomial::Polynomial(int n, int d)
    : n_(n), d_(d), coeffs_(monomial_count(n, d), 0.0), monomials_(canonical_basis(n, d)) {}

Polynomial::Polynomial(int n, int d, std::vector<double> coeffs)
    : n_(n), d_(d), coeffs_(std::move(coeffs)), monomials_(canonical_basis(n, d)) {
  if (coeffs_.size() != monomials_->size()) {
    throw EncodingError("polynomial with n = " + std::to_string(n) + ", d = " +
                        std::to_string(d) + " needs " + std::to_string(monomials_->size()) +
                        " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

double Polynomial::operator()(std::span<const double> x) const { return eval_polynomial(*this, x); }

Polynomial encode_polynomial(const std::map<Exponents, double>& terms, int n, int d) {
  const auto basis = canonical_basis(n, d);
  std::vector<double> coeffs(basis->size(), 0.0);
  for (const auto& [exps, value] : terms) {
    if (exps.size() != static_cast<std::size_t>(n)) {
      throw EncodingError("monomial has " + std::to_string(exps.size()) +
                          " exponents, expected " + std::to_string(n));
    }
    int degree = 0;
    for (int e : exps) {
      if (e < 0) throw EncodingError("negative exponent");
      degree += e;
    }
    if (degree > d) {
      throw EncodingError("monomial of degree " + std::to_string(degree) +
                          " exceeds the maximum degree " + std::to_string(d));
    }
    const auto it = std::find(basis->begin(), basis->end(), exps);
    coeffs[static_cast<std::size_t>(it - basis->begin())] = value;
  }
  return Polynomial(n, d, std::move(coeffs));
}

double eval_polynomial(const Polynomial& p, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(p.n())) {
    throw DimensionError("polynomial in " + std::to_string(p.n()) + " variables evaluated at a " +
                         std::to_string(x.size()) + "-dimensional point");
  }
  const auto& basis = p.monomial_index();
  double sum = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    sum += p.coeffs()[k] * monomial_value(basis[k], x);
  }
  return sum;
}

Polynomial sample_polynomial(int n, int d, Range coeff_range, Rng& rng) {
  if (!(coeff_range.lo <= coeff_range.hi)) {
    throw ConfigError("coefficient range is empty");
  }
  std::vector<double> coeffs(monomial_count(n, d));
  for (double& c : coeffs) c = rng.uniform(coeff_range.lo, coeff_range.hi);
  return Polynomial(n, d, std::move(coeffs));
}

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const Polynomial& p) {
  std::string out;
  const auto& basis = p.monomial_index();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double c = p.coeffs()[k];
    if (c == 0.0) continue;
    std::string mono;
    for (std::size_t v = 0; v < basis[k].size(); ++v) {
      const int e = basis[k][v];
      if (e == 0) continue;
      mono += "x" + std::to_string(v + 1);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    const double mag = std::fabs(c);
    std::string term = (mag == 1.0 && !mono.empty()) ? mono : format_number(mag) + mono;
    if (out.empty()) {
      out = (std::signbit(c) ? "-" : "") + term;
    } else {
      out += (std::signbit(c) ? " - " : " + ") + term;
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace xrai::families
