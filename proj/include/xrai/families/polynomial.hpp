#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xrai/families/monomial.hpp"
#include "xrai/rng.hpp"

namespace xrai::families {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Dense multivariate polynomial in the canonical monomial basis.
class Polynomial {
 public:
  /// Zero polynomial.
  Polynomial(int n, int d);
  /// Throws EncodingError if coeffs has the wrong length.
  Polynomial(int n, int d, std::vector<double> coeffs);

  int n() const { return n_; }
  int d() const { return d_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<Exponents>& monomial_index() const { return *monomials_; }

  double operator()(std::span<const double> x) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.coeffs_ == b.coeffs_;
  }

 private:
  int n_;
  int d_;
  std::vector<double> coeffs_;
  std::shared_ptr<const std::vector<Exponents>> monomials_;
};

/// Shared, cached canonical basis for (n, d).
std::shared_ptr<const std::vector<Exponents>> canonical_basis(int n, int d);

/// Place each term at its canonical index; absent monomials are zero.
/// Throws EncodingError on wrong arity, negative exponents or degree > d.
Polynomial encode_polynomial(const std::map<Exponents, double>& terms, int n, int d);

/// Throws DimensionError if |x| != n.
double eval_polynomial(const Polynomial& p, std::span<const double> x);

/// Dense sample: each coefficient independent uniform on the range.
/// Throws ConfigError if lo > hi.
Polynomial sample_polynomial(int n, int d, Range coeff_range, Rng& rng);

/// Signed monomial string, e.g. "3x1^3 - 5x1x2^2 + x1^2 - 3x2 - 4".
std::string to_string(const Polynomial& p);

}  // namespace xrai::families
