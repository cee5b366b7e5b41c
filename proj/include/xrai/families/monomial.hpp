#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xrai/nn/tensor.hpp"

namespace xrai::families {

/// Exponent of each variable, x_1 first.
using Exponents = std::vector<int>;

/// Binomial coefficient C(n, k); throws ConfigError on overflow.
std::uint64_t binomial(int n, int k);

/// Number of monomials in n variables of total degree <= d: C(n+d, d).
inline std::size_t monomial_count(int n, int d) {
  return static_cast<std::size_t>(binomial(n + d, d));
}

/// Canonical coefficient order: total degree descending, then maximum
/// exponent descending, then exponent tuples lexicographically descending.
/// For n = 2, d = 3 this gives x^3, y^3, x^2y, xy^2, x^2, y^2, xy, x, y, 1.
std::vector<Exponents> enumerate_monomials(int n, int d);

/// Recover d from (n, K = C(n+d, d)); throws ConfigError if no such d exists.
int degree_for_count(int n, std::size_t count);

/// Value of each monomial at each point: rows(points) x monomials.size().
nn::Matrix design_matrix(const std::vector<Exponents>& monomials, const nn::Matrix& points);

double monomial_value(const Exponents& e, std::span<const double> x);

}  // namespace xrai::families
