#include <doctest.h>

#include <algorithm>
#include <set>

#include "xrai/errors.hpp"
#include "xrai/families/boolean.hpp"
#include "xrai/families/encoding.hpp"
#include "xrai/families/monomial.hpp"
#include "xrai/families/polynomial.hpp"
#include "xrai/rng.hpp"

using namespace xrai;
using namespace xrai::families;

TEST_CASE("canonical monomial order for two variables, degree three") {
  const std::vector<Exponents> expected{{3, 0}, {0, 3}, {2, 1}, {1, 2}, {2, 0},
                                        {0, 2}, {1, 1}, {1, 0}, {0, 1}, {0, 0}};
  CHECK(enumerate_monomials(2, 3) == expected);
  CHECK(enumerate_monomials(2, 3).size() == 10);
}

TEST_CASE("canonical monomial order for one variable") {
  CHECK(enumerate_monomials(1, 3) == std::vector<Exponents>{{3}, {2}, {1}, {0}});
}

TEST_CASE("monomial enumeration agrees with a brute-force generate-and-filter oracle") {
  for (int n = 1; n <= 6; ++n) {
    for (int d = 0; d <= 3; ++d) {
      std::set<Exponents> brute;
      Exponents e(static_cast<std::size_t>(n), 0);
      for (;;) {
        int sum = 0;
        for (int v : e) sum += v;
        if (sum <= d) brute.insert(e);
        std::size_t i = 0;
        while (i < e.size() && ++e[i] > d) e[i++] = 0;
        if (i == e.size()) break;
      }
      const auto mons = enumerate_monomials(n, d);
      CHECK(mons.size() == binomial(n + d, d));
      CHECK(std::set<Exponents>(mons.begin(), mons.end()) == brute);
      CHECK(degree_for_count(n, mons.size()) == d);
    }
  }
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 3) == 10);
  CHECK(binomial(7, 3) == 35);
  CHECK(binomial(9, 3) == 84);
  CHECK(binomial(4, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK_THROWS_AS(degree_for_count(4, 36), ConfigError);
}

TEST_CASE("encode_polynomial places coefficients canonically") {
  const Polynomial p = encode_polynomial(
      {{{3, 0}, 3.0}, {{1, 2}, -5.0}, {{2, 0}, 1.0}, {{0, 1}, -3.0}, {{0, 0}, -4.0}}, 2, 3);
  CHECK(p.coeffs() == std::vector<double>{3, 0, 0, -5, 1, 0, 0, 0, -3, -4});
  CHECK(encode_polynomial({}, 2, 3).coeffs() == std::vector<double>(10, 0.0));
  const Polynomial cubic = encode_polynomial({{{3}, 1.0}, {{2}, -2.0}, {{0}, 5.0}}, 1, 3);
  CHECK(cubic.coeffs() == std::vector<double>{1, -2, 0, 5});
  CHECK(cubic.monomial_index() == enumerate_monomials(1, 3));
}

TEST_CASE("encode_polynomial rejects invalid tuples") {
  CHECK_THROWS_AS(encode_polynomial({{{4, 0}, 1.0}}, 2, 3), EncodingError);
  CHECK_THROWS_AS(encode_polynomial({{{1, 0, 0}, 1.0}}, 2, 3), EncodingError);
  CHECK_THROWS_AS(encode_polynomial({{{-1, 1}, 1.0}}, 2, 3), EncodingError);
  CHECK_THROWS(Polynomial(2, 3, std::vector<double>(9)));
}

TEST_CASE("eval_polynomial examples") {
  const std::vector<double> at_two{2.0};
  CHECK(eval_polynomial(Polynomial(2, 3), std::vector<double>{0.3, -0.7}) == 0.0);
  CHECK(eval_polynomial(Polynomial(1, 3, {1, -2, 0, 5}), at_two) == doctest::Approx(5.0));
  const Polynomial p(2, 3, {3, 0, 0, -5, 1, 0, 0, 0, -3, -4});
  CHECK(eval_polynomial(p, std::vector<double>{1.0, 1.0}) == doctest::Approx(-8.0));
  CHECK(p(std::vector<double>{1.0, 1.0}) == doctest::Approx(-8.0));
  CHECK_THROWS_AS(eval_polynomial(p, at_two), DimensionError);
}

TEST_CASE("eval_polynomial is linear in the coefficients") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Polynomial p = sample_polynomial(4, 3, {-10, 10}, rng);
    const Polynomial q = sample_polynomial(4, 3, {-10, 10}, rng);
    const double alpha = rng.uniform(-3, 3), beta = rng.uniform(-3, 3);
    std::vector<double> mix(p.coeffs().size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * p.coeffs()[i] + beta * q.coeffs()[i];
    const std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double lhs = eval_polynomial(Polynomial(4, 3, mix), x);
    const double rhs = alpha * eval_polynomial(p, x) + beta * eval_polynomial(q, x);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("design matrix rows are monomial values") {
  const auto mons = enumerate_monomials(2, 2);
  nn::Matrix pts(2, 2);
  pts << 2, 3, -1, 0.5;
  const nn::Matrix phi = design_matrix(mons, pts);
  // x^2, y^2, xy, x, y, 1
  CHECK(phi.row(0) == (nn::RowVector(6) << 4, 9, 6, 2, 3, 1).finished());
  CHECK(phi(1, 2) == doctest::Approx(-0.5));
}

TEST_CASE("sample_polynomial draws dense uniform coefficients") {
  Rng a(3), b(3);
  CHECK(sample_polynomial(4, 3, {-10, 10}, a) == sample_polynomial(4, 3, {-10, 10}, b));
  Rng rng(4);
  std::vector<double> sums(35, 0.0);
  for (int i = 0; i < 10000; ++i) {
    const Polynomial p = sample_polynomial(4, 3, {-10, 10}, rng);
    for (std::size_t k = 0; k < 35; ++k) {
      REQUIRE(p.coeffs()[k] >= -10.0);
      REQUIRE(p.coeffs()[k] <= 10.0);
      sums[k] += p.coeffs()[k];
    }
  }
  for (double s : sums) {
    CHECK(s / 10000 >= -0.3);
    CHECK(s / 10000 <= 0.3);
  }
  CHECK_THROWS_AS(sample_polynomial(2, 2, {1, -1}, rng), ConfigError);
}

TEST_CASE("polynomial pretty printer") {
  const Polynomial p(2, 3, {3, 0, 0, -5, 1, 0, 0, 0, -3, -4});
  CHECK(to_string(p) == "3x1^3 - 5x1x2^2 + x1^2 - 3x2 - 4");
  CHECK(to_string(Polynomial(1, 3, {1, -2, 0, 5})) == "x1^3 - 2x1^2 + 5");
  CHECK(to_string(Polynomial(2, 1)) == "0");
  CHECK(to_string(Polynomial(1, 1, {-1, 0.5})) == "-x1 + 0.5");
}

TEST_CASE("minterm indexing is big-endian with x1 most significant") {
  CHECK(minterm_index(std::vector<std::uint8_t>{1, 0, 0}) == 4);
  CHECK(minterm_index(std::vector<std::uint8_t>{0, 1, 1}) == 3);
  CHECK(assignment_of(6, 3) == std::vector<std::uint8_t>{1, 1, 0});
  for (std::size_t i = 0; i < 32; ++i) CHECK(minterm_index(assignment_of(i, 5)) == i);
  CHECK(variables_for_length(16) == 4);
  CHECK_THROWS_AS(variables_for_length(12), EncodingError);
}

TEST_CASE("encode_boolean is the truth table") {
  // CDNF !x1x2x3 | x1!x2!x3 | x1x2x3
  std::vector<std::uint8_t> table(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto a = assignment_of(i, 3);
    table[i] = (!a[0] && a[1] && a[2]) || (a[0] && !a[1] && !a[2]) || (a[0] && a[1] && a[2]);
  }
  CHECK(encode_boolean(table).minterms() == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 0, 0, 1});
  CHECK(encode_boolean(std::vector<std::uint8_t>(8, 0)).minterms() == std::vector<std::uint8_t>(8, 0));
  CHECK(encode_boolean(std::vector<std::uint8_t>(8, 1)).minterms() == std::vector<std::uint8_t>(8, 1));
  CHECK_THROWS_AS(encode_boolean(std::vector<std::uint8_t>(6, 0)), EncodingError);
  CHECK_THROWS_AS(encode_boolean(std::vector<std::uint8_t>{0, 2}), EncodingError);
}

TEST_CASE("the two-clause formula sets minterm 110") {
  std::vector<std::uint8_t> table(8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto a = assignment_of(i, 3);
    table[i] = (a[0] && !a[2]) || (a[1] && a[2]);
  }
  CHECK(encode_boolean(table).minterms() == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 0, 1, 1});
}

TEST_CASE("decode_boolean thresholds at 0.5 inclusive") {
  CHECK(decode_boolean(std::vector<double>(4, 0.2)) == BooleanFunction(2));
  const BooleanFunction f = decode_boolean(std::vector<double>{0.9, 0.1, 0.5, 0.49});
  CHECK(f.minterms() == std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK_THROWS_AS(decode_boolean(std::vector<double>(3, 0.0)), EncodingError);
}

TEST_CASE("decode inverts encode for every function of two and three variables") {
  for (int n : {2, 3}) {
    const std::size_t len = std::size_t{1} << n;
    for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
      std::vector<std::uint8_t> bits(len);
      for (std::size_t i = 0; i < len; ++i) bits[i] = (code >> i) & 1u;
      const BooleanFunction f = encode_boolean(bits);
      const std::vector<double> raw(bits.begin(), bits.end());
      REQUIRE(decode_boolean(raw) == f);
    }
  }
}

TEST_CASE("eval_boolean examples") {
  const BooleanFunction f(3, {0, 0, 0, 1, 1, 0, 0, 1});
  CHECK(eval_boolean(f, std::vector<std::uint8_t>{1, 0, 0}) == 1);
  CHECK(eval_boolean(f, std::vector<std::uint8_t>{0, 0, 0}) == 0);
  CHECK(eval_boolean(BooleanFunction(3), std::vector<std::uint8_t>{1, 1, 1}) == 0);
  CHECK_THROWS_AS(eval_boolean(f, std::vector<std::uint8_t>{1, 0}), DimensionError);
}

TEST_CASE("eval_boolean agrees with direct CDNF evaluation") {
  Rng rng(23);
  for (int n : {4, 5, 6}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const BooleanFunction f = sample_boolean(n, rng);
      std::vector<std::uint8_t> a(static_cast<std::size_t>(n));
      for (auto& v : a) v = rng.coin();
      bool any = false;
      for (std::size_t m = 0; m < f.size() && !any; ++m) {
        if (!f.contains(m)) continue;
        bool conj = true;
        for (int v = 0; v < n; ++v) {
          const bool positive = (m >> (n - 1 - v)) & 1u;
          conj = conj && (positive ? a[static_cast<std::size_t>(v)] : !a[static_cast<std::size_t>(v)]);
        }
        any = conj;
      }
      REQUIRE(eval_boolean(f, a) == static_cast<std::uint8_t>(any));
    }
  }
}

TEST_CASE("sample_boolean uses fair coins") {
  Rng a(8), b(8);
  CHECK(sample_boolean(4, a) == sample_boolean(4, b));
  Rng rng(9);
  double ones = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const BooleanFunction f = sample_boolean(4, rng);
    for (auto m : f.minterms()) ones += m;
  }
  const double density = ones / (10000.0 * 16);
  CHECK(density >= 0.48);
  CHECK(density <= 0.52);
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng x(derive_seed(1, s, "a")), y(derive_seed(1, s, "b"));
    differing += sample_boolean(4, x) != sample_boolean(4, y);
  }
  CHECK(differing >= 1);
}

TEST_CASE("boolean pretty printer") {
  CHECK(to_string(BooleanFunction(3, {0, 0, 0, 1, 1, 0, 0, 1})) ==
        "¬x1∧x2∧x3 ∨ x1∧¬x2∧¬x3 ∨ x1∧x2∧x3");
  CHECK(to_string(BooleanFunction(2)) == "0");
}

TEST_CASE("boolean function invariants") {
  CHECK_THROWS(BooleanFunction(0));
  CHECK_THROWS(BooleanFunction(2, {1, 0, 1}));
  CHECK_THROWS(BooleanFunction(1, {1, 3}));
  CHECK(BooleanFunction(3).size() == 8);
}

TEST_CASE("encoding vectors dispatch on the family") {
  CHECK(encoding_length(Family::boolean, 4, 0) == 16);
  CHECK(encoding_length(Family::polynomial, 4, 3) == 35);
  const TargetFunction f = BooleanFunction(2, {0, 1, 1, 0});
  CHECK(encode(f) == std::vector<double>{0, 1, 1, 0});
  const TargetFunction g = decode({Family::boolean, {0.1, 0.7, 0.6, 0.2}}, 2, 0);
  CHECK(g == f);
  const TargetFunction p = decode({Family::polynomial, {1, -2, 0, 5}}, 1, 3);
  CHECK(family_of(p) == Family::polynomial);
  CHECK(to_string(p) == "x1^3 - 2x1^2 + 5");
  CHECK_THROWS_AS(decode({Family::polynomial, {1, 2}}, 1, 3), EncodingError);
  CHECK(family_from_string(to_string(Family::polynomial)) == Family::polynomial);
  CHECK_THROWS(family_from_string("ring"));
}
