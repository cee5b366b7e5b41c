#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xrai/rng.hpp"

namespace xrai::families {

/// Boolean function of n variables as its minterm indicator vector.
/// Entry i is 1 iff the minterm whose big-endian bit pattern over
/// (x_1 ... x_n) equals i is part of the canonical DNF; this is also the
/// truth table read in minterm order.
class BooleanFunction {
 public:
  /// Constant false.
  explicit BooleanFunction(int n);
  /// Throws EncodingError on bad length or non-binary entries.
  BooleanFunction(int n, std::vector<std::uint8_t> minterms);

  int n() const { return n_; }
  std::size_t size() const { return minterms_.size(); }
  const std::vector<std::uint8_t>& minterms() const { return minterms_; }
  bool contains(std::size_t minterm) const { return minterms_.at(minterm) != 0; }

  friend bool operator==(const BooleanFunction&, const BooleanFunction&) = default;

 private:
  int n_;
  std::vector<std::uint8_t> minterms_;
};

/// Largest supported variable count (2^20 minterms).
inline constexpr int kMaxBooleanVariables = 20;

/// Minterm index of an assignment, x_1 as the most significant bit.
std::size_t minterm_index(std::span<const std::uint8_t> assignment);

/// Variable values for minterm `index` (inverse of minterm_index).
std::vector<std::uint8_t> assignment_of(std::size_t index, int n);

/// n such that 2^n == length; throws EncodingError otherwise.
int variables_for_length(std::size_t length);

/// Identity embedding of a truth table of length 2^n.
BooleanFunction encode_boolean(std::span<const std::uint8_t> truth_table);

/// Threshold decode: minterm i present iff raw[i] >= 0.5 (all below means
/// constant false). Throws EncodingError if the length is not a power of two.
BooleanFunction decode_boolean(std::span<const double> raw);

/// Throws DimensionError if |assignment| != n.
std::uint8_t eval_boolean(const BooleanFunction& f, std::span<const std::uint8_t> assignment);

/// Every minterm indicator an independent fair coin.
BooleanFunction sample_boolean(int n, Rng& rng);

/// CDNF string, e.g. "¬x1∧x2∧x3 ∨ x1∧¬x2∧¬x3"; constant false prints "0".
std::string to_string(const BooleanFunction& f);

}  // namespace xrai::families
