#include "xrai/families/boolean.hpp"

#include <bit>
#include <string>

#include "xrai/errors.hpp"

namespace xrai::families {

namespace {

std::size_t table_length(int n) {
  if (n < 1 || n > kMaxBooleanVariables) {
    throw EncodingError("boolean functions need 1.." + std::to_string(kMaxBooleanVariables) +
                        " variables, got " + std::to_string(n));
  }
  return std::size_t{1} << n;
}

}  // namespace

BooleanFunction::BooleanFunction(int n) : n_(n), minterms_(table_length(n), 0) {}

BooleanFunction::BooleanFunction(int n, std::vector<std::uint8_t> minterms)
    : n_(n), minterms_(std::move(minterms)) {
  if (minterms_.size() != table_length(n)) {
    throw EncodingError("a function of " + std::to_string(n) + " variables has " +
                        std::to_string(table_length(n)) + " minterms, got " +
                        std::to_string(minterms_.size()));
  }
  for (auto b : minterms_) {
    if (b > 1) throw EncodingError("minterm indicators must be 0 or 1");
  }
}

std::size_t minterm_index(std::span<const std::uint8_t> assignment) {
  std::size_t index = 0;
  for (auto bit : assignment) index = (index << 1) | (bit ? 1u : 0u);
  return index;
}

std::vector<std::uint8_t> assignment_of(std::size_t index, int n) {
  std::vector<std::uint8_t> a(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) a[static_cast<std::size_t>(v)] = (index >> (n - 1 - v)) & 1u;
  return a;
}

int variables_for_length(std::size_t length) {
  if (length < 2 || !std::has_single_bit(length)) {
    throw EncodingError("encoding length " + std::to_string(length) + " is not 2^n for n >= 1");
  }
  return std::countr_zero(length);
}

BooleanFunction encode_boolean(std::span<const std::uint8_t> truth_table) {
  const int n = variables_for_length(truth_table.size());
  return BooleanFunction(n, std::vector<std::uint8_t>(truth_table.begin(), truth_table.end()));
}

BooleanFunction decode_boolean(std::span<const double> raw) {
  const int n = variables_for_length(raw.size());
  std::vector<std::uint8_t> bits(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) bits[i] = raw[i] >= 0.5 ? 1 : 0;
  return BooleanFunction(n, std::move(bits));
}

std::uint8_t eval_boolean(const BooleanFunction& f, std::span<const std::uint8_t> assignment) {
  if (assignment.size() != static_cast<std::size_t>(f.n())) {
    throw DimensionError("assignment has " + std::to_string(assignment.size()) +
                         " variables, function has " + std::to_string(f.n()));
  }
  return f.minterms()[minterm_index(assignment)];
}

BooleanFunction sample_boolean(int n, Rng& rng) {
  std::vector<std::uint8_t> bits(table_length(n));
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return BooleanFunction(n, std::move(bits));
}

std::string to_string(const BooleanFunction& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.contains(i)) continue;
    if (!out.empty()) out += " ∨ ";
    const auto a = assignment_of(i, f.n());
    for (int v = 0; v < f.n(); ++v) {
      if (v > 0) out += "∧";
      if (!a[static_cast<std::size_t>(v)]) out += "¬";
      out += "x" + std::to_string(v + 1);
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace xrai::families
