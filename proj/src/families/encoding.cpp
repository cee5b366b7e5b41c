#include "xrai/families/encoding.hpp"

#include <string>

#include "xrai/errors.hpp"

namespace xrai::families {

std::string_view to_string(Family f) {
  return f == Family::boolean ? "boolean" : "polynomial";
}

Family family_from_string(std::string_view name) {
  if (name == "boolean") return Family::boolean;
  if (name == "polynomial") return Family::polynomial;
  throw ConfigError("unknown function family '" + std::string(name) + "'");
}

std::size_t encoding_length(Family f, int n, int d) {
  if (f == Family::boolean) {
    if (n < 1 || n > kMaxBooleanVariables) throw ConfigError("boolean n out of range");
    return std::size_t{1} << n;
  }
  return monomial_count(n, d);
}

Family family_of(const TargetFunction& f) {
  return std::holds_alternative<BooleanFunction>(f) ? Family::boolean : Family::polynomial;
}

std::vector<double> encode(const TargetFunction& f) {
  if (const auto* b = std::get_if<BooleanFunction>(&f)) {
    return {b->minterms().begin(), b->minterms().end()};
  }
  return std::get<Polynomial>(f).coeffs();
}

TargetFunction decode(const EncodingVector& raw, int n, int d) {
  const std::size_t expected = encoding_length(raw.family, n, d);
  if (raw.values.size() != expected) {
    throw EncodingError("encoding has " + std::to_string(raw.values.size()) +
                        " values, expected " + std::to_string(expected));
  }
  if (raw.family == Family::boolean) return decode_boolean(raw.values);
  return Polynomial(n, d, raw.values);
}

std::string to_string(const TargetFunction& f) {
  return std::visit([](const auto& fn) { return to_string(fn); }, f);
}

}  // namespace xrai::families
