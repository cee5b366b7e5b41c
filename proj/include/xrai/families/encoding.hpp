#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "xrai/families/boolean.hpp"
#include "xrai/families/polynomial.hpp"

namespace xrai::families {

enum class Family { boolean, polynomial };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

/// Encoding width: 2^n minterms or C(n+d, d) coefficients.
std::size_t encoding_length(Family f, int n, int d);

/// Raw numeric encoding as produced by an interpretation network.
struct EncodingVector {
  Family family = Family::boolean;
  std::vector<double> values;
};

using TargetFunction = std::variant<BooleanFunction, Polynomial>;

Family family_of(const TargetFunction& f);

/// Numeric encoding of a target: minterm indicators or coefficients.
std::vector<double> encode(const TargetFunction& f);

/// Decode a raw vector for the given (family, n, d). Booleans are
/// thresholded; polynomial coefficients are taken as-is.
TargetFunction decode(const EncodingVector& raw, int n, int d);

std::string to_string(const TargetFunction& f);

}  // namespace xrai::families
