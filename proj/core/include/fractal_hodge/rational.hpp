#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fractal_hodge {

/// Exact rational scalar. Every identity suite runs over this type.
using Rational = mpq_class;

/// Canonical "p/q" (or "p" when q == 1) text form.
std::string to_string(const Rational& value);

/// Parses "p", "-p", or "p/q". Throws FormatError on malformed input or q == 0.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace fractal_hodge
