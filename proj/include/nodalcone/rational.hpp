#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace nodalcone {

// Exact rational scalar used by all symbolic computations.
using Rational = mpq_class;
using RationalVec = std::vector<Rational>;

// Parses "p" or "p/q" (optional leading sign, q > 0 after canonicalization).
// Throws std::invalid_argument on malformed input or zero denominator.
Rational rational_from_string(const std::string& text);

// Canonical form: "p" when the denominator is 1, otherwise "p/q" with q > 0.
std::string rational_to_string(const Rational& value);

double to_double(const Rational& value);

// Exact conversion: every finite double is a dyadic rational.
// Throws std::invalid_argument for NaN or infinities.
Rational rational_from_double(double value);

// Best rational approximation with denominator <= max_denominator, found by
// continued fractions.  Returns nullopt only for non-finite input.
std::optional<Rational> rationalize(double value, long max_denominator);

}  // namespace nodalcone
