#pragma once

#include <optional>
#include <string_view>

#include "tablink/errors.hpp"

namespace tablink {

// A number as written in prose or in a table cell.
//
// `magnitude` already includes the scale: "8.3B" has magnitude 8.3e9 and
// scale_applied 1e9; "1.57E+12" has magnitude 1.57e12 and scale_applied
// 1e12. Percentages keep their printed value ("12.5%" -> 12.5).
// `display_precision` counts the fractional digits of the mantissa.
struct NumericValue {
    double magnitude = 0.0;
    int display_precision = 0;
    bool is_percent = false;
    double scale_applied = 1.0;

    bool scaled() const { return scale_applied != 1.0; }
};

/// Accepts an optional sign (+, -, U+2212, U+2013), digits with optional
/// comma thousands groups, an optional fraction, then either an exponent
/// (e/E with optional sign), a magnitude suffix (K, M, B, T in any case)
/// or a trailing percent sign. Surrounding ASCII whitespace is ignored.
/// Throws ParseError on anything else.
NumericValue parse_quantity(std::string_view text);

std::optional<NumericValue> try_parse_quantity(std::string_view text) noexcept;

// Rounds half-up (toward +inf on ties) to `precision` fractional digits.
double round_half_up(double value, int precision);

// Relative comparison used for every numeric equality in matching.
bool nearly_equal(double a, double b, double relative = 1e-9);

}  // namespace tablink
