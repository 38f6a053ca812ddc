#include "tablink/quantity.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace tablink {
namespace {

constexpr std::array<double, 23> kPow10 = {
    1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,  1e9,  1e10, 1e11,
    1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool consume(std::string_view& s, std::string_view prefix) {
    if (s.substr(0, prefix.size()) == prefix) {
        s.remove_prefix(prefix.size());
        return true;
    }
    return false;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Reads digits with optional ",ddd" groups into `digits`. Returns false on
// a malformed grouping such as "1,23".
bool read_integer_part(std::string_view& s, std::string& digits) {
    std::size_t i = 0;
    while (i < s.size() && is_digit(s[i])) ++i;
    const std::size_t lead = i;
    digits.append(s.substr(0, i));
    bool grouped = false;
    while (i + 3 < s.size() && s[i] == ',' && is_digit(s[i + 1]) && is_digit(s[i + 2]) &&
           is_digit(s[i + 3]) && (i + 4 == s.size() || !is_digit(s[i + 4]))) {
        digits.append(s.substr(i + 1, 3));
        i += 4;
        grouped = true;
    }
    if (grouped && (lead == 0 || lead > 3)) return false;
    if (i < s.size() && s[i] == ',') return false;
    s.remove_prefix(i);
    return true;
}

}  // namespace

double round_half_up(double value, int precision) {
    if (precision < 0) precision = 0;
    const double p = precision < static_cast<int>(kPow10.size()) ? kPow10[precision] : std::pow(10.0, precision);
    const double scaled = value * p;
    // Ties printed in decimal rarely land exactly on .5 in binary.
    const double nudge = std::abs(scaled) * 1e-12;
    return std::floor(scaled + 0.5 + nudge) / p;
}

bool nearly_equal(double a, double b, double relative) {
    if (a == b) return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= relative * scale;
}

NumericValue parse_quantity(std::string_view text) {
    const std::string_view original = text;
    auto fail = [&]() -> NumericValue {
        throw ParseError("not a quantity: '" + std::string(original) + "'");
    };

    std::string_view s = trim(text);
    if (s.empty()) return fail();

    bool negative = false;
    if (consume(s, "+")) {
    } else if (consume(s, "-") || consume(s, "\xE2\x88\x92") || consume(s, "\xE2\x80\x93")) {
        negative = true;
    }

    std::string mantissa;
    if (!read_integer_part(s, mantissa)) return fail();
    const bool has_int = !mantissa.empty();

    int precision = 0;
    if (!s.empty() && s.front() == '.') {
        std::size_t i = 1;
        while (i < s.size() && is_digit(s[i])) ++i;
        precision = static_cast<int>(i - 1);
        if (precision == 0) return fail();
        mantissa.push_back('.');
        mantissa.append(s.substr(1, i - 1));
        s.remove_prefix(i);
    }
    if (!has_int && precision == 0) return fail();
    if (!has_int) mantissa.insert(mantissa.begin(), '0');

    double value = 0.0;
    {
        const auto res = std::from_chars(mantissa.data(), mantissa.data() + mantissa.size(), value);
        if (res.ec != std::errc() || res.ptr != mantissa.data() + mantissa.size()) return fail();
    }

    NumericValue out;
    out.display_precision = precision;

    if (!s.empty() && (s.front() == 'e' || s.front() == 'E') && s.size() > 1 &&
        (is_digit(s[1]) || ((s[1] == '+' || s[1] == '-') && s.size() > 2 && is_digit(s[2])))) {
        s.remove_prefix(1);
        bool neg_exp = false;
        if (s.front() == '+' || s.front() == '-') {
            neg_exp = s.front() == '-';
            s.remove_prefix(1);
        }
        int exponent = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), exponent);
        if (res.ec != std::errc()) return fail();
        s.remove_prefix(static_cast<std::size_t>(res.ptr - s.data()));
        if (exponent >= static_cast<int>(kPow10.size())) return fail();
        const double p = kPow10[exponent];
        out.scale_applied = neg_exp ? 1.0 / p : p;
        value = neg_exp ? value / p : value * p;
    } else if (!s.empty()) {
        switch (s.front()) {
            case 'k': case 'K': out.scale_applied = 1e3; break;
            case 'm': case 'M': out.scale_applied = 1e6; break;
            case 'b': case 'B': out.scale_applied = 1e9; break;
            case 't': case 'T': out.scale_applied = 1e12; break;
            case '%': out.is_percent = true; break;
            default: return fail();
        }
        s.remove_prefix(1);
        value *= out.scale_applied;
    }
    if (!s.empty()) return fail();
    if (!std::isfinite(value)) return fail();

    out.magnitude = negative ? -value : value;
    return out;
}

std::optional<NumericValue> try_parse_quantity(std::string_view text) noexcept {
    try {
        return parse_quantity(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

}  // namespace tablink
