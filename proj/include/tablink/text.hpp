#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tablink {

// Half-open interval [start, end) of byte offsets into UTF-8 text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end > start ? end - start : 0; }
    bool empty() const { return end <= start; }
    bool contains(const Span& o) const { return start <= o.start && o.end <= end; }
    bool overlaps(const Span& o) const { return start < o.end && o.start < end; }

    friend auto operator<=>(const Span&, const Span&) = default;
};

inline std::string_view slice(std::string_view text, Span span) {
    return text.substr(span.start, span.length());
}

struct Token {
    Span span;
    std::string_view text;
};

// Byte length of the whitespace character starting at `pos` (ASCII
// whitespace or U+00A0), 0 when there is none.
std::size_t whitespace_at(std::string_view text, std::size_t pos);

// Splits on whitespace, then trims enclosing punctuation (brackets,
// quotes, and trailing sentence punctuation) from each piece. Pieces that
// trim to nothing are dropped. Spans refer to the trimmed text.
std::vector<Token> tokenize_words(std::string_view text);

std::string to_lower_ascii(std::string_view s);

std::string collapse_whitespace(std::string_view s);

// Entity-matching normal form: case-folded tokens with enclosing
// punctuation removed and a trailing plural "s" dropped.
std::vector<std::string> normalize_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_icase(std::string_view text, std::string_view prefix);

}  // namespace tablink
