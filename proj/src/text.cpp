#include "tablink/text.hpp"

#include <algorithm>

namespace tablink {
namespace {

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Byte length of an enclosing punctuation mark at `pos`, 0 if none.
std::size_t punct_at(std::string_view t, std::size_t pos) {
    static constexpr std::string_view kAscii = ",.;:!?\"'()[]{}";
    if (pos >= t.size()) return 0;
    if (kAscii.find(t[pos]) != std::string_view::npos) return 1;
    // U+2018, U+2019, U+201C, U+201D
    if (pos + 2 < t.size() && static_cast<unsigned char>(t[pos]) == 0xE2 &&
        static_cast<unsigned char>(t[pos + 1]) == 0x80) {
        const auto c = static_cast<unsigned char>(t[pos + 2]);
        if (c == 0x98 || c == 0x99 || c == 0x9C || c == 0x9D) return 3;
    }
    return 0;
}

// Length of an enclosing mark that ends at `end` (exclusive).
std::size_t punct_before(std::string_view t, std::size_t end) {
    if (end == 0) return 0;
    if (punct_at(t, end - 1) == 1) return 1;
    if (end >= 3 && punct_at(t, end - 3) == 3) return 3;
    return 0;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::size_t whitespace_at(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    if (is_ascii_space(text[pos])) return 1;
    if (pos + 1 < text.size() && static_cast<unsigned char>(text[pos]) == 0xC2 &&
        static_cast<unsigned char>(text[pos + 1]) == 0xA0)
        return 2;
    return 0;
}

std::vector<Token> tokenize_words(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (const std::size_t ws = whitespace_at(text, i)) {
            i += ws;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && whitespace_at(text, j) == 0) ++j;

        std::size_t s = i;
        std::size_t e = j;
        while (s < e) {
            const std::size_t n = punct_at(text, s);
            if (n == 0 || s + n > e) break;
            // Keep a leading decimal point: ".5".
            if (n == 1 && text[s] == '.' && s + 1 < e && is_digit(text[s + 1])) break;
            s += n;
        }
        while (e > s) {
            const std::size_t n = punct_before(text, e);
            if (n == 0 || e - n < s) break;
            e -= n;
        }
        if (s < e) out.push_back(Token{Span{s, e}, text.substr(s, e - s)});
        i = j;
    }
    return out;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    bool pending_space = false;
    while (i < s.size()) {
        if (const std::size_t ws = whitespace_at(s, i)) {
            pending_space = !out.empty();
            i += ws;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(s[i++]);
    }
    return out;
}

std::vector<std::string> normalize_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const Token& tok : tokenize_words(s)) {
        std::string t = to_lower_ascii(tok.text);
        if (t.size() >= 3 && t.back() == 's' && t[t.size() - 2] != 's') t.pop_back();
        out.push_back(std::move(t));
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

bool starts_with_icase(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char a = text[i];
        char b = prefix[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
        if (b >= 'A' && b <= 'Z') b = static_cast<char>(b - 'A' + 'a');
        if (a != b) return false;
    }
    return true;
}

}  // namespace tablink
