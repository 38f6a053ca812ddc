#include "tablink/segmentation.hpp"

#include <cctype>
#include <fstream>

namespace tablink {
namespace {

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Byte length of a closing bracket or quote at `pos`, 0 if none.
std::size_t closer_at(std::string_view t, std::size_t pos) {
    if (pos >= t.size()) return 0;
    if (t[pos] == ')' || t[pos] == ']' || t[pos] == '"' || t[pos] == '\'') return 1;
    if (pos + 2 < t.size() && static_cast<unsigned char>(t[pos]) == 0xE2 &&
        static_cast<unsigned char>(t[pos + 1]) == 0x80) {
        const auto c = static_cast<unsigned char>(t[pos + 2]);
        if (c == 0x99 || c == 0x9D) return 3;
    }
    return 0;
}

std::size_t opener_at(std::string_view t, std::size_t pos) {
    if (pos >= t.size()) return 0;
    if (t[pos] == '(' || t[pos] == '[' || t[pos] == '"' || t[pos] == '\'') return 1;
    if (pos + 2 < t.size() && static_cast<unsigned char>(t[pos]) == 0xE2 &&
        static_cast<unsigned char>(t[pos + 1]) == 0x80) {
        const auto c = static_cast<unsigned char>(t[pos + 2]);
        if (c == 0x98 || c == 0x9C) return 3;
    }
    return 0;
}

bool starts_sentence(std::string_view t, std::size_t pos) {
    if (pos >= t.size()) return false;
    if (const std::size_t n = opener_at(t, pos)) pos += n;
    return pos < t.size() && (is_upper(t[pos]) || is_digit(t[pos]));
}

Span trim_span(std::string_view t, Span s) {
    while (s.start < s.end && whitespace_at(t, s.start)) s.start += whitespace_at(t, s.start);
    while (s.end > s.start) {
        if (whitespace_at(t, s.end - 1) == 1) {
            --s.end;
        } else if (s.end >= s.start + 2 && whitespace_at(t, s.end - 2) == 2) {
            s.end -= 2;
        } else {
            break;
        }
    }
    return s;
}

}  // namespace

std::vector<std::string> default_abbreviations() {
    return {"e.g.", "i.e.", "et al.", "tab.", "tabs.", "fig.", "figs.", "eq.",   "eqs.",  "sec.", "vs.", "cf.",
            "dr.",  "no.",  "nos.",   "approx.", "resp.", "ref.", "refs.", "st.", "mr.", "ms.", "prof."};
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read word list " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string trimmed = collapse_whitespace(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        out.push_back(trimmed);
    }
    return out;
}

SentenceSplitter::SentenceSplitter() : SentenceSplitter(default_abbreviations()) {}

SentenceSplitter::SentenceSplitter(std::vector<std::string> abbreviations) {
    for (auto& a : abbreviations) {
        std::string lower = to_lower_ascii(collapse_whitespace(a));
        if (lower.empty()) continue;
        if (lower.back() != '.') lower.push_back('.');
        abbreviations_.push_back(std::move(lower));
    }
}

SentenceSplitter SentenceSplitter::from_file(const std::filesystem::path& path) {
    return SentenceSplitter(load_word_list(path));
}

bool SentenceSplitter::ends_abbreviation(std::string_view text, std::size_t period) const {
    const std::size_t end = period + 1;
    for (const std::string& abbr : abbreviations_) {
        if (abbr.size() > end) continue;
        const std::size_t start = end - abbr.size();
        if (start > 0 && std::isalnum(static_cast<unsigned char>(text[start - 1]))) continue;
        if (to_lower_ascii(text.substr(start, abbr.size())) == abbr) return true;
    }
    return false;
}

std::vector<Span> SentenceSplitter::split_spans(std::string_view text) const {
    std::vector<Span> out;
    auto emit = [&](std::size_t s, std::size_t e) {
        const Span span = trim_span(text, Span{s, e});
        if (!span.empty()) out.push_back(span);
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminal(text[i])) {
            ++i;
            continue;
        }
        const std::size_t mark = i;
        std::size_t j = i + 1;
        while (j < text.size() && is_terminal(text[j])) ++j;
        const std::size_t last_terminal = j - 1;
        while (const std::size_t n = closer_at(text, j)) j += n;
        i = j;

        if (!whitespace_at(text, j)) continue;
        std::size_t k = j;
        while (k < text.size() && whitespace_at(text, k)) k += whitespace_at(text, k);
        if (k >= text.size() || !starts_sentence(text, k)) continue;
        if (text[last_terminal] == '.' && last_terminal == mark && ends_abbreviation(text, mark)) continue;

        emit(start, j);
        start = k;
        i = k;
    }
    emit(start, text.size());
    return out;
}

std::vector<Sentence> SentenceSplitter::split(const Paragraph& paragraph) const {
    std::vector<Sentence> out;
    const auto spans = split_spans(paragraph.text);
    for (std::size_t k = 0; k < spans.size(); ++k) {
        Sentence s;
        s.id = paragraph.id + "#s" + std::to_string(k);
        s.paragraph_id = paragraph.id;
        s.span = spans[k];
        s.text = std::string(slice(paragraph.text, spans[k]));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sentence> segment_sentences(const Paragraph& paragraph) {
    static const SentenceSplitter splitter;
    return splitter.split(paragraph);
}

}  // namespace tablink
