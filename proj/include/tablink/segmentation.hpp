#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tablink/document.hpp"

namespace tablink {

struct Sentence {
    std::string id;
    std::string paragraph_id;
    Span span;  // within the paragraph text
    std::string text;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Rule-based splitter. A sentence ends at '.', '!' or '?' (plus any
// closing quotes or brackets) followed by whitespace and an uppercase
// letter or digit. Periods closing a protected abbreviation never end a
// sentence; semicolons never split.
class SentenceSplitter {
public:
    SentenceSplitter();
    explicit SentenceSplitter(std::vector<std::string> abbreviations);

    // One abbreviation per line; blank lines and '#' comments are skipped.
    static SentenceSplitter from_file(const std::filesystem::path& path);

    std::vector<Span> split_spans(std::string_view text) const;
    std::vector<Sentence> split(const Paragraph& paragraph) const;

    const std::vector<std::string>& abbreviations() const { return abbreviations_; }

private:
    bool ends_abbreviation(std::string_view text, std::size_t period) const;

    std::vector<std::string> abbreviations_;  // lowercase, each ending in '.'
};

std::vector<std::string> default_abbreviations();

// Reads a UTF-8 word list: one entry per line, trimmed; blank lines and
// lines starting with '#' are ignored.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

std::vector<Sentence> segment_sentences(const Paragraph& paragraph);

}  // namespace tablink
