#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablink/document.hpp"

namespace tablink {

struct TableReference {
    int number = 0;
    Span span;  // the whole reference expression, e.g. "Tables 2 and 3"

    friend bool operator==(const TableReference&, const TableReference&) = default;
};

struct ParagraphTablePair {
    std::string paragraph_id;
    std::string table_id;
    int table_number = 0;
    std::vector<Span> reference_spans;

    friend bool operator==(const ParagraphTablePair&, const ParagraphTablePair&) = default;
};

// Finds "Table N", "Tab. N", "Tables N and M", "Tables N, M", and
// "Tables N-M" (hyphen, en/em dash, or "to"), case-insensitively. Lists and
// ranges are only read after the plural keyword. Numbers within one
// expression are deduplicated in order of first occurrence.
std::vector<TableReference> find_table_references(std::string_view text);

// Rejoins layout blocks split by columns or page breaks. A block is
// appended to its predecessor when the predecessor lacks terminal
// punctuation and the block starts with a lowercase letter or digit. The
// joiner is a single space, or nothing when a trailing hyphen is repaired.
std::vector<Paragraph> merge_text_chunks(std::span<const Paragraph> blocks);

// One pair per (paragraph, cited table number) whose table exists.
// Citations of missing tables produce a "dangling-reference" warning.
std::vector<ParagraphTablePair> build_pairs(std::span<const Paragraph> paragraphs, std::span<const Table> tables,
                                            Warnings* warnings = nullptr);

// Merges the document's blocks and pairs the result.
std::vector<ParagraphTablePair> build_pairs(const ParsedDocument& doc, Warnings* warnings = nullptr);

}  // namespace tablink
