#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tablink/geometry.hpp"
#include "tablink/quantity.hpp"
#include "tablink/text.hpp"

namespace tablink {

// Piece of a paragraph's layout: either a whole source block or a single
// text line. `span` indexes the paragraph text.
struct TextFragment {
    int page = 0;
    Box box;
    Span span;
    bool is_line = false;
};

struct Paragraph {
    std::string id;
    int page = 0;
    Box box;
    std::string text;
    std::vector<TextFragment> fragments;
};

struct Cell {
    std::string id;  // r{row}c{col} of the anchor slot
    int row = 0;
    int col = 0;
    int row_span = 1;
    int col_span = 1;
    std::string text;
    std::optional<NumericValue> numeric;
    Box box;

    int last_row() const { return row + row_span - 1; }
    int last_col() const { return col + col_span - 1; }
    bool covers(int r, int c) const { return r >= row && r <= last_row() && c >= col && c <= last_col(); }
};

// Result of laying out table markup. `explicit_box[i]` tells whether
// cells[i].box came from the markup.
struct TableGrid {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Cell> cells;
    std::vector<bool> explicit_box;
};

struct Table {
    std::string id;
    int number = 0;
    std::string caption;
    int page = 0;
    Box box;
    int n_rows = 0;
    int n_cols = 0;
    int header_rows = 1;
    std::vector<Cell> cells;  // sorted by anchor (row, col)

    // Rebuilds the slot index. Throws StructureError unless every slot is
    // covered by exactly one cell and cell ids match their anchors.
    void index();

    const Cell* cell_at(int row, int col) const;
    std::optional<std::size_t> cell_index_at(int row, int col) const;
    std::optional<std::size_t> cell_index(std::string_view id) const;
    const Cell* find_cell(std::string_view id) const;

    bool is_header_row(int row) const { return row < header_rows; }
    bool is_header_cell(const Cell& c) const { return c.row < header_rows; }
    int data_row_count() const { return n_rows - header_rows; }

    // First column whose data cells are mostly non-numeric; names the
    // row's entity. 0 when every column is numeric.
    int stub_column() const { return stub_col_; }

private:
    std::vector<std::size_t> slots_;
    int stub_col_ = 0;
};

enum class ComplexityBucket { Simple, Standard, Complex };

std::string_view to_string(ComplexityBucket bucket);

struct ParsedDocument {
    std::string doc_id;
    std::vector<PageInfo> pages;
    std::vector<Paragraph> paragraphs;
    std::vector<Table> tables;
    std::string content_hash;

    const Table* find_table(std::string_view id) const;
    const Paragraph* find_paragraph(std::string_view id) const;
    const PageInfo& page(int index) const { return pages.at(static_cast<std::size_t>(index)); }
};

std::string format_cell_id(int row, int col);
std::optional<std::pair<int, int>> parse_cell_id(std::string_view id);

// Lays out an HTML table. Merged cells keep one anchor with spans; short
// rows are padded with empty cells on the right. Accepts `rowspan`,
// `colspan` and an optional `data-box="x,y,w,h"` on td/th.
TableGrid parse_table_grid(std::string_view markup);

ComplexityBucket classify_area(long area);
ComplexityBucket classify_table_complexity(const Table& table);

// Splits the table box into a uniform grid for cells that have no box.
void layout_missing_cell_boxes(Table& table, const std::vector<bool>& explicit_box);

// Key-sorted compact re-serialization of a JSON bundle; whitespace and key
// order in the input do not change it.
std::string canonical_bundle_bytes(std::string_view bundle);

// "sha256:" followed by the lowercase hex digest.
std::string sha256_tag(std::string_view bytes);

/// Parses and validates a canonical document bundle.
///
/// Throws ValidationError for malformed JSON, missing or mistyped fields,
/// duplicate ids, page indices out of range and boxes outside their page,
/// and StructureError (wrapped as ValidationError) for table markup that
/// cannot be laid out. Every cell is run through parse_quantity.
ParsedDocument ingest_document(std::string_view bundle);

}  // namespace tablink
