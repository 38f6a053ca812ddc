#include "tablink/document.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>

#include <json.hpp>
#include <openssl/evp.h>

namespace tablink {

using nlohmann::json;

namespace {

constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Minimal HTML table reader
// ---------------------------------------------------------------------------

struct RawCell {
    std::string text;
    int row_span = 1;
    int col_span = 1;
    std::optional<Box> box;
};

void append_codepoint(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        const std::size_t semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        const std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (name == "minus") out.append("\xE2\x88\x92");
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            const std::string_view digits = name.substr(hex ? 2 : 1);
            const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || cp > 0x10FFFF) {
                out.append(s.substr(i, semi - i + 1));
            } else {
                append_codepoint(out, cp);
            }
        } else {
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi;
    }
    return out;
}

struct Tag {
    std::string name;  // lowercase, no slash
    bool closing = false;
    std::vector<std::pair<std::string, std::string>> attrs;

    std::optional<std::string_view> attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return v;
        return std::nullopt;
    }
};

// Parses the tag starting at html[pos] == '<'; returns the position after '>'.
std::size_t read_tag(std::string_view html, std::size_t pos, Tag& tag) {
    std::size_t i = pos + 1;
    auto skip_ws = [&] {
        while (i < html.size() && whitespace_at(html, i)) i += whitespace_at(html, i);
    };
    skip_ws();
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    const std::size_t name_start = i;
    while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-')) ++i;
    tag.name = to_lower_ascii(html.substr(name_start, i - name_start));

    while (i < html.size() && html[i] != '>') {
        skip_ws();
        if (i >= html.size() || html[i] == '>') break;
        if (html[i] == '/') {
            ++i;
            continue;
        }
        const std::size_t key_start = i;
        while (i < html.size() && html[i] != '=' && html[i] != '>' && !whitespace_at(html, i) && html[i] != '/') ++i;
        std::string key = to_lower_ascii(html.substr(key_start, i - key_start));
        skip_ws();
        std::string value;
        if (i < html.size() && html[i] == '=') {
            ++i;
            skip_ws();
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                const char quote = html[i++];
                const std::size_t end = html.find(quote, i);
                if (end == std::string_view::npos) throw StructureError("unterminated attribute value");
                value = decode_entities(html.substr(i, end - i));
                i = end + 1;
            } else {
                const std::size_t v0 = i;
                while (i < html.size() && html[i] != '>' && !whitespace_at(html, i)) ++i;
                value = decode_entities(html.substr(v0, i - v0));
            }
        }
        if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    if (i >= html.size()) throw StructureError("unterminated tag");
    return i + 1;
}

int parse_span_attr(std::optional<std::string_view> value, const char* name) {
    if (!value) return 1;
    int n = 0;
    const std::string_view v = *value;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), n);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || n < 1) {
        throw StructureError(std::string(name) + " must be a positive integer, got '" + std::string(v) + "'");
    }
    return n;
}

Box parse_box_attr(std::string_view v) {
    double vals[4];
    std::size_t i = 0;
    for (int k = 0; k < 4; ++k) {
        while (i < v.size() && (v[i] == ' ' || (k > 0 && v[i] == ','))) ++i;
        const auto res = std::from_chars(v.data() + i, v.data() + v.size(), vals[k]);
        if (res.ec != std::errc()) throw StructureError("malformed data-box '" + std::string(v) + "'");
        i = static_cast<std::size_t>(res.ptr - v.data());
    }
    while (i < v.size() && v[i] == ' ') ++i;
    if (i != v.size() || vals[2] < 0 || vals[3] < 0) throw StructureError("malformed data-box '" + std::string(v) + "'");
    return Box{vals[0], vals[1], vals[2], vals[3]};
}

std::vector<std::vector<RawCell>> read_rows(std::string_view html) {
    std::vector<std::vector<RawCell>> rows;
    bool in_row = false;
    std::optional<RawCell> cell;
    std::string buffer;
    int table_depth = 0;
    bool done = false;

    auto close_cell = [&] {
        if (!cell) return;
        cell->text = collapse_whitespace(decode_entities(buffer));
        rows.back().push_back(std::move(*cell));
        cell.reset();
        buffer.clear();
    };
    auto close_row = [&] {
        close_cell();
        in_row = false;
    };

    std::size_t i = 0;
    while (i < html.size() && !done) {
        if (html[i] != '<') {
            const std::size_t next = html.find('<', i);
            const std::size_t end = next == std::string_view::npos ? html.size() : next;
            if (cell) buffer.append(html.substr(i, end - i));
            i = end;
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            const std::size_t end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        Tag tag;
        i = read_tag(html, i, tag);
        if (tag.name == "table") {
            if (tag.closing) {
                close_row();
                done = --table_depth <= 0;
            } else if (++table_depth > 1) {
                throw StructureError("nested tables are not supported");
            }
        } else if (tag.name == "tr") {
            close_row();
            if (!tag.closing) {
                rows.emplace_back();
                in_row = true;
            }
        } else if (tag.name == "td" || tag.name == "th") {
            close_cell();
            if (!tag.closing) {
                if (!in_row) {
                    rows.emplace_back();
                    in_row = true;
                }
                RawCell c;
                c.row_span = parse_span_attr(tag.attr("rowspan"), "rowspan");
                c.col_span = parse_span_attr(tag.attr("colspan"), "colspan");
                if (auto b = tag.attr("data-box")) c.box = parse_box_attr(*b);
                cell = std::move(c);
            }
        } else if (tag.name == "br" || tag.name == "p" || tag.name == "div") {
            if (cell) buffer.push_back(' ');
        } else if (tag.name == "thead" || tag.name == "tbody" || tag.name == "tfoot") {
            close_row();
        }
    }
    close_row();
    return rows;
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw ValidationError(where + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw ValidationError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw ValidationError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ValidationError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

Box parse_box_json(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 4) throw ValidationError(where + ": box must be [x, y, w, h]");
    Box b;
    double* dst[4] = {&b.x, &b.y, &b.w, &b.h};
    for (std::size_t k = 0; k < 4; ++k) {
        if (!v[k].is_number()) throw ValidationError(where + ": box entries must be numbers");
        *dst[k] = v[k].get<double>();
    }
    if (b.w < 0 || b.h < 0) throw ValidationError(where + ": box has negative extent");
    return b;
}

void check_in_page(const Box& b, const std::vector<PageInfo>& pages, int page, const std::string& where) {
    if (page < 0 || page >= static_cast<int>(pages.size())) {
        throw ValidationError(where + ": page " + std::to_string(page) + " out of range");
    }
    if (!box_within_page(b, pages[static_cast<std::size_t>(page)])) {
        throw ValidationError(where + ": box lies outside page " + std::to_string(page));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Table
// ---------------------------------------------------------------------------

void Table::index() {
    if (n_rows < 1 || n_cols < 1) throw StructureError("table " + id + " has an empty grid");
    if (header_rows < 0 || header_rows >= n_rows) {
        throw StructureError("table " + id + ": header_rows must be smaller than the row count");
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); });
    slots_.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), kNoCell);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Cell& c = cells[i];
        if (c.row_span < 1 || c.col_span < 1 || c.row < 0 || c.col < 0 || c.last_row() >= n_rows ||
            c.last_col() >= n_cols) {
            throw StructureError("table " + id + ": cell " + c.id + " lies outside the grid");
        }
        if (c.id != format_cell_id(c.row, c.col)) {
            throw StructureError("table " + id + ": cell id " + c.id + " does not match its anchor");
        }
        for (int r = c.row; r <= c.last_row(); ++r) {
            for (int k = c.col; k <= c.last_col(); ++k) {
                std::size_t& slot = slots_[static_cast<std::size_t>(r * n_cols + k)];
                if (slot != kNoCell) throw StructureError("table " + id + ": overlapping cells at " + format_cell_id(r, k));
                slot = i;
            }
        }
        c.numeric = try_parse_quantity(c.text);
    }
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        if (slots_[s] == kNoCell) {
            throw StructureError("table " + id + ": slot " +
                                 format_cell_id(static_cast<int>(s) / n_cols, static_cast<int>(s) % n_cols) +
                                 " is not covered");
        }
    }

    stub_col_ = 0;
    for (int col = 0; col < n_cols; ++col) {
        int textual = 0;
        int numeric = 0;
        for (const Cell& c : cells) {
            if (c.col != col || is_header_cell(c) || c.text.empty()) continue;
            (c.numeric ? numeric : textual)++;
        }
        if (textual > 0 && textual >= numeric) {
            stub_col_ = col;
            break;
        }
    }
}

std::optional<std::size_t> Table::cell_index_at(int row, int col) const {
    if (row < 0 || col < 0 || row >= n_rows || col >= n_cols || slots_.empty()) return std::nullopt;
    return slots_[static_cast<std::size_t>(row * n_cols + col)];
}

const Cell* Table::cell_at(int row, int col) const {
    auto i = cell_index_at(row, col);
    return i ? &cells[*i] : nullptr;
}

std::optional<std::size_t> Table::cell_index(std::string_view cid) const {
    auto rc = parse_cell_id(cid);
    if (!rc) return std::nullopt;
    auto i = cell_index_at(rc->first, rc->second);
    if (!i || cells[*i].row != rc->first || cells[*i].col != rc->second) return std::nullopt;
    return i;
}

const Cell* Table::find_cell(std::string_view cid) const {
    auto i = cell_index(cid);
    return i ? &cells[*i] : nullptr;
}

std::string_view to_string(ComplexityBucket bucket) {
    switch (bucket) {
        case ComplexityBucket::Simple: return "simple";
        case ComplexityBucket::Standard: return "standard";
        case ComplexityBucket::Complex: return "complex";
    }
    return "simple";
}

const Table* ParsedDocument::find_table(std::string_view tid) const {
    for (const Table& t : tables)
        if (t.id == tid) return &t;
    return nullptr;
}

const Paragraph* ParsedDocument::find_paragraph(std::string_view pid) const {
    for (const Paragraph& p : paragraphs)
        if (p.id == pid) return &p;
    return nullptr;
}

std::string format_cell_id(int row, int col) {
    return "r" + std::to_string(row) + "c" + std::to_string(col);
}

std::optional<std::pair<int, int>> parse_cell_id(std::string_view id) {
    if (id.size() < 4 || id[0] != 'r') return std::nullopt;
    const std::size_t c = id.find('c', 1);
    if (c == std::string_view::npos) return std::nullopt;
    auto read = [](std::string_view digits) -> std::optional<int> {
        if (digits.empty() || (digits.size() > 1 && digits[0] == '0')) return std::nullopt;
        int v = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) return std::nullopt;
        return v;
    };
    auto r = read(id.substr(1, c - 1));
    auto k = read(id.substr(c + 1));
    if (!r || !k) return std::nullopt;
    return std::pair{*r, *k};
}

TableGrid parse_table_grid(std::string_view markup) {
    const auto rows = read_rows(markup);
    if (rows.empty()) throw StructureError("table markup has no rows");
    const int n_rows = static_cast<int>(rows.size());

    std::vector<std::vector<std::size_t>> occ(rows.size());
    TableGrid grid;
    grid.n_rows = n_rows;

    auto slot = [&](int r, int c) -> std::size_t& {
        auto& line = occ[static_cast<std::size_t>(r)];
        if (line.size() <= static_cast<std::size_t>(c)) line.resize(static_cast<std::size_t>(c) + 1, kNoCell);
        return line[static_cast<std::size_t>(c)];
    };

    for (int r = 0; r < n_rows; ++r) {
        int c = 0;
        for (const RawCell& raw : rows[static_cast<std::size_t>(r)]) {
            while (slot(r, c) != kNoCell) ++c;
            if (r + raw.row_span > n_rows) {
                throw StructureError("rowspan of cell " + format_cell_id(r, c) + " runs past the last row");
            }
            const std::size_t idx = grid.cells.size();
            for (int rr = r; rr < r + raw.row_span; ++rr) {
                for (int cc = c; cc < c + raw.col_span; ++cc) {
                    std::size_t& s = slot(rr, cc);
                    if (s != kNoCell) throw StructureError("overlapping spans at " + format_cell_id(rr, cc));
                    s = idx;
                }
            }
            Cell cell;
            cell.row = r;
            cell.col = c;
            cell.row_span = raw.row_span;
            cell.col_span = raw.col_span;
            cell.text = raw.text;
            if (raw.box) cell.box = *raw.box;
            grid.cells.push_back(std::move(cell));
            grid.explicit_box.push_back(raw.box.has_value());
            c += raw.col_span;
        }
    }

    std::size_t width = 0;
    for (const auto& line : occ) width = std::max(width, line.size());
    if (width == 0) throw StructureError("table markup has no cells");
    grid.n_cols = static_cast<int>(width);

    // Ragged rows: pad every free slot with an empty cell.
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < grid.n_cols; ++c) {
            if (slot(r, c) != kNoCell) continue;
            slot(r, c) = grid.cells.size();
            Cell pad;
            pad.row = r;
            pad.col = c;
            grid.cells.push_back(std::move(pad));
            grid.explicit_box.push_back(false);
        }
    }

    std::vector<std::size_t> order(grid.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(grid.cells[a].row, grid.cells[a].col) < std::pair(grid.cells[b].row, grid.cells[b].col);
    });
    TableGrid sorted;
    sorted.n_rows = grid.n_rows;
    sorted.n_cols = grid.n_cols;
    for (std::size_t i : order) {
        Cell c = std::move(grid.cells[i]);
        c.id = format_cell_id(c.row, c.col);
        sorted.cells.push_back(std::move(c));
        sorted.explicit_box.push_back(grid.explicit_box[i]);
    }
    return sorted;
}

ComplexityBucket classify_area(long area) {
    if (area <= 48) return ComplexityBucket::Simple;
    if (area <= 90) return ComplexityBucket::Standard;
    return ComplexityBucket::Complex;
}

ComplexityBucket classify_table_complexity(const Table& table) {
    return classify_area(static_cast<long>(table.n_rows) * table.n_cols);
}

void layout_missing_cell_boxes(Table& table, const std::vector<bool>& explicit_box) {
    const double cw = table.box.w / table.n_cols;
    const double rh = table.box.h / table.n_rows;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        if (i < explicit_box.size() && explicit_box[i]) continue;
        Cell& c = table.cells[i];
        c.box = Box{table.box.x + cw * c.col, table.box.y + rh * c.row, cw * c.col_span, rh * c.row_span};
    }
}

std::string canonical_bundle_bytes(std::string_view bundle) {
    try {
        return json::parse(bundle).dump();
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bundle is not valid JSON: ") + e.what());
    }
}

std::string sha256_tag(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

ParsedDocument ingest_document(std::string_view bundle) {
    json root;
    try {
        root = json::parse(bundle);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bundle is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("bundle must be a JSON object");

    ParsedDocument doc;
    doc.content_hash = sha256_tag(root.dump());
    doc.doc_id = require_string(root, "doc_id", "bundle");
    if (doc.doc_id.empty()) throw ValidationError("bundle: doc_id must be nonempty");

    const json& pages = require(root, "pages", "bundle");
    if (!pages.is_array() || pages.empty()) throw ValidationError("bundle: pages must be a nonempty array");
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const std::string where = "pages[" + std::to_string(i) + "]";
        PageInfo p;
        p.index = require_int(pages[i], "index", where);
        p.width = require_number(pages[i], "width", where);
        p.height = require_number(pages[i], "height", where);
        if (p.index != static_cast<int>(i)) throw ValidationError(where + ": page indices must be contiguous from 0");
        if (!(p.width > 0) || !(p.height > 0)) throw ValidationError(where + ": width and height must be positive");
        doc.pages.push_back(p);
    }

    std::set<std::string> seen;
    const json& paragraphs = require(root, "paragraphs", "bundle");
    if (!paragraphs.is_array()) throw ValidationError("bundle: paragraphs must be an array");
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        const json& pj = paragraphs[i];
        const std::string where = "paragraphs[" + std::to_string(i) + "]";
        Paragraph p;
        p.id = require_string(pj, "id", where);
        if (p.id.empty()) throw ValidationError(where + ": id must be nonempty");
        if (!seen.insert(p.id).second) throw ValidationError("duplicate paragraph id '" + p.id + "'");
        p.page = require_int(pj, "page", where);
        p.box = parse_box_json(require(pj, "box", where), where);
        check_in_page(p.box, doc.pages, p.page, where);
        p.text = require_string(pj, "text", where);
        if (collapse_whitespace(p.text).empty()) throw ValidationError(where + ": text must be nonempty");

        if (auto lines = pj.find("lines"); lines != pj.end() && !lines->is_null()) {
            if (!lines->is_array()) throw ValidationError(where + ": lines must be an array");
            for (std::size_t k = 0; k < lines->size(); ++k) {
                const json& lj = (*lines)[k];
                const std::string lw = where + ".lines[" + std::to_string(k) + "]";
                TextFragment f;
                f.is_line = true;
                f.page = lj.contains("page") ? require_int(lj, "page", lw) : p.page;
                f.box = parse_box_json(require(lj, "box", lw), lw);
                check_in_page(f.box, doc.pages, f.page, lw);
                const int s = require_int(lj, "start", lw);
                const int e = require_int(lj, "end", lw);
                if (s < 0 || e < s || static_cast<std::size_t>(e) > p.text.size()) {
                    throw ValidationError(lw + ": character range outside the text");
                }
                f.span = Span{static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
                p.fragments.push_back(f);
            }
        }
        if (p.fragments.empty()) p.fragments.push_back(TextFragment{p.page, p.box, Span{0, p.text.size()}, false});
        doc.paragraphs.push_back(std::move(p));
    }

    seen.clear();
    const json& tables = require(root, "tables", "bundle");
    if (!tables.is_array()) throw ValidationError("bundle: tables must be an array");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const json& tj = tables[i];
        const std::string where = "tables[" + std::to_string(i) + "]";
        Table t;
        t.id = require_string(tj, "id", where);
        if (t.id.empty()) throw ValidationError(where + ": id must be nonempty");
        if (!seen.insert(t.id).second) throw ValidationError("duplicate table id '" + t.id + "'");
        t.number = require_int(tj, "number", where);
        if (auto cap = tj.find("caption"); cap != tj.end() && !cap->is_null()) {
            if (!cap->is_string()) throw ValidationError(where + ": caption must be a string");
            t.caption = cap->get<std::string>();
        }
        t.page = require_int(tj, "page", where);
        t.box = parse_box_json(require(tj, "box", where), where);
        check_in_page(t.box, doc.pages, t.page, where);
        std::optional<int> header_rows;
        if (auto hr = tj.find("header_rows"); hr != tj.end() && !hr->is_null()) {
            if (!hr->is_number_integer()) throw ValidationError(where + ": header_rows must be an integer");
            header_rows = hr->get<int>();
        }
        const std::string html = require_string(tj, "html", where);

        try {
            TableGrid grid = parse_table_grid(html);
            t.n_rows = grid.n_rows;
            t.n_cols = grid.n_cols;
            t.cells = std::move(grid.cells);
            t.header_rows = header_rows.value_or(std::min(1, t.n_rows - 1));
            layout_missing_cell_boxes(t, grid.explicit_box);
            t.index();
        } catch (const StructureError& e) {
            throw ValidationError(where + " (" + t.id + "): " + e.what());
        }
        for (const Cell& c : t.cells) check_in_page(c.box, doc.pages, t.page, where + " cell " + c.id);
        doc.tables.push_back(std::move(t));
    }
    return doc;
}

}  // namespace tablink
