#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tablink/document.hpp"

namespace tablink::testing {

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(TABLINK_FIXTURE_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedDocument load_fixture(const std::string& name) { return ingest_document(read_fixture(name)); }

// Plain grid without merged cells; cell boxes are a uniform 10x10 layout.
inline Table make_table(const std::vector<std::vector<std::string>>& rows, int header_rows = 1,
                        std::string id = "t1") {
    Table t;
    t.id = std::move(id);
    t.number = 1;
    t.n_rows = static_cast<int>(rows.size());
    t.n_cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    t.header_rows = header_rows;
    t.box = Box{0, 0, 10.0 * t.n_cols, 10.0 * t.n_rows};
    for (int r = 0; r < t.n_rows; ++r) {
        for (int c = 0; c < t.n_cols; ++c) {
            Cell cell;
            cell.id = format_cell_id(r, c);
            cell.row = r;
            cell.col = c;
            cell.text = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            cell.box = Box{10.0 * c, 10.0 * r, 10.0, 10.0};
            t.cells.push_back(std::move(cell));
        }
    }
    t.index();
    return t;
}

}  // namespace tablink::testing
