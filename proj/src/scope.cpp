#include "tablink/scope.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace tablink {

CellRect target_extent(const AlignmentTarget& target, const Table& table) {
    CellRect r{std::numeric_limits<int>::max(), -1, std::numeric_limits<int>::max(), -1};
    for (std::size_t i : covered_cells(target, table)) {
        const Cell& c = table.cells[i];
        r.row0 = std::min(r.row0, c.row);
        r.row1 = std::max(r.row1, c.last_row());
        r.col0 = std::min(r.col0, c.col);
        r.col1 = std::max(r.col1, c.last_col());
    }
    return r;
}

namespace {

using CellSet = std::set<std::size_t>;

CellSet coverage(std::span<const AlignmentTarget> targets, const Table& table) {
    CellSet out;
    for (const AlignmentTarget& t : targets) {
        const auto cells = covered_cells(t, table);
        out.insert(cells.begin(), cells.end());
    }
    return out;
}

// Cells touching grid line `index` along rows or columns, optionally
// leaving out header cells.
CellSet line_cells(const Table& table, bool row, int index, bool data_only) {
    CellSet out;
    const int n = row ? table.n_cols : table.n_rows;
    for (int k = 0; k < n; ++k) {
        const auto i = row ? table.cell_index_at(index, k) : table.cell_index_at(k, index);
        if (!i) continue;
        if (data_only && table.is_header_cell(table.cells[*i])) continue;
        out.insert(*i);
    }
    return out;
}

bool promoted(const CellSet& line, const CellSet& covered, double threshold) {
    if (line.empty()) return false;
    std::size_t hit = 0;
    for (std::size_t i : line) hit += covered.count(i);
    return static_cast<double>(hit) >= threshold * static_cast<double>(line.size());
}

bool adjacent(const Cell& a, const Cell& b) {
    const bool rows_touch = a.row <= b.last_row() && b.row <= a.last_row();
    const bool cols_touch = a.col <= b.last_col() && b.col <= a.last_col();
    if (rows_touch && (a.last_col() + 1 == b.col || b.last_col() + 1 == a.col)) return true;
    if (cols_touch && (a.last_row() + 1 == b.row || b.last_row() + 1 == a.row)) return true;
    return false;
}

void sort_regions(std::vector<AlignmentTarget>& regions, const Table& table) {
    std::stable_sort(regions.begin(), regions.end(), [&](const AlignmentTarget& a, const AlignmentTarget& b) {
        const CellRect ra = target_extent(a, table);
        const CellRect rb = target_extent(b, table);
        return std::tie(ra.row0, ra.col0, ra.row1, ra.col1) < std::tie(rb.row0, rb.col0, rb.row1, rb.col1);
    });
}

std::vector<AlignmentTarget> merge_once(const CellSet& covered, std::size_t limit, const Table& table,
                                        const ScopeSettings& settings) {
    std::vector<AlignmentTarget> regions;
    CellSet absorbed;

    // Cells of fully covered columns say nothing about rows; without this a
    // single column of a two-column table would promote every row.
    CellSet full_columns;
    for (int c = 0; c < table.n_cols; ++c) {
        const CellSet all = line_cells(table, false, c, false);
        if (std::all_of(all.begin(), all.end(), [&](std::size_t i) { return covered.count(i) > 0; }))
            full_columns.insert(all.begin(), all.end());
    }

    // Rows.
    std::vector<bool> row_on(static_cast<std::size_t>(table.n_rows), false);
    for (int r = table.header_rows; r < table.n_rows; ++r) {
        CellSet line = line_cells(table, true, r, true);
        for (std::size_t i : full_columns) line.erase(i);
        row_on[static_cast<std::size_t>(r)] = promoted(line, covered, settings.promotion_threshold);
    }
    for (int r = 0; r < table.n_rows;) {
        if (!row_on[static_cast<std::size_t>(r)]) {
            ++r;
            continue;
        }
        int end = r;
        while (end + 1 < table.n_rows && row_on[static_cast<std::size_t>(end + 1)]) ++end;
        regions.push_back(end == r ? AlignmentTarget::whole_row(r)
                                   : AlignmentTarget::region({r, end, 0, table.n_cols - 1}));
        const auto cells = covered_cells(regions.back(), table);
        absorbed.insert(cells.begin(), cells.end());
        r = end + 1;
    }

    // Columns, only where rows left something uncovered.
    CellSet residual;
    std::set_difference(covered.begin(), covered.end(), absorbed.begin(), absorbed.end(),
                        std::inserter(residual, residual.end()));
    std::vector<bool> col_on(static_cast<std::size_t>(table.n_cols), false);
    for (int c = 0; c < table.n_cols; ++c) {
        const CellSet all = line_cells(table, false, c, false);
        const bool has_residual =
            std::any_of(all.begin(), all.end(), [&](std::size_t i) { return residual.count(i) > 0; });
        if (!has_residual) continue;
        CellSet data = line_cells(table, false, c, true);
        if (data.empty()) data = all;
        col_on[static_cast<std::size_t>(c)] = promoted(data, covered, settings.promotion_threshold);
    }
    for (int c = 0; c < table.n_cols;) {
        if (!col_on[static_cast<std::size_t>(c)]) {
            ++c;
            continue;
        }
        int end = c;
        while (end + 1 < table.n_cols && col_on[static_cast<std::size_t>(end + 1)]) ++end;
        regions.push_back(end == c ? AlignmentTarget::whole_column(c)
                                   : AlignmentTarget::region({0, table.n_rows - 1, c, end}));
        const auto cells = covered_cells(regions.back(), table);
        absorbed.insert(cells.begin(), cells.end());
        c = end + 1;
    }

    // Leftover cells: connected groups become rectangles, loners one cell set.
    std::vector<std::size_t> rest;
    std::set_difference(covered.begin(), covered.end(), absorbed.begin(), absorbed.end(), std::back_inserter(rest));
    std::vector<int> group(rest.size(), -1);
    int groups = 0;
    for (std::size_t s = 0; s < rest.size(); ++s) {
        if (group[s] >= 0) continue;
        group[s] = groups;
        std::vector<std::size_t> stack{s};
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < rest.size(); ++v) {
                if (group[v] < 0 && adjacent(table.cells[rest[u]], table.cells[rest[v]])) {
                    group[v] = groups;
                    stack.push_back(v);
                }
            }
        }
        ++groups;
    }
    std::vector<std::string> loners;
    for (int g = 0; g < groups; ++g) {
        std::vector<std::size_t> members;
        for (std::size_t s = 0; s < rest.size(); ++s)
            if (group[s] == g) members.push_back(rest[s]);
        if (members.size() == 1) {
            loners.push_back(table.cells[members.front()].id);
            continue;
        }
        CellRect r{std::numeric_limits<int>::max(), -1, std::numeric_limits<int>::max(), -1};
        for (std::size_t i : members) {
            const Cell& c = table.cells[i];
            r.row0 = std::min(r.row0, c.row);
            r.row1 = std::max(r.row1, c.last_row());
            r.col0 = std::min(r.col0, c.col);
            r.col1 = std::max(r.col1, c.last_col());
        }
        regions.push_back(AlignmentTarget::region(r));
    }
    if (!loners.empty()) regions.push_back(AlignmentTarget::cell_set(loners, table));

    sort_regions(regions, table);

    // Never return more regions than targets came in.
    while (regions.size() > limit && regions.size() >= 2) {
        std::vector<std::size_t> order(regions.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return covered_cells(regions[a], table).size() < covered_cells(regions[b], table).size();
        });
        const std::size_t a = std::min(order[0], order[1]);
        const std::size_t b = std::max(order[0], order[1]);
        auto ids = covered_cell_ids(regions[a], table);
        const auto more = covered_cell_ids(regions[b], table);
        ids.insert(ids.end(), more.begin(), more.end());
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(b));
        regions[a] = AlignmentTarget::cell_set(ids, table);
        sort_regions(regions, table);
    }
    return regions;
}

}  // namespace

std::vector<AlignmentTarget> merge_targets(std::span<const AlignmentTarget> targets, const Table& table,
                                           const ScopeSettings& settings) {
    if (targets.empty()) return {};
    CellSet covered = coverage(targets, table);
    // Rectangles can pull in extra cells, which can promote more lines;
    // repeat until coverage settles.
    for (;;) {
        auto regions = merge_once(covered, targets.size(), table, settings);
        CellSet next = coverage(regions, table);
        if (next == covered) return regions;
        covered = std::move(next);
    }
}

SentenceAlignment merge_targets(std::string sentence_id, std::span<const MentionAlignment> alignments,
                                const Table& table, const ScopeSettings& settings) {
    std::vector<AlignmentTarget> targets;
    targets.reserve(alignments.size());
    for (const MentionAlignment& a : alignments) targets.push_back(a.target);
    return SentenceAlignment{std::move(sentence_id), merge_targets(targets, table, settings)};
}

}  // namespace tablink
