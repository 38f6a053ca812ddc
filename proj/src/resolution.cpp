#include "tablink/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

namespace tablink {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

AlignmentTarget AlignmentTarget::cell_set(std::vector<std::string> ids, const Table& table) {
    auto position = [&](const std::string& id) {
        const Cell* c = table.find_cell(id);
        return c ? std::pair{c->row, c->col} : std::pair{std::numeric_limits<int>::max(), 0};
    };
    std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
        return std::tuple(position(a), a) < std::tuple(position(b), b);
    });
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    AlignmentTarget t;
    t.granularity = Granularity::Cell;
    t.cells = std::move(ids);
    return t;
}

AlignmentTarget AlignmentTarget::whole_row(int row) {
    AlignmentTarget t;
    t.granularity = Granularity::Row;
    t.row = row;
    return t;
}

AlignmentTarget AlignmentTarget::whole_column(int col) {
    AlignmentTarget t;
    t.granularity = Granularity::Column;
    t.col = col;
    return t;
}

AlignmentTarget AlignmentTarget::region(CellRect rect) {
    AlignmentTarget t;
    t.granularity = Granularity::Region;
    t.rect = rect;
    return t;
}

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::Cell: return "cell";
        case Granularity::Row: return "row";
        case Granularity::Column: return "column";
        case Granularity::Region: return "region";
    }
    return "cell";
}

std::optional<Granularity> parse_granularity(std::string_view name) {
    if (name == "cell") return Granularity::Cell;
    if (name == "row") return Granularity::Row;
    if (name == "column") return Granularity::Column;
    if (name == "region") return Granularity::Region;
    return std::nullopt;
}

bool is_valid_target(const AlignmentTarget& target, const Table& table) {
    switch (target.granularity) {
        case Granularity::Cell:
            if (target.cells.empty()) return false;
            return std::all_of(target.cells.begin(), target.cells.end(),
                               [&](const std::string& id) { return table.find_cell(id) != nullptr; });
        case Granularity::Row: return target.row >= 0 && target.row < table.n_rows;
        case Granularity::Column: return target.col >= 0 && target.col < table.n_cols;
        case Granularity::Region: {
            const CellRect& r = target.rect;
            return r.row0 >= 0 && r.row0 <= r.row1 && r.row1 < table.n_rows && r.col0 >= 0 && r.col0 <= r.col1 &&
                   r.col1 < table.n_cols;
        }
    }
    return false;
}

std::vector<std::size_t> covered_cells(const AlignmentTarget& target, const Table& table) {
    if (!is_valid_target(target, table)) throw SchemaError("target does not fit table " + table.id);
    std::vector<std::size_t> out;
    auto add_rect = [&](int r0, int r1, int c0, int c1) {
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (auto i = table.cell_index_at(r, c)) out.push_back(*i);
    };
    switch (target.granularity) {
        case Granularity::Cell:
            for (const std::string& id : target.cells) out.push_back(*table.cell_index(id));
            break;
        case Granularity::Row: add_rect(target.row, target.row, 0, table.n_cols - 1); break;
        case Granularity::Column: add_rect(0, table.n_rows - 1, target.col, target.col); break;
        case Granularity::Region:
            add_rect(target.rect.row0, target.rect.row1, target.rect.col0, target.rect.col1);
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> covered_cell_ids(const AlignmentTarget& target, const Table& table) {
    std::vector<std::string> out;
    for (std::size_t i : covered_cells(target, table)) out.push_back(table.cells[i].id);
    return out;
}

ordered_json target_to_json(const AlignmentTarget& target) {
    ordered_json j;
    j["granularity"] = std::string(to_string(target.granularity));
    switch (target.granularity) {
        case Granularity::Cell: j["cells"] = target.cells; break;
        case Granularity::Row: j["row"] = target.row; break;
        case Granularity::Column: j["col"] = target.col; break;
        case Granularity::Region:
            j["rect"] = ordered_json{{"row0", target.rect.row0},
                                     {"row1", target.rect.row1},
                                     {"col0", target.rect.col0},
                                     {"col1", target.rect.col1}};
            break;
    }
    return j;
}

namespace {

int int_field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer()) {
        throw SchemaError(std::string("target field '") + key + "' must be an integer");
    }
    return j[key].get<int>();
}

}  // namespace

AlignmentTarget target_from_json(const json& j) {
    if (!j.is_object() || !j.contains("granularity") || !j["granularity"].is_string()) {
        throw SchemaError("target needs a 'granularity' string");
    }
    const auto g = parse_granularity(j["granularity"].get<std::string>());
    if (!g) throw SchemaError("unknown granularity '" + j["granularity"].get<std::string>() + "'");
    AlignmentTarget t;
    t.granularity = *g;
    switch (*g) {
        case Granularity::Cell:
            if (!j.contains("cells") || !j["cells"].is_array()) throw SchemaError("cell target needs 'cells'");
            for (const json& id : j["cells"]) {
                if (!id.is_string()) throw SchemaError("cell ids must be strings");
                t.cells.push_back(id.get<std::string>());
            }
            break;
        case Granularity::Row: t.row = int_field(j, "row"); break;
        case Granularity::Column: t.col = int_field(j, "col"); break;
        case Granularity::Region: {
            if (!j.contains("rect")) throw SchemaError("region target needs 'rect'");
            const json& r = j["rect"];
            t.rect = CellRect{int_field(r, "row0"), int_field(r, "row1"), int_field(r, "col0"), int_field(r, "col1")};
            break;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string_view to_string(Mechanism m) {
    switch (m) {
        case Mechanism::Semantic: return "semantic";
        case Mechanism::Numeric: return "numeric";
        case Mechanism::Structural: return "structural";
    }
    return "semantic";
}

std::string_view to_string(MatchTier t) {
    switch (t) {
        case MatchTier::Exact: return "exact";
        case MatchTier::Rounding: return "rounding";
        case MatchTier::Approximate: return "approximate";
    }
    return "exact";
}

std::string_view to_string(DerivedOp op) {
    switch (op) {
        case DerivedOp::Difference: return "difference";
        case DerivedOp::AbsoluteDifference: return "absolute_difference";
        case DerivedOp::PercentChange: return "percent_change";
        case DerivedOp::Ratio: return "ratio";
    }
    return "difference";
}

std::optional<Mechanism> parse_mechanism(std::string_view name) {
    for (Mechanism m : {Mechanism::Semantic, Mechanism::Numeric, Mechanism::Structural})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

std::optional<MatchTier> parse_match_tier(std::string_view name) {
    for (MatchTier t : {MatchTier::Exact, MatchTier::Rounding, MatchTier::Approximate})
        if (to_string(t) == name) return t;
    return std::nullopt;
}

std::optional<DerivedOp> parse_derived_op(std::string_view name) {
    for (DerivedOp op : {DerivedOp::Difference, DerivedOp::AbsoluteDifference, DerivedOp::PercentChange, DerivedOp::Ratio})
        if (to_string(op) == name) return op;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Entities
// ---------------------------------------------------------------------------

namespace {

std::string strip_parenthetical(std::string_view s) {
    std::string out;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        else if (c == ')' && depth > 0) --depth;
        else if (depth == 0) out.push_back(c);
    }
    return collapse_whitespace(out);
}

std::vector<std::string> token_set(std::vector<std::string> toks) {
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    return toks;
}

// 2: same token sequence, 1: same token set, 0: no match.
int entity_match_quality(const std::vector<std::string>& mention, std::string_view cell_text) {
    int best = 0;
    for (const std::string& form : {std::string(cell_text), strip_parenthetical(cell_text)}) {
        const auto toks = normalize_tokens(form);
        if (toks.empty()) continue;
        if (toks == mention) return 2;
        if (token_set(toks) == token_set(mention)) best = 1;
    }
    return best;
}

enum class LabelKind { RowLabel = 0, ColumnLabel = 1, Interior = 2 };

LabelKind label_kind(const Cell& c, const Table& table) {
    if (table.is_header_cell(c)) return LabelKind::ColumnLabel;
    if (c.col == table.stub_column() || c.col_span > 1) return LabelKind::RowLabel;
    return LabelKind::Interior;
}

AlignmentTarget entity_target(const Cell& c, LabelKind kind, const Table& table) {
    switch (kind) {
        case LabelKind::RowLabel:
            if (c.row_span > 1) return AlignmentTarget::region({c.row, c.last_row(), 0, table.n_cols - 1});
            return AlignmentTarget::whole_row(c.row);
        case LabelKind::ColumnLabel:
            if (c.col_span > 1) return AlignmentTarget::region({0, table.n_rows - 1, c.col, c.last_col()});
            return AlignmentTarget::whole_column(c.col);
        case LabelKind::Interior: break;
    }
    return AlignmentTarget::cell_set({c.id}, table);
}

}  // namespace

std::optional<MentionAlignment> resolve_entity(const Mention& mention, const Table& table, InferenceClient* client,
                                               const Sentence* sentence, const RemoteSettings& remote) {
    if (!is_entity(mention.type)) return std::nullopt;

    if (mention.type != MentionType::NamedEntity) {
        if (!client || !sentence) return std::nullopt;
        const std::string body =
            exchange_with_retry(*client, resolve_request_json(*sentence, mention, table), remote.max_attempts);
        MentionAlignment a;
        a.mention_id = mention.id;
        a.target = parse_resolve_response(body, table);
        a.mechanism = Mechanism::Semantic;
        a.evidence = RemoteEvidence{};
        return a;
    }

    const auto wanted = normalize_tokens(mention.text);
    if (wanted.empty()) return std::nullopt;

    const Cell* best = nullptr;
    std::tuple<int, int, int, int> best_key{};  // (-quality, kind, row, col)
    int best_quality = 0;
    for (const Cell& c : table.cells) {
        if (c.text.empty() || c.numeric) continue;
        const int q = entity_match_quality(wanted, c.text);
        if (q == 0) continue;
        const auto key = std::tuple(-q, static_cast<int>(label_kind(c, table)), c.row, c.col);
        if (!best || key < best_key) {
            best = &c;
            best_key = key;
            best_quality = q;
        }
    }
    if (!best) return std::nullopt;

    MentionAlignment a;
    a.mention_id = mention.id;
    a.target = entity_target(*best, label_kind(*best, table), table);
    a.mechanism = Mechanism::Semantic;
    a.evidence = LexicalEvidence{best->id, best->text, best_quality == 2};
    return a;
}

// ---------------------------------------------------------------------------
// Raw values
// ---------------------------------------------------------------------------

namespace {

// Half-up rounding of `x` at the mention's printed precision, in absolute
// units. Scaled mentions therefore only round-match when the scale is
// small; "1.6T" against 1.57E+12 is left to the approximate tier.
bool rounds_to(double x, const NumericValue& value, double tolerance) {
    return nearly_equal(round_half_up(x, value.display_precision), value.magnitude, tolerance);
}

int rect_distance(const Cell& a, const Cell& b) {
    auto gap = [](int a0, int a1, int b0, int b1) { return std::max({0, b0 - a1, a0 - b1}); };
    return gap(a.row, a.last_row(), b.row, b.last_row()) + gap(a.col, a.last_col(), b.col, b.last_col());
}

std::vector<std::size_t> context_cells(std::span<const AlignmentTarget> context, const Table& table) {
    std::vector<std::size_t> out;
    for (const AlignmentTarget& t : context) {
        if (!is_valid_target(t, table)) continue;
        const auto cells = covered_cells(t, table);
        out.insert(out.end(), cells.begin(), cells.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<NumericValue> mention_value(const Mention& m) { return try_parse_quantity(m.text); }

}  // namespace

std::optional<MatchTier> match_value(const NumericValue& mention, const NumericValue& cell,
                                     const ResolutionSettings& settings) {
    if (nearly_equal(cell.magnitude, mention.magnitude, settings.equality_tolerance)) return MatchTier::Exact;
    if (rounds_to(cell.magnitude, mention, settings.equality_tolerance)) return MatchTier::Rounding;
    if (mention.scaled() && cell.scaled() && cell.magnitude != 0.0 &&
        std::abs(cell.magnitude - mention.magnitude) <= settings.approximate_tolerance * std::abs(cell.magnitude)) {
        return MatchTier::Approximate;
    }
    return std::nullopt;
}

std::optional<MentionAlignment> resolve_raw_value(const Mention& mention, const Table& table,
                                                  std::span<const AlignmentTarget> context,
                                                  const ResolutionSettings& settings) {
    const auto value = mention_value(mention);
    if (!value) return std::nullopt;
    const auto anchors = context_cells(context, table);

    struct Hit {
        int tier;
        int proximity;
        std::size_t cell;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const Cell& c = table.cells[i];
        if (!c.numeric || table.is_header_cell(c)) continue;
        const auto tier = match_value(*value, *c.numeric, settings);
        if (!tier) continue;
        int proximity = 0;
        if (!anchors.empty()) {
            proximity = std::numeric_limits<int>::max();
            for (std::size_t k : anchors) proximity = std::min(proximity, rect_distance(c, table.cells[k]));
        }
        hits.push_back({static_cast<int>(*tier), proximity, i});
    }
    if (hits.empty()) return std::nullopt;
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::tie(a.tier, a.proximity, a.cell) < std::tie(b.tier, b.proximity, b.cell);
    });

    LookupEvidence ev;
    ev.tier = static_cast<MatchTier>(hits.front().tier);
    ev.value = value->magnitude;
    std::vector<std::string> chosen;
    for (const Hit& h : hits) {
        if (h.tier == hits.front().tier && h.proximity == hits.front().proximity) {
            chosen.push_back(table.cells[h.cell].id);
        } else {
            ev.alternatives.push_back({static_cast<MatchTier>(h.tier), table.cells[h.cell].id});
        }
    }
    ev.ambiguous = chosen.size() > 1;
    if (ev.ambiguous) {
        spdlog::debug("value '{}' matches {} cells of {} equally well", mention.text, chosen.size(), table.id);
    }

    MentionAlignment a;
    a.mention_id = mention.id;
    a.target = AlignmentTarget::cell_set(chosen, table);
    ev.cells = a.target.cells;
    a.mechanism = Mechanism::Numeric;
    a.evidence = std::move(ev);
    return a;
}

// ---------------------------------------------------------------------------
// Derived values
// ---------------------------------------------------------------------------

std::vector<DerivedOp> applicable_ops(const NumericValue& value) {
    if (value.is_percent) return {DerivedOp::Difference, DerivedOp::AbsoluteDifference, DerivedOp::PercentChange};
    return {DerivedOp::Difference, DerivedOp::AbsoluteDifference, DerivedOp::Ratio};
}

namespace {

std::optional<double> apply_op(DerivedOp op, double a, double b) {
    switch (op) {
        case DerivedOp::Difference: return a - b;
        case DerivedOp::AbsoluteDifference: return std::abs(a - b);
        case DerivedOp::PercentChange:
            if (b == 0.0) return std::nullopt;
            return 100.0 * (a - b) / b;
        case DerivedOp::Ratio:
            if (b == 0.0) return std::nullopt;
            return a / b;
    }
    return std::nullopt;
}

int scope_class(const Cell& a, const Cell& b) {
    if (a.col == b.col) return 0;
    if (a.row == b.row) return 1;
    return 2;
}

bool in_scope(const Cell& a, const Cell& b, PairScope scope) {
    switch (scope) {
        case PairScope::SameColumn: return a.col == b.col;
        case PairScope::SameRow: return a.row == b.row;
        case PairScope::WholeTable: return true;
    }
    return true;
}

struct RankedCandidate {
    DerivedCandidate candidate;
    std::size_t a;
    std::size_t b;
};

std::vector<RankedCandidate> enumerate_candidates(const NumericValue& value, const Table& table, PairScope scope,
                                                  std::span<const DerivedOp> ops) {
    std::vector<std::size_t> numeric;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const Cell& c = table.cells[i];
        if (c.numeric && !table.is_header_cell(c)) numeric.push_back(i);
    }
    std::vector<RankedCandidate> out;
    for (std::size_t ia : numeric) {
        for (std::size_t ib : numeric) {
            if (ia == ib) continue;
            const Cell& a = table.cells[ia];
            const Cell& b = table.cells[ib];
            if (!in_scope(a, b, scope)) continue;
            for (DerivedOp op : ops) {
                const auto r = apply_op(op, a.numeric->magnitude, b.numeric->magnitude);
                if (!r || !std::isfinite(*r)) continue;
                if (!rounds_to(*r, value, 1e-9)) continue;
                out.push_back({DerivedCandidate{op, a.id, b.id, *r}, ia, ib});
                break;
            }
        }
    }
    auto op_rank = [&](DerivedOp op) { return std::find(ops.begin(), ops.end(), op) - ops.begin(); };
    auto key = [&](const RankedCandidate& rc) {
        const Cell& a = table.cells[rc.a];
        const Cell& b = table.cells[rc.b];
        return std::tuple(scope_class(a, b), std::abs(a.row - b.row) + std::abs(a.col - b.col),
                          op_rank(rc.candidate.op), a.row, a.col, b.row, b.col);
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](const RankedCandidate& x, const RankedCandidate& y) { return key(x) < key(y); });
    return out;
}

}  // namespace

std::vector<DerivedCandidate> derived_value_oracle(const NumericValue& value, const Table& table, PairScope scope,
                                                   std::span<const DerivedOp> ops) {
    std::vector<DerivedCandidate> out;
    for (RankedCandidate& rc : enumerate_candidates(value, table, scope, ops)) out.push_back(std::move(rc.candidate));
    return out;
}

std::vector<DerivedCandidate> derived_value_oracle(const NumericValue& value, const Table& table, PairScope scope) {
    const auto ops = applicable_ops(value);
    return derived_value_oracle(value, table, scope, ops);
}

std::optional<MentionAlignment> resolve_derived_value(const Mention& mention, const Table& table,
                                                      std::span<const AlignmentTarget> context) {
    const auto value = mention_value(mention);
    if (!value) return std::nullopt;
    const auto ops = applicable_ops(*value);

    std::vector<RankedCandidate> candidates;
    for (PairScope scope : {PairScope::SameColumn, PairScope::SameRow, PairScope::WholeTable}) {
        candidates = enumerate_candidates(*value, table, scope, ops);
        if (!candidates.empty()) break;
    }
    if (candidates.empty()) return std::nullopt;

    // Rows and columns named by the sentence's entities.
    std::set<int> rows;
    std::set<int> cols;
    for (const AlignmentTarget& t : context) {
        if (!is_valid_target(t, table)) continue;
        switch (t.granularity) {
            case Granularity::Row: rows.insert(t.row); break;
            case Granularity::Column: cols.insert(t.col); break;
            case Granularity::Region: {
                const bool full_width = t.rect.col0 == 0 && t.rect.col1 == table.n_cols - 1;
                const bool full_height = t.rect.row0 == 0 && t.rect.row1 == table.n_rows - 1;
                if (full_width || !full_height)
                    for (int r = t.rect.row0; r <= t.rect.row1; ++r) rows.insert(r);
                if (full_height || !full_width)
                    for (int c = t.rect.col0; c <= t.rect.col1; ++c) cols.insert(c);
                break;
            }
            case Granularity::Cell:
                for (std::size_t i : covered_cells(t, table)) rows.insert(table.cells[i].row);
                break;
        }
    }
    if (!rows.empty() || !cols.empty()) {
        auto support = [&](const RankedCandidate& rc) {
            int n = 0;
            for (std::size_t i : {rc.a, rc.b}) {
                const Cell& c = table.cells[i];
                if (rows.count(c.row) || cols.count(c.col)) ++n;
            }
            return n;
        };
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&](const RankedCandidate& x, const RankedCandidate& y) { return support(x) > support(y); });
    }

    const DerivedCandidate& top = candidates.front().candidate;
    DerivedEvidence ev;
    ev.op = top.op;
    ev.operands = {top.a, top.b};
    ev.computed = top.computed;
    for (std::size_t k = 1; k < candidates.size(); ++k) ev.alternatives.push_back(candidates[k].candidate);

    MentionAlignment a;
    a.mention_id = mention.id;
    a.target = AlignmentTarget::cell_set({top.a, top.b}, table);
    a.mechanism = Mechanism::Numeric;
    a.evidence = std::move(ev);
    return a;
}

// ---------------------------------------------------------------------------
// Structural
// ---------------------------------------------------------------------------

std::optional<MentionAlignment> resolve_structural(const Mention& mention, const Table& table, Warnings* warnings) {
    if (mention.type != MentionType::Structural) return std::nullopt;
    const auto phrase = parse_ordinal_phrase(mention.text);
    if (!phrase) return std::nullopt;

    const bool rows = phrase->axis == Axis::Row;
    const int offset = rows ? table.header_rows : 0;
    const int extent = rows ? table.data_row_count() : table.n_cols;
    int first = 0;
    if (phrase->from_end) {
        first = extent - 1 - phrase->index - (phrase->count - 1);
    } else {
        first = phrase->index;
    }
    const int last = first + phrase->count - 1;
    if (first < 0 || last >= extent || phrase->count < 1) {
        const std::string detail = "'" + mention.text + "' is outside table " + table.id;
        spdlog::warn("ordinal out of range: {}", detail);
        warn(warnings, "ordinal-out-of-range", detail);
        return std::nullopt;
    }

    MentionAlignment a;
    a.mention_id = mention.id;
    a.mechanism = Mechanism::Structural;
    const int g0 = first + offset;
    const int g1 = last + offset;
    if (phrase->count == 1) {
        a.target = rows ? AlignmentTarget::whole_row(g0) : AlignmentTarget::whole_column(g0);
    } else if (rows) {
        a.target = AlignmentTarget::region({g0, g1, 0, table.n_cols - 1});
    } else {
        a.target = AlignmentTarget::region({0, table.n_rows - 1, g0, g1});
    }
    a.evidence = OrdinalEvidence{mention.text, phrase->axis, g0, phrase->count};
    return a;
}

// ---------------------------------------------------------------------------
// Remote resolution
// ---------------------------------------------------------------------------

std::string resolve_request_json(const Sentence& sentence, const Mention& mention, const Table& table) {
    json j;
    j["task"] = "resolve";
    j["sentence"] = sentence.text;
    j["mention"] = {{"text", mention.text},
                    {"start", mention.span.start},
                    {"end", mention.span.end},
                    {"type", std::string(to_string(mention.type))}};
    j["table_context"] = json::parse(table_context_json(table));
    return j.dump();
}

AlignmentTarget parse_resolve_response(const std::string& body, const Table& table) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("resolution response is not JSON: ") + e.what(), body);
    }
    if (!j.is_object() || !j.contains("target")) throw ProtocolError("resolution response lacks 'target'", body);
    AlignmentTarget t;
    try {
        t = target_from_json(j["target"]);
    } catch (const SchemaError& e) {
        throw ProtocolError(e.what(), body);
    }
    if (t.granularity == Granularity::Cell) t = AlignmentTarget::cell_set(t.cells, table);
    if (!is_valid_target(t, table)) throw ProtocolError("resolution target does not fit table " + table.id, body);
    return t;
}

// ---------------------------------------------------------------------------
// Sentence
// ---------------------------------------------------------------------------

std::vector<MentionAlignment> resolve_sentence(const Sentence& sentence, std::span<const Mention> mentions,
                                               const Table& table, InferenceClient* client,
                                               const PipelineOptions& options, Warnings* warnings) {
    std::vector<std::optional<MentionAlignment>> slots(mentions.size());
    std::vector<AlignmentTarget> context;

    for (std::size_t i = 0; i < mentions.size(); ++i) {
        const Mention& m = mentions[i];
        if (m.type == MentionType::Structural) {
            slots[i] = resolve_structural(m, table, warnings);
        } else if (is_entity(m.type)) {
            try {
                slots[i] = resolve_entity(m, table, client, &sentence, options.remote);
            } catch (const BackendUnavailable& e) {
                spdlog::warn("remote resolution of '{}' failed: {}", m.text, e.what());
                warn(warnings, "remote-resolution-failed", m.id + ": " + e.what());
            } catch (const ProtocolError& e) {
                spdlog::warn("remote resolution of '{}' returned a bad payload: {}", m.text, e.what());
                warn(warnings, "remote-resolution-failed", m.id + ": " + e.what());
            }
        }
        if (slots[i]) context.push_back(slots[i]->target);
    }

    for (std::size_t i = 0; i < mentions.size(); ++i) {
        const Mention& m = mentions[i];
        if (m.type == MentionType::DerivedValue) {
            slots[i] = resolve_derived_value(m, table, context);
            if (!slots[i]) slots[i] = resolve_raw_value(m, table, context, options.resolution);
        } else if (m.type == MentionType::RawValue) {
            slots[i] = resolve_raw_value(m, table, context, options.resolution);
        }
    }

    std::vector<MentionAlignment> out;
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

}  // namespace tablink
