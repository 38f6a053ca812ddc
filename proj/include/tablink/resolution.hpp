#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tablink/document.hpp"
#include "tablink/inference.hpp"
#include "tablink/mention.hpp"
#include "tablink/options.hpp"

namespace tablink {

enum class Granularity { Cell, Row, Column, Region };

// Inclusive grid rectangle.
struct CellRect {
    int row0 = 0;
    int row1 = 0;
    int col0 = 0;
    int col1 = 0;

    friend bool operator==(const CellRect&, const CellRect&) = default;
};

struct AlignmentTarget {
    Granularity granularity = Granularity::Cell;
    std::vector<std::string> cells;  // Cell: sorted by grid position
    int row = 0;                     // Row
    int col = 0;                     // Column
    CellRect rect;                   // Region

    static AlignmentTarget cell_set(std::vector<std::string> ids, const Table& table);
    static AlignmentTarget whole_row(int row);
    static AlignmentTarget whole_column(int col);
    static AlignmentTarget region(CellRect rect);

    friend bool operator==(const AlignmentTarget&, const AlignmentTarget&) = default;
};

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view name);

bool is_valid_target(const AlignmentTarget& target, const Table& table);

// Indices into table.cells of every cell touching the target, ascending.
// Merged cells are reported once. Throws SchemaError on an invalid target.
std::vector<std::size_t> covered_cells(const AlignmentTarget& target, const Table& table);
std::vector<std::string> covered_cell_ids(const AlignmentTarget& target, const Table& table);

nlohmann::ordered_json target_to_json(const AlignmentTarget& target);
// Throws SchemaError on a malformed object.
AlignmentTarget target_from_json(const nlohmann::json& j);

enum class Mechanism { Semantic, Numeric, Structural };
enum class MatchTier { Exact, Rounding, Approximate };
enum class DerivedOp { Difference, AbsoluteDifference, PercentChange, Ratio };
enum class PairScope { SameColumn, SameRow, WholeTable };

std::string_view to_string(Mechanism m);
std::string_view to_string(MatchTier t);
std::string_view to_string(DerivedOp op);
std::optional<Mechanism> parse_mechanism(std::string_view name);
std::optional<MatchTier> parse_match_tier(std::string_view name);
std::optional<DerivedOp> parse_derived_op(std::string_view name);

struct LexicalEvidence {
    std::string cell_id;
    std::string cell_text;
    bool exact_form = true;  // false: token-set match

    friend bool operator==(const LexicalEvidence&, const LexicalEvidence&) = default;
};

struct LookupAlternative {
    MatchTier tier = MatchTier::Exact;
    std::string cell_id;

    friend bool operator==(const LookupAlternative&, const LookupAlternative&) = default;
};

struct LookupEvidence {
    MatchTier tier = MatchTier::Exact;
    double value = 0.0;
    std::vector<std::string> cells;
    bool ambiguous = false;
    std::vector<LookupAlternative> alternatives;

    friend bool operator==(const LookupEvidence&, const LookupEvidence&) = default;
};

// Ordered operand pair (a, b) for a - b, |a - b|, 100 (a - b) / b, or a / b.
struct DerivedCandidate {
    DerivedOp op = DerivedOp::Difference;
    std::string a;
    std::string b;
    double computed = 0.0;

    friend bool operator==(const DerivedCandidate&, const DerivedCandidate&) = default;
};

struct DerivedEvidence {
    DerivedOp op = DerivedOp::Difference;
    std::vector<std::string> operands;  // {a, b}
    double computed = 0.0;
    std::vector<DerivedCandidate> alternatives;

    friend bool operator==(const DerivedEvidence&, const DerivedEvidence&) = default;
};

struct OrdinalEvidence {
    std::string phrase;
    Axis axis = Axis::Row;
    int first = 0;  // absolute grid index
    int count = 1;

    friend bool operator==(const OrdinalEvidence&, const OrdinalEvidence&) = default;
};

struct RemoteEvidence {
    friend bool operator==(const RemoteEvidence&, const RemoteEvidence&) = default;
};

using Evidence = std::variant<std::monostate, LexicalEvidence, LookupEvidence, DerivedEvidence, OrdinalEvidence,
                              RemoteEvidence>;

struct MentionAlignment {
    std::string mention_id;
    AlignmentTarget target;
    Mechanism mechanism = Mechanism::Semantic;
    Evidence evidence;
    int rank = 1;

    friend bool operator==(const MentionAlignment&, const MentionAlignment&) = default;
};

/// Normalized match of an entity mention against the header, stub, and
/// spanning-label cells, falling back to interior cells. Stub and spanning
/// labels give a Row, headers a Column, anything else a Cell. Referential
/// and inferred mentions go to `client` when one is given.
std::optional<MentionAlignment> resolve_entity(const Mention& mention, const Table& table,
                                               InferenceClient* client = nullptr, const Sentence* sentence = nullptr,
                                               const RemoteSettings& remote = {});

// Match tier of one data cell against a value, if any.
std::optional<MatchTier> match_value(const NumericValue& mention, const NumericValue& cell,
                                     const ResolutionSettings& settings = {});

/// Looks the value up among the data cells. Cells are ranked by tier, then
/// by grid distance to `context`; the best group becomes the target and
/// the rest are listed as alternatives.
std::optional<MentionAlignment> resolve_raw_value(const Mention& mention, const Table& table,
                                                  std::span<const AlignmentTarget> context = {},
                                                  const ResolutionSettings& settings = {});

// Operations tried for a value: percentages try differences before
// percent change; plain numbers try differences before ratio.
std::vector<DerivedOp> applicable_ops(const NumericValue& value);

/// Every ordered pair of numeric data cells within `scope` for which some
/// op rounds to `value`, one candidate per pair (first op that matches).
/// Sorted by same column, same row, other; then grid distance; then op
/// order; then the operand positions.
std::vector<DerivedCandidate> derived_value_oracle(const NumericValue& value, const Table& table, PairScope scope,
                                                   std::span<const DerivedOp> ops);
std::vector<DerivedCandidate> derived_value_oracle(const NumericValue& value, const Table& table, PairScope scope);

std::optional<MentionAlignment> resolve_derived_value(const Mention& mention, const Table& table,
                                                      std::span<const AlignmentTarget> context = {});

// Records an "ordinal-out-of-range" warning when the phrase points past
// the grid.
std::optional<MentionAlignment> resolve_structural(const Mention& mention, const Table& table,
                                                   Warnings* warnings = nullptr);

std::string resolve_request_json(const Sentence& sentence, const Mention& mention, const Table& table);
// Throws ProtocolError unless the body carries a target valid for `table`.
AlignmentTarget parse_resolve_response(const std::string& body, const Table& table);

/// Two passes: entities and structural mentions first, then values ranked
/// against the pass-one targets. Unresolved mentions are left out. Remote
/// failures become "remote-resolution-failed" warnings.
std::vector<MentionAlignment> resolve_sentence(const Sentence& sentence, std::span<const Mention> mentions,
                                               const Table& table, InferenceClient* client,
                                               const PipelineOptions& options, Warnings* warnings = nullptr);

}  // namespace tablink
