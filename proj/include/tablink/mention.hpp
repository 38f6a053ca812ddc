#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tablink/document.hpp"
#include "tablink/inference.hpp"
#include "tablink/options.hpp"
#include "tablink/segmentation.hpp"

namespace tablink {

enum class MentionType { NamedEntity, ReferentialEntity, InferredEntity, RawValue, DerivedValue, Structural };
enum class MentionSource { Deterministic, Remote };

std::string_view to_string(MentionType type);
std::string_view to_string(MentionSource source);
// Accepts the canonical names as well as snake_case or spaced variants.
std::optional<MentionType> parse_mention_type(std::string_view name);
std::optional<MentionSource> parse_mention_source(std::string_view name);

inline bool is_entity(MentionType t) {
    return t == MentionType::NamedEntity || t == MentionType::ReferentialEntity || t == MentionType::InferredEntity;
}
inline bool is_value(MentionType t) { return t == MentionType::RawValue || t == MentionType::DerivedValue; }

struct Mention {
    std::string id;
    std::string sentence_id;
    std::string text;
    Span span;  // within the sentence text
    MentionType type = MentionType::NamedEntity;
    MentionSource source = MentionSource::Deterministic;

    friend bool operator==(const Mention&, const Mention&) = default;
};

// Unvalidated candidate as proposed by a backend.
struct MentionCandidate {
    std::string text;
    std::optional<Span> span;
    MentionType type = MentionType::NamedEntity;
};

enum class Axis { Row, Column };

// Positional phrase such as "the first row", "the last two columns", or
// "row 3". `index` counts from the start, or from the end when
// `from_end` is set; `count` is the number of consecutive lines.
struct OrdinalPhrase {
    Axis axis = Axis::Row;
    bool from_end = false;
    int index = 0;
    int count = 1;

    friend bool operator==(const OrdinalPhrase&, const OrdinalPhrase&) = default;
};

std::optional<OrdinalPhrase> parse_ordinal_phrase(std::string_view phrase);

/// Rule-based detector producing NamedEntity (header, stub, and spanning
/// label vocabulary), RawValue, DerivedValue (numbers near a cue phrase or
/// carrying an explicit sign), and Structural (ordinal grammar) mentions.
/// Numbers inside table citations or positional phrases are skipped. The
/// result is sorted by span and has empty ids.
std::vector<Mention> detect_mentions_deterministic(const Sentence& sentence, const Table& table,
                                                   const DetectionSettings& settings);
std::vector<Mention> detect_mentions_deterministic(const Sentence& sentence, const Table& table);

// Keeps a candidate iff the sentence text at its span equals its text. A
// candidate without a span whose text occurs exactly once gets that span.
// Duplicates (same span and type) are dropped.
std::vector<Mention> validate_mention_spans(const Sentence& sentence, std::span<const MentionCandidate> candidates,
                                            MentionSource source = MentionSource::Remote);

std::string detection_request_json(const Sentence& sentence, const Table& table, std::string_view paragraph_context);

// Throws ProtocolError carrying the raw body when the payload does not
// follow {"mentions":[{"text","start","end","type"}]}.
std::vector<MentionCandidate> parse_detection_response(const std::string& body);

/// Asks the remote backend for candidates and validates them. Throws
/// BackendUnavailable once retries are exhausted, ProtocolError on a
/// malformed payload.
std::vector<Mention> detect_mentions_remote(const Sentence& sentence, const Table& table, InferenceClient& client,
                                            const RemoteSettings& settings, std::string_view paragraph_context = {});

// Deterministic mentions are kept; a remote mention is added when it
// overlaps nothing, and replaces the overlapped mentions when all of them
// have a different type. Output sorted by span.
std::vector<Mention> combine_mentions(std::vector<Mention> deterministic, std::vector<Mention> remote);

// ids become "{sentence_id}#{table_id}#m{k}" in list order.
void assign_mention_ids(std::vector<Mention>& mentions, std::string_view sentence_id, std::string_view table_id);

}  // namespace tablink
