#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tablink/document.hpp"
#include "tablink/geometry.hpp"
#include "tablink/inference.hpp"
#include "tablink/mention.hpp"
#include "tablink/options.hpp"
#include "tablink/pairing.hpp"
#include "tablink/resolution.hpp"
#include "tablink/segmentation.hpp"

namespace tablink {

inline constexpr std::string_view kSchemaVersion = "1";

struct LinkedMention {
    Mention mention;
    MentionAlignment alignment;
    std::vector<NormalizedBox> boxes;

    friend bool operator==(const LinkedMention&, const LinkedMention&) = default;
};

struct HighlightRegion {
    AlignmentTarget target;
    std::vector<NormalizedBox> boxes;

    friend bool operator==(const HighlightRegion&, const HighlightRegion&) = default;
};

struct LinkedSentence {
    Sentence sentence;
    std::vector<NormalizedBox> sentence_boxes;
    std::vector<HighlightRegion> regions;
    std::vector<LinkedMention> mentions;

    friend bool operator==(const LinkedSentence&, const LinkedSentence&) = default;
};

struct LinkedPair {
    ParagraphTablePair pair;
    std::vector<LinkedSentence> sentences;

    friend bool operator==(const LinkedPair&, const LinkedPair&) = default;
};

struct LinkingSchema {
    std::string version{kSchemaVersion};
    std::string doc_id;
    std::string content_hash;
    bool gold = false;
    std::vector<LinkedPair> pairs;
    Warnings warnings;

    friend bool operator==(const LinkingSchema&, const LinkingSchema&) = default;
};

// Row and column targets give one box around the line, regions one box
// around the rectangle, cell sets one box per cell.
std::vector<NormalizedBox> target_to_boxes(const AlignmentTarget& target, const Table& table, const PageInfo& page);

// Boxes of the paragraph text in `span`. Line fragments are trimmed
// horizontally in proportion to the characters covered; block fragments
// are sliced vertically the same way. A paragraph without fragments is
// treated as one block.
std::vector<NormalizedBox> span_boxes(const Paragraph& paragraph, Span span, const ParsedDocument& doc,
                                      Warnings* warnings = nullptr);

/// Runs pairing, segmentation, detection, resolution, and region merging
/// over the whole document. Remote failures fall back to deterministic
/// output and are listed in the schema's warnings.
LinkingSchema build_schema(const ParsedDocument& doc, const PipelineOptions& options,
                           InferenceClient* client = nullptr);

// Canonical UTF-8 JSON: fixed key order, no insignificant whitespace,
// fractional numbers printed with six decimals, trailing newline.
std::string encode_schema(const LinkingSchema& schema);

// Throws SchemaError on malformed input or an unknown version.
LinkingSchema decode_schema(std::string_view bytes);

// Throws SchemaError when an id, span, or target does not exist in `doc`.
void validate_schema(const LinkingSchema& schema, const ParsedDocument& doc);

}  // namespace tablink
