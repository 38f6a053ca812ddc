#pragma once

#include <span>
#include <string>
#include <vector>

#include "tablink/options.hpp"
#include "tablink/resolution.hpp"

namespace tablink {

struct SentenceAlignment {
    std::string sentence_id;
    std::vector<AlignmentTarget> regions;  // sorted by (row0, col0)

    friend bool operator==(const SentenceAlignment&, const SentenceAlignment&) = default;
};

// Top-left and bottom-right grid slots touched by a target.
CellRect target_extent(const AlignmentTarget& target, const Table& table);

/// Merges mention targets into sentence-level highlight regions.
///
/// Data rows whose non-header cells are covered at or above the promotion
/// threshold become rows; cells of fully covered columns are not counted.
/// Runs of adjacent rows become one region spanning all columns. Columns
/// are promoted the same way from what the rows left over. Remaining cells
/// form bounding-box regions per 4-connected group, and isolated cells are
/// gathered into one cell target. Coverage never shrinks, the result never
/// has more regions than the input has targets, and merging the output
/// again returns it unchanged.
std::vector<AlignmentTarget> merge_targets(std::span<const AlignmentTarget> targets, const Table& table,
                                           const ScopeSettings& settings = {});

SentenceAlignment merge_targets(std::string sentence_id, std::span<const MentionAlignment> alignments,
                                const Table& table, const ScopeSettings& settings = {});

}  // namespace tablink
