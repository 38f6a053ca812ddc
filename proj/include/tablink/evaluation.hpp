#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tablink/document.hpp"
#include "tablink/resolution.hpp"
#include "tablink/schema.hpp"

namespace tablink {

// |a ∩ b| / |a ∪ b|; 0 when the union is empty.
double span_iou(Span a, Span b);

// A mention span tagged with the unit it is compared within (sentence id
// and table id).
struct SpanItem {
    std::string group;
    Span span;
};

// Greedy one-to-one matching: all (pred, gold) pairs of one group with
// IoU ≥ threshold, taken by descending IoU, then by pred index, then gold
// index. Returns (pred index, gold index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> match_spans(std::span<const SpanItem> pred,
                                                             std::span<const SpanItem> gold, double threshold = 0.5);

struct DetectionScores {
    std::size_t true_positives = 0;
    std::size_t predicted = 0;
    std::size_t gold = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Ratios from counts. Both empty: 1/1/1. No predictions: P = 1, R = 0.
// No gold: R = 1, P = 0. F1 is 0 whenever P + R is 0 or either side is
// empty.
DetectionScores detection_scores(std::size_t true_positives, std::size_t predicted, std::size_t gold);

DetectionScores score_detection(std::span<const SpanItem> pred, std::span<const SpanItem> gold,
                                double threshold = 0.5);

struct ResolutionItem {
    std::string mention_id;
    std::string table_id;
    AlignmentTarget target;
};

struct Accuracy {
    std::size_t correct = 0;
    std::size_t total = 0;
    double value() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct ResolutionScores {
    Accuracy overall;
    std::array<Accuracy, 3> buckets;  // indexed by ComplexityBucket
    std::size_t unmatched_predictions = 0;

    const Accuracy& bucket(ComplexityBucket b) const { return buckets[static_cast<std::size_t>(b)]; }
};

/// All-or-nothing: a prediction is correct iff it covers exactly the gold
/// cells. Gold mentions without a prediction count as wrong; predictions
/// whose id is not in gold also count as wrong, in the bucket of their own
/// table. Throws SchemaError when a table id is unknown.
ResolutionScores score_resolution(std::span<const ResolutionItem> pred, std::span<const ResolutionItem> gold,
                                  std::span<const Table> tables);

struct ScoreReport {
    DetectionScores detection;
    ResolutionScores resolution;
};

/// Compares two schemas for the same document. Detection matches mention
/// spans per sentence and table; resolution is scored over gold mentions,
/// each paired with the prediction it was matched to.
ScoreReport evaluate_schemas(const LinkingSchema& pred, const LinkingSchema& gold, const ParsedDocument& doc,
                             double threshold = 0.5);

std::string report_json(const ScoreReport& report);
std::string report_text(const ScoreReport& report);

}  // namespace tablink
