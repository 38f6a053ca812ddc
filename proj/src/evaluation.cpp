#include "tablink/evaluation.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

namespace tablink {

double span_iou(Span a, Span b) {
    const std::size_t lo = std::max(a.start, b.start);
    const std::size_t hi = std::min(a.end, b.end);
    const std::size_t inter = hi > lo ? hi - lo : 0;
    const std::size_t uni = a.length() + b.length() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::pair<std::size_t, std::size_t>> match_spans(std::span<const SpanItem> pred,
                                                             std::span<const SpanItem> gold, double threshold) {
    struct Edge {
        double iou;
        std::size_t p;
        std::size_t g;
    };
    std::vector<Edge> edges;
    for (std::size_t p = 0; p < pred.size(); ++p) {
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (pred[p].group != gold[g].group) continue;
            const double iou = span_iou(pred[p].span, gold[g].span);
            if (iou >= threshold && iou > 0.0) edges.push_back({iou, p, g});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::tuple(-a.iou, a.p, a.g) < std::tuple(-b.iou, b.p, b.g);
    });
    std::vector<bool> pred_used(pred.size(), false);
    std::vector<bool> gold_used(gold.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const Edge& e : edges) {
        if (pred_used[e.p] || gold_used[e.g]) continue;
        pred_used[e.p] = gold_used[e.g] = true;
        out.emplace_back(e.p, e.g);
    }
    return out;
}

DetectionScores detection_scores(std::size_t tp, std::size_t predicted, std::size_t gold) {
    DetectionScores s{tp, predicted, gold, 0.0, 0.0, 0.0};
    if (predicted == 0 && gold == 0) {
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 1.0;
    s.recall = gold ? static_cast<double>(tp) / static_cast<double>(gold) : 1.0;
    if (predicted == 0 || gold == 0) return s;
    const double sum = s.precision + s.recall;
    s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
    return s;
}

DetectionScores score_detection(std::span<const SpanItem> pred, std::span<const SpanItem> gold, double threshold) {
    return detection_scores(match_spans(pred, gold, threshold).size(), pred.size(), gold.size());
}

ResolutionScores score_resolution(std::span<const ResolutionItem> pred, std::span<const ResolutionItem> gold,
                                  std::span<const Table> tables) {
    auto table_of = [&](const std::string& id) -> const Table& {
        for (const Table& t : tables)
            if (t.id == id) return t;
        throw SchemaError("unknown table '" + id + "'");
    };
    auto cells_of = [&](const ResolutionItem& item) -> std::optional<std::vector<std::size_t>> {
        const Table& t = table_of(item.table_id);
        if (!is_valid_target(item.target, t)) return std::nullopt;
        return covered_cells(item.target, t);
    };

    std::map<std::string, const ResolutionItem*> by_id;
    for (const ResolutionItem& p : pred) by_id.emplace(p.mention_id, &p);

    ResolutionScores s;
    auto record = [&](ComplexityBucket b, bool ok) {
        auto& acc = s.buckets[static_cast<std::size_t>(b)];
        ++acc.total;
        ++s.overall.total;
        if (ok) {
            ++acc.correct;
            ++s.overall.correct;
        }
    };

    std::map<std::string, bool> gold_ids;
    for (const ResolutionItem& g : gold) {
        gold_ids[g.mention_id] = true;
        const Table& t = table_of(g.table_id);
        bool ok = false;
        if (auto it = by_id.find(g.mention_id); it != by_id.end() && it->second->table_id == g.table_id) {
            const auto pc = cells_of(*it->second);
            const auto gc = cells_of(g);
            ok = pc && gc && *pc == *gc;
        }
        record(classify_table_complexity(t), ok);
    }
    for (const ResolutionItem& p : pred) {
        if (gold_ids.count(p.mention_id)) continue;
        spdlog::warn("prediction '{}' has no gold counterpart; counted as incorrect", p.mention_id);
        ++s.unmatched_predictions;
        record(classify_table_complexity(table_of(p.table_id)), false);
    }
    return s;
}

ScoreReport evaluate_schemas(const LinkingSchema& pred, const LinkingSchema& gold, const ParsedDocument& doc,
                             double threshold) {
    struct Flat {
        std::vector<SpanItem> spans;
        std::vector<ResolutionItem> items;
    };
    auto flatten = [](const LinkingSchema& s) {
        Flat f;
        for (const LinkedPair& lp : s.pairs) {
            for (const LinkedSentence& ls : lp.sentences) {
                for (const LinkedMention& lm : ls.mentions) {
                    f.spans.push_back({ls.sentence.id + "|" + lp.pair.table_id, lm.mention.span});
                    f.items.push_back({lm.mention.id, lp.pair.table_id, lm.alignment.target});
                }
            }
        }
        return f;
    };
    const Flat p = flatten(pred);
    const Flat g = flatten(gold);

    ScoreReport report;
    const auto matches = match_spans(p.spans, g.spans, threshold);
    report.detection = detection_scores(matches.size(), p.spans.size(), g.spans.size());

    // Predictions renamed to the gold mention they were matched with.
    std::vector<ResolutionItem> mapped;
    for (const auto& [pi, gi] : matches) {
        ResolutionItem item = p.items[pi];
        item.mention_id = g.items[gi].mention_id;
        mapped.push_back(std::move(item));
    }
    report.resolution = score_resolution(mapped, g.items, doc.tables);
    return report;
}

std::string report_json(const ScoreReport& r) {
    nlohmann::ordered_json j;
    j["detection"] = {{"precision", r.detection.precision}, {"recall", r.detection.recall},
                      {"f1", r.detection.f1},               {"true_positives", r.detection.true_positives},
                      {"predicted", r.detection.predicted}, {"gold", r.detection.gold}};
    auto acc = [](const Accuracy& a) {
        return nlohmann::ordered_json{{"accuracy", a.value()}, {"correct", a.correct}, {"total", a.total}};
    };
    nlohmann::ordered_json buckets;
    for (ComplexityBucket b : {ComplexityBucket::Simple, ComplexityBucket::Standard, ComplexityBucket::Complex})
        buckets[std::string(to_string(b))] = acc(r.resolution.bucket(b));
    j["resolution"] = {{"overall", acc(r.resolution.overall)},
                       {"buckets", buckets},
                       {"unmatched_predictions", r.resolution.unmatched_predictions}};
    return j.dump(2) + "\n";
}

std::string report_text(const ScoreReport& r) {
    std::string out;
    out += fmt::format("{:<22}{:>10}{:>10}{:>10}\n", "detection", "value", "count", "of");
    out += fmt::format("{:<22}{:>9.2f}%{:>10}{:>10}\n", "  precision", 100.0 * r.detection.precision,
                       r.detection.true_positives, r.detection.predicted);
    out += fmt::format("{:<22}{:>9.2f}%{:>10}{:>10}\n", "  recall", 100.0 * r.detection.recall,
                       r.detection.true_positives, r.detection.gold);
    out += fmt::format("{:<22}{:>9.2f}%\n", "  f1", 100.0 * r.detection.f1);
    out += fmt::format("{:<22}{:>10}{:>10}{:>10}\n", "resolution", "accuracy", "correct", "total");
    auto line = [&](std::string_view name, const Accuracy& a) {
        if (a.total == 0)
            out += fmt::format("{:<22}{:>10}{:>10}{:>10}\n", name, "-", a.correct, a.total);
        else
            out += fmt::format("{:<22}{:>9.2f}%{:>10}{:>10}\n", name, 100.0 * a.value(), a.correct, a.total);
    };
    line("  overall", r.resolution.overall);
    for (ComplexityBucket b : {ComplexityBucket::Simple, ComplexityBucket::Standard, ComplexityBucket::Complex})
        line(fmt::format("  {}", to_string(b)), r.resolution.bucket(b));
    return out;
}

}  // namespace tablink
