#include "tablink/schema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <spdlog/spdlog.h>

#include "tablink/scope.hpp"

namespace tablink {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

std::vector<NormalizedBox> target_to_boxes(const AlignmentTarget& target, const Table& table, const PageInfo& page) {
    const auto cells = covered_cells(target, table);
    std::vector<NormalizedBox> out;
    if (cells.empty()) return out;
    if (target.granularity == Granularity::Cell) {
        for (std::size_t i : cells) out.push_back(normalize_box(table.cells[i].box, page));
        return out;
    }
    Box all = table.cells[cells.front()].box;
    for (std::size_t i : cells) all = unite(all, table.cells[i].box);
    out.push_back(normalize_box(all, page));
    return out;
}

std::vector<NormalizedBox> span_boxes(const Paragraph& paragraph, Span span, const ParsedDocument& doc,
                                      Warnings* warnings) {
    std::vector<NormalizedBox> out;
    for (const TextFragment& f : paragraph.fragments) {
        const std::size_t fl = f.span.length();
        if (fl == 0 || !f.span.overlaps(span)) continue;
        const double a = static_cast<double>(std::max(span.start, f.span.start) - f.span.start) / static_cast<double>(fl);
        const double b = static_cast<double>(std::min(span.end, f.span.end) - f.span.start) / static_cast<double>(fl);
        Box box = f.box;
        if (f.is_line) {
            box.x = f.box.x + f.box.w * a;
            box.w = f.box.w * (b - a);
        } else {
            box.y = f.box.y + f.box.h * a;
            box.h = f.box.h * (b - a);
        }
        out.push_back(normalize_box(box, doc.page(f.page), warnings));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

LinkingSchema build_schema(const ParsedDocument& doc, const PipelineOptions& options, InferenceClient* client) {
    LinkingSchema schema;
    schema.doc_id = doc.doc_id;
    schema.content_hash = doc.content_hash;

    const auto paragraphs = merge_text_chunks(doc.paragraphs);
    const auto pairs = build_pairs(paragraphs, doc.tables, &schema.warnings);
    const SentenceSplitter splitter(options.abbreviations);

    for (const ParagraphTablePair& pair : pairs) {
        const auto para = std::find_if(paragraphs.begin(), paragraphs.end(),
                                       [&](const Paragraph& p) { return p.id == pair.paragraph_id; });
        const Table* table = doc.find_table(pair.table_id);
        if (para == paragraphs.end() || !table) continue;
        const PageInfo& page = doc.page(table->page);

        LinkedPair linked;
        linked.pair = pair;
        for (const Sentence& sentence : splitter.split(*para)) {
            auto mentions = detect_mentions_deterministic(sentence, *table, options.detection);
            if (client) {
                try {
                    auto remote = detect_mentions_remote(sentence, *table, *client, options.remote, para->text);
                    mentions = combine_mentions(std::move(mentions), std::move(remote));
                } catch (const BackendUnavailable& e) {
                    spdlog::warn("remote detection unavailable for {}: {}", sentence.id, e.what());
                    warn(&schema.warnings, "remote-detection-failed", sentence.id + ": " + e.what());
                } catch (const ProtocolError& e) {
                    spdlog::warn("remote detection payload rejected for {}: {}", sentence.id, e.what());
                    warn(&schema.warnings, "remote-detection-failed", sentence.id + ": " + e.what());
                }
            }
            assign_mention_ids(mentions, sentence.id, table->id);
            const auto alignments = resolve_sentence(sentence, mentions, *table, client, options, &schema.warnings);

            LinkedSentence ls;
            ls.sentence = sentence;
            ls.sentence_boxes = span_boxes(*para, sentence.span, doc, &schema.warnings);
            for (const Mention& m : mentions) {
                const auto a = std::find_if(alignments.begin(), alignments.end(),
                                            [&](const MentionAlignment& x) { return x.mention_id == m.id; });
                if (a == alignments.end()) continue;
                ls.mentions.push_back({m, *a, target_to_boxes(a->target, *table, page)});
            }
            for (AlignmentTarget& t : merge_targets(sentence.id, alignments, *table, options.scope).regions) {
                auto boxes = target_to_boxes(t, *table, page);
                ls.regions.push_back({std::move(t), std::move(boxes)});
            }
            linked.sentences.push_back(std::move(ls));
        }
        schema.pairs.push_back(std::move(linked));
    }
    return schema;
}

// ---------------------------------------------------------------------------
// Canonical writer
// ---------------------------------------------------------------------------

namespace {

void write_canonical(const ordered_json& j, std::string& out) {
    switch (j.type()) {
        case ordered_json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                out += ordered_json(it.key()).dump();
                out.push_back(':');
                write_canonical(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case ordered_json::value_t::array: {
            out.push_back('[');
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out.push_back(',');
                write_canonical(j[i], out);
            }
            out.push_back(']');
            break;
        }
        case ordered_json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) throw SchemaError("non-finite number in schema");
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", v);
            std::string s(buf);
            if (s == "-0.000000") s = "0.000000";
            out += s;
            break;
        }
        default: out += j.dump(); break;
    }
}

ordered_json box_json(const NormalizedBox& b) {
    return ordered_json{{"page", b.page}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

ordered_json boxes_json(const std::vector<NormalizedBox>& boxes) {
    ordered_json a = ordered_json::array();
    for (const NormalizedBox& b : boxes) a.push_back(box_json(b));
    return a;
}

ordered_json span_json(Span s) { return ordered_json::array({s.start, s.end}); }

ordered_json evidence_json(const Evidence& ev) {
    ordered_json j;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                j["kind"] = "none";
            } else if constexpr (std::is_same_v<T, LexicalEvidence>) {
                j["kind"] = "lexical";
                j["cell_id"] = e.cell_id;
                j["cell_text"] = e.cell_text;
                j["exact_form"] = e.exact_form;
            } else if constexpr (std::is_same_v<T, LookupEvidence>) {
                j["kind"] = "lookup";
                j["tier"] = std::string(to_string(e.tier));
                j["value"] = e.value;
                j["cells"] = e.cells;
                j["ambiguous"] = e.ambiguous;
                ordered_json alts = ordered_json::array();
                for (const auto& a : e.alternatives)
                    alts.push_back(ordered_json{{"tier", std::string(to_string(a.tier))}, {"cell_id", a.cell_id}});
                j["alternatives"] = std::move(alts);
            } else if constexpr (std::is_same_v<T, DerivedEvidence>) {
                j["kind"] = "derived";
                j["op"] = std::string(to_string(e.op));
                j["operands"] = e.operands;
                j["computed"] = e.computed;
                ordered_json alts = ordered_json::array();
                for (const auto& a : e.alternatives) {
                    alts.push_back(ordered_json{
                        {"op", std::string(to_string(a.op))}, {"a", a.a}, {"b", a.b}, {"computed", a.computed}});
                }
                j["alternatives"] = std::move(alts);
            } else if constexpr (std::is_same_v<T, OrdinalEvidence>) {
                j["kind"] = "ordinal";
                j["phrase"] = e.phrase;
                j["axis"] = e.axis == Axis::Row ? "row" : "column";
                j["first"] = e.first;
                j["count"] = e.count;
            } else {
                j["kind"] = "remote";
            }
        },
        ev);
    return j;
}

}  // namespace

std::string encode_schema(const LinkingSchema& schema) {
    ordered_json root;
    root["version"] = schema.version;
    root["doc_id"] = schema.doc_id;
    root["content_hash"] = schema.content_hash;
    if (schema.gold) root["gold"] = true;
    ordered_json pairs = ordered_json::array();
    for (const LinkedPair& lp : schema.pairs) {
        ordered_json pj;
        pj["paragraph_id"] = lp.pair.paragraph_id;
        pj["table_id"] = lp.pair.table_id;
        pj["table_number"] = lp.pair.table_number;
        ordered_json refs = ordered_json::array();
        for (Span s : lp.pair.reference_spans) refs.push_back(span_json(s));
        pj["reference_spans"] = std::move(refs);
        ordered_json sentences = ordered_json::array();
        for (const LinkedSentence& ls : lp.sentences) {
            ordered_json sj;
            sj["id"] = ls.sentence.id;
            sj["text"] = ls.sentence.text;
            sj["span"] = span_json(ls.sentence.span);
            sj["sentence_boxes"] = boxes_json(ls.sentence_boxes);
            ordered_json regions = ordered_json::array();
            for (const HighlightRegion& r : ls.regions)
                regions.push_back(ordered_json{{"target", target_to_json(r.target)}, {"boxes", boxes_json(r.boxes)}});
            sj["regions"] = std::move(regions);
            ordered_json mentions = ordered_json::array();
            for (const LinkedMention& lm : ls.mentions) {
                ordered_json mj;
                mj["id"] = lm.mention.id;
                mj["text"] = lm.mention.text;
                mj["span"] = span_json(lm.mention.span);
                mj["type"] = std::string(to_string(lm.mention.type));
                mj["source"] = std::string(to_string(lm.mention.source));
                mj["mechanism"] = std::string(to_string(lm.alignment.mechanism));
                mj["rank"] = lm.alignment.rank;
                mj["evidence"] = evidence_json(lm.alignment.evidence);
                mj["target"] = target_to_json(lm.alignment.target);
                mj["boxes"] = boxes_json(lm.boxes);
                mentions.push_back(std::move(mj));
            }
            sj["mentions"] = std::move(mentions);
            sentences.push_back(std::move(sj));
        }
        pj["sentences"] = std::move(sentences);
        pairs.push_back(std::move(pj));
    }
    root["pairs"] = std::move(pairs);
    ordered_json warnings = ordered_json::array();
    for (const Warning& w : schema.warnings) warnings.push_back(ordered_json{{"code", w.code}, {"detail", w.detail}});
    root["warnings"] = std::move(warnings);

    std::string out;
    write_canonical(root, out);
    out.push_back('\n');
    return out;
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(where + " lacks '" + key + "'");
    return *it;
}

std::string str(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_string()) throw SchemaError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

long long integer(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) throw SchemaError(where + "." + key + " must be an integer");
    return v.get<long long>();
}

double number(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number()) throw SchemaError(where + "." + key + " must be a number");
    return v.get<double>();
}

bool boolean(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_boolean()) throw SchemaError(where + "." + key + " must be a boolean");
    return v.get<bool>();
}

const json& array(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_array()) throw SchemaError(where + "." + key + " must be an array");
    return v;
}

std::vector<std::string> strings(const json& j, const char* key, const std::string& where) {
    std::vector<std::string> out;
    for (const json& s : array(j, key, where)) {
        if (!s.is_string()) throw SchemaError(where + "." + key + " must hold strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

Span span_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
        throw SchemaError(where + " must be [start, end]");
    Span s{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
    if (s.end < s.start) throw SchemaError(where + " ends before it starts");
    return s;
}

std::vector<NormalizedBox> boxes_from(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + " must be an array");
    std::vector<NormalizedBox> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        out.push_back(NormalizedBox{static_cast<int>(integer(j[i], "page", w)), number(j[i], "x", w),
                                    number(j[i], "y", w), number(j[i], "w", w), number(j[i], "h", w)});
    }
    return out;
}

AlignmentTarget target_from(const json& j, const std::string& where) {
    try {
        return target_from_json(j);
    } catch (const SchemaError& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

template <typename E>
E enum_from(const json& j, const char* key, const std::string& where, std::optional<E> (*parse)(std::string_view)) {
    const std::string name = str(j, key, where);
    const auto v = parse(name);
    if (!v) throw SchemaError(where + "." + key + ": unknown value '" + name + "'");
    return *v;
}

Evidence evidence_from(const json& j, const std::string& w) {
    const std::string kind = str(j, "kind", w);
    if (kind == "none") return std::monostate{};
    if (kind == "remote") return RemoteEvidence{};
    if (kind == "lexical") return LexicalEvidence{str(j, "cell_id", w), str(j, "cell_text", w), boolean(j, "exact_form", w)};
    if (kind == "lookup") {
        LookupEvidence e;
        e.tier = enum_from<MatchTier>(j, "tier", w, parse_match_tier);
        e.value = number(j, "value", w);
        e.cells = strings(j, "cells", w);
        e.ambiguous = boolean(j, "ambiguous", w);
        for (const json& a : array(j, "alternatives", w))
            e.alternatives.push_back({enum_from<MatchTier>(a, "tier", w, parse_match_tier), str(a, "cell_id", w)});
        return e;
    }
    if (kind == "derived") {
        DerivedEvidence e;
        e.op = enum_from<DerivedOp>(j, "op", w, parse_derived_op);
        e.operands = strings(j, "operands", w);
        e.computed = number(j, "computed", w);
        for (const json& a : array(j, "alternatives", w)) {
            e.alternatives.push_back(
                {enum_from<DerivedOp>(a, "op", w, parse_derived_op), str(a, "a", w), str(a, "b", w), number(a, "computed", w)});
        }
        return e;
    }
    if (kind == "ordinal") {
        OrdinalEvidence e;
        e.phrase = str(j, "phrase", w);
        const std::string axis = str(j, "axis", w);
        if (axis != "row" && axis != "column") throw SchemaError(w + ".axis must be row or column");
        e.axis = axis == "row" ? Axis::Row : Axis::Column;
        e.first = static_cast<int>(integer(j, "first", w));
        e.count = static_cast<int>(integer(j, "count", w));
        return e;
    }
    throw SchemaError(w + ": unknown evidence kind '" + kind + "'");
}

}  // namespace

LinkingSchema decode_schema(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("schema is not JSON: ") + e.what());
    }
    LinkingSchema s;
    s.version = str(root, "version", "schema");
    if (s.version != kSchemaVersion) throw SchemaError("unsupported schema version '" + s.version + "'");
    s.doc_id = str(root, "doc_id", "schema");
    s.content_hash = str(root, "content_hash", "schema");
    if (root.contains("gold")) s.gold = boolean(root, "gold", "schema");

    const json& pairs = array(root, "pairs", "schema");
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const std::string pw = "pairs[" + std::to_string(p) + "]";
        const json& pj = pairs[p];
        LinkedPair lp;
        lp.pair.paragraph_id = str(pj, "paragraph_id", pw);
        lp.pair.table_id = str(pj, "table_id", pw);
        lp.pair.table_number = pj.contains("table_number") ? static_cast<int>(integer(pj, "table_number", pw)) : 0;
        for (const json& r : array(pj, "reference_spans", pw)) lp.pair.reference_spans.push_back(span_from(r, pw));

        const json& sentences = array(pj, "sentences", pw);
        for (std::size_t k = 0; k < sentences.size(); ++k) {
            const std::string sw = pw + ".sentences[" + std::to_string(k) + "]";
            const json& sj = sentences[k];
            LinkedSentence ls;
            ls.sentence.id = str(sj, "id", sw);
            ls.sentence.paragraph_id = lp.pair.paragraph_id;
            ls.sentence.text = str(sj, "text", sw);
            ls.sentence.span = span_from(field(sj, "span", sw), sw + ".span");
            ls.sentence_boxes = boxes_from(field(sj, "sentence_boxes", sw), sw + ".sentence_boxes");
            for (const json& r : array(sj, "regions", sw)) {
                ls.regions.push_back({target_from(field(r, "target", sw), sw + ".regions"),
                                      boxes_from(field(r, "boxes", sw), sw + ".regions")});
            }
            const json& mentions = array(sj, "mentions", sw);
            for (std::size_t m = 0; m < mentions.size(); ++m) {
                const std::string mw = sw + ".mentions[" + std::to_string(m) + "]";
                const json& mj = mentions[m];
                LinkedMention lm;
                lm.mention.id = str(mj, "id", mw);
                lm.mention.sentence_id = ls.sentence.id;
                lm.mention.text = str(mj, "text", mw);
                lm.mention.span = span_from(field(mj, "span", mw), mw + ".span");
                lm.mention.type = enum_from<MentionType>(mj, "type", mw, parse_mention_type);
                lm.mention.source = mj.contains("source")
                                        ? enum_from<MentionSource>(mj, "source", mw, parse_mention_source)
                                        : MentionSource::Deterministic;
                lm.alignment.mention_id = lm.mention.id;
                lm.alignment.mechanism = enum_from<Mechanism>(mj, "mechanism", mw, parse_mechanism);
                lm.alignment.rank = mj.contains("rank") ? static_cast<int>(integer(mj, "rank", mw)) : 1;
                lm.alignment.evidence =
                    mj.contains("evidence") ? evidence_from(mj["evidence"], mw + ".evidence") : Evidence{};
                lm.alignment.target = target_from(field(mj, "target", mw), mw + ".target");
                lm.boxes = boxes_from(field(mj, "boxes", mw), mw + ".boxes");
                ls.mentions.push_back(std::move(lm));
            }
            lp.sentences.push_back(std::move(ls));
        }
        s.pairs.push_back(std::move(lp));
    }
    if (root.contains("warnings")) {
        for (const json& w : array(root, "warnings", "schema"))
            s.warnings.push_back({str(w, "code", "warning"), str(w, "detail", "warning")});
    }
    return s;
}

void validate_schema(const LinkingSchema& schema, const ParsedDocument& doc) {
    if (schema.doc_id != doc.doc_id) {
        throw SchemaError("schema is for '" + schema.doc_id + "', document is '" + doc.doc_id + "'");
    }
    const auto paragraphs = merge_text_chunks(doc.paragraphs);
    for (const LinkedPair& lp : schema.pairs) {
        const auto para = std::find_if(paragraphs.begin(), paragraphs.end(),
                                       [&](const Paragraph& p) { return p.id == lp.pair.paragraph_id; });
        if (para == paragraphs.end()) throw SchemaError("unknown paragraph '" + lp.pair.paragraph_id + "'");
        const Table* table = doc.find_table(lp.pair.table_id);
        if (!table) throw SchemaError("unknown table '" + lp.pair.table_id + "'");
        for (Span r : lp.pair.reference_spans)
            if (r.end > para->text.size()) throw SchemaError("reference span outside " + para->id);

        for (const LinkedSentence& ls : lp.sentences) {
            const Sentence& s = ls.sentence;
            if (s.span.end > para->text.size() || slice(para->text, s.span) != s.text) {
                throw SchemaError("sentence '" + s.id + "' does not match its paragraph text");
            }
            for (const HighlightRegion& r : ls.regions) {
                if (!is_valid_target(r.target, *table)) throw SchemaError("region of '" + s.id + "' misses the table");
            }
            for (const LinkedMention& lm : ls.mentions) {
                const Mention& m = lm.mention;
                if (m.span.end > s.text.size() || slice(s.text, m.span) != m.text) {
                    throw SchemaError("mention '" + m.id + "' does not match its sentence text");
                }
                if (!is_valid_target(lm.alignment.target, *table)) {
                    throw SchemaError("mention '" + m.id + "' targets cells outside " + table->id);
                }
            }
        }
    }
}

}  // namespace tablink
