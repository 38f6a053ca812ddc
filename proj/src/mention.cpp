#include "tablink/mention.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include <json.hpp>

#include "tablink/pairing.hpp"

namespace tablink {

using nlohmann::json;

std::string_view to_string(MentionType type) {
    switch (type) {
        case MentionType::NamedEntity: return "NamedEntity";
        case MentionType::ReferentialEntity: return "ReferentialEntity";
        case MentionType::InferredEntity: return "InferredEntity";
        case MentionType::RawValue: return "RawValue";
        case MentionType::DerivedValue: return "DerivedValue";
        case MentionType::Structural: return "Structural";
    }
    return "NamedEntity";
}

std::string_view to_string(MentionSource source) {
    return source == MentionSource::Remote ? "remote" : "deterministic";
}

std::optional<MentionType> parse_mention_type(std::string_view name) {
    std::string key;
    for (char c : to_lower_ascii(name))
        if (c != '_' && c != ' ' && c != '-') key.push_back(c);
    static const std::map<std::string, MentionType, std::less<>> kNames = {
        {"namedentity", MentionType::NamedEntity},     {"referentialentity", MentionType::ReferentialEntity},
        {"inferredentity", MentionType::InferredEntity}, {"rawvalue", MentionType::RawValue},
        {"derivedvalue", MentionType::DerivedValue},   {"structural", MentionType::Structural},
        {"structuralmention", MentionType::Structural}};
    auto it = kNames.find(key);
    if (it == kNames.end()) return std::nullopt;
    return it->second;
}

std::optional<MentionSource> parse_mention_source(std::string_view name) {
    if (name == "deterministic") return MentionSource::Deterministic;
    if (name == "remote") return MentionSource::Remote;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ordinal grammar
// ---------------------------------------------------------------------------

namespace {

struct OrdinalWord {
    std::string_view word;
    bool from_end;
    int index;
    int axis_only;  // -1 any, 0 rows only, 1 columns only
};

constexpr OrdinalWord kOrdinals[] = {
    {"first", false, 0, -1},   {"second", false, 1, -1}, {"third", false, 2, -1},   {"fourth", false, 3, -1},
    {"fifth", false, 4, -1},   {"sixth", false, 5, -1},  {"seventh", false, 6, -1}, {"eighth", false, 7, -1},
    {"ninth", false, 8, -1},   {"tenth", false, 9, -1},  {"last", true, 0, -1},     {"final", true, 0, -1},
    {"penultimate", true, 1, -1}, {"second-to-last", true, 1, -1}, {"second-last", true, 1, -1},
    {"top", false, 0, 0},      {"bottom", true, 0, 0},   {"leftmost", false, 0, 1}, {"rightmost", true, 0, 1},
};

constexpr std::string_view kCounts[] = {"two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

std::optional<int> small_number(std::string_view tok) {
    for (std::size_t i = 0; i < std::size(kCounts); ++i)
        if (tok == kCounts[i]) return static_cast<int>(i) + 2;
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec == std::errc() && res.ptr == tok.data() + tok.size() && v >= 1 && v <= 999) return v;
    return std::nullopt;
}

std::optional<Axis> axis_word(std::string_view tok) {
    if (tok == "row" || tok == "rows") return Axis::Row;
    if (tok == "column" || tok == "columns" || tok == "col" || tok == "cols") return Axis::Column;
    return std::nullopt;
}

bool is_singular_axis(std::string_view tok) { return tok == "row" || tok == "column" || tok == "col"; }

// Matches the grammar at toks[i]; returns the number of tokens consumed.
std::optional<std::pair<std::size_t, OrdinalPhrase>> match_ordinal(const std::vector<std::string>& toks,
                                                                   std::size_t i) {
    std::size_t j = i;
    if (j < toks.size() && toks[j] == "the") ++j;
    if (j >= toks.size()) return std::nullopt;

    for (const OrdinalWord& ow : kOrdinals) {
        if (toks[j] != ow.word) continue;
        std::size_t k = j + 1;
        OrdinalPhrase phrase;
        phrase.from_end = ow.from_end;
        phrase.index = ow.index;
        if (k < toks.size()) {
            if (auto n = small_number(toks[k]); n && k + 1 < toks.size() && axis_word(toks[k + 1])) {
                phrase.count = *n;
                ++k;
            }
        }
        if (k >= toks.size()) return std::nullopt;
        auto axis = axis_word(toks[k]);
        if (!axis) return std::nullopt;
        if (ow.axis_only == 0 && *axis != Axis::Row) return std::nullopt;
        if (ow.axis_only == 1 && *axis != Axis::Column) return std::nullopt;
        phrase.axis = *axis;
        return std::pair{k + 1 - i, phrase};
    }

    if (is_singular_axis(toks[j]) && j + 1 < toks.size()) {
        if (auto n = small_number(toks[j + 1]); n && std::all_of(toks[j + 1].begin(), toks[j + 1].end(), [](char c) {
                                                    return c >= '0' && c <= '9';
                                                })) {
            OrdinalPhrase phrase;
            phrase.axis = *axis_word(toks[j]);
            phrase.index = *n - 1;
            return std::pair{j + 2 - i, phrase};
        }
    }
    return std::nullopt;
}

std::vector<std::string> lower_tokens(const std::vector<Token>& toks) {
    std::vector<std::string> out;
    out.reserve(toks.size());
    for (const Token& t : toks) out.push_back(to_lower_ascii(t.text));
    return out;
}

}  // namespace

std::optional<OrdinalPhrase> parse_ordinal_phrase(std::string_view phrase) {
    const auto toks = lower_tokens(tokenize_words(phrase));
    if (toks.empty()) return std::nullopt;
    auto m = match_ordinal(toks, 0);
    if (!m || m->first != toks.size()) return std::nullopt;
    return m->second;
}

// ---------------------------------------------------------------------------
// Deterministic detection
// ---------------------------------------------------------------------------

namespace {

struct VocabEntry {
    std::vector<std::string> tokens;
    std::vector<std::string> sorted;
};

std::string strip_parentheticals(std::string_view s) {
    std::string out;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        else if (c == ')' && depth > 0) --depth;
        else if (depth == 0) out.push_back(c);
    }
    return collapse_whitespace(out);
}

std::vector<VocabEntry> entity_vocabulary(const Table& table) {
    std::vector<VocabEntry> out;
    auto add = [&](std::string_view text) {
        VocabEntry e;
        e.tokens = normalize_tokens(text);
        if (e.tokens.empty()) return;
        e.sorted = e.tokens;
        std::sort(e.sorted.begin(), e.sorted.end());
        e.sorted.erase(std::unique(e.sorted.begin(), e.sorted.end()), e.sorted.end());
        out.push_back(std::move(e));
    };
    for (const Cell& c : table.cells) {
        if (c.text.empty() || c.numeric) continue;
        const bool label = table.is_header_cell(c) || c.col == table.stub_column() || c.col_span > 1;
        if (!label) continue;
        add(c.text);
        const std::string bare = strip_parentheticals(c.text);
        if (!bare.empty() && bare != c.text) add(bare);
    }
    return out;
}

bool matches_vocab(const std::vector<std::string>& window, const std::vector<VocabEntry>& vocab) {
    std::vector<std::string> sorted = window;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const VocabEntry& e : vocab) {
        if (e.tokens == window || e.sorted == sorted) return true;
    }
    return false;
}

bool has_sign(std::string_view tok) {
    return !tok.empty() && (tok.front() == '+' || tok.front() == '-' || tok.substr(0, 3) == "\xE2\x88\x92");
}

const std::set<std::string, std::less<>>& reference_keywords() {
    static const std::set<std::string, std::less<>> kWords = {
        "table", "tables", "tab",  "tabs",     "fig",  "figs",     "figure", "figures", "eq",   "eqs",
        "equation", "equations", "section", "sections", "sec", "appendix", "§",      "row",     "rows", "column",
        "columns",  "col",       "cols",    "line",     "step", "chapter", "version", "algorithm"};
    return kWords;
}

}  // namespace

std::vector<Mention> detect_mentions_deterministic(const Sentence& sentence, const Table& table,
                                                   const DetectionSettings& settings) {
    const std::string_view text = sentence.text;
    const auto toks = tokenize_words(text);
    const auto lower = lower_tokens(toks);
    std::vector<bool> used(toks.size(), false);
    std::vector<Mention> out;

    auto emit = [&](std::size_t first, std::size_t last, MentionType type) {
        Mention m;
        m.sentence_id = sentence.id;
        m.span = Span{toks[first].span.start, toks[last].span.end};
        m.text = std::string(slice(text, m.span));
        m.type = type;
        m.source = MentionSource::Deterministic;
        out.push_back(std::move(m));
        for (std::size_t k = first; k <= last; ++k) used[k] = true;
    };

    // Structural phrases.
    for (std::size_t i = 0; i < toks.size();) {
        if (auto m = match_ordinal(lower, i)) {
            emit(i, i + m->first - 1, MentionType::Structural);
            i += m->first;
        } else {
            ++i;
        }
    }

    // Numbers that belong to citations are not values.
    std::vector<bool> citation(toks.size(), false);
    for (const TableReference& ref : find_table_references(text)) {
        for (std::size_t k = 0; k < toks.size(); ++k)
            if (ref.span.contains(toks[k].span)) citation[k] = true;
    }
    for (std::size_t k = 1; k < toks.size(); ++k) {
        if (reference_keywords().count(lower[k - 1])) citation[k] = true;
    }

    // Named entities: longest windows first, then leftmost.
    const auto vocab = entity_vocabulary(table);
    if (!vocab.empty()) {
        std::vector<std::vector<std::string>> norm(toks.size());
        for (std::size_t k = 0; k < toks.size(); ++k) norm[k] = normalize_tokens(toks[k].text);
        const std::size_t max_n = std::min(settings.max_ngram, toks.size());
        for (std::size_t n = max_n; n >= 1; --n) {
            for (std::size_t i = 0; i + n <= toks.size(); ++i) {
                bool free = true;
                std::vector<std::string> window;
                for (std::size_t k = i; k < i + n; ++k) {
                    if (used[k]) {
                        free = false;
                        break;
                    }
                    window.insert(window.end(), norm[k].begin(), norm[k].end());
                }
                if (!free || window.empty()) continue;
                if (n == 1 && try_parse_quantity(toks[i].text)) continue;
                if (matches_vocab(window, vocab)) emit(i, i + n - 1, MentionType::NamedEntity);
            }
        }
    }

    // Cue phrase occurrences as token index ranges.
    std::vector<std::pair<std::size_t, std::size_t>> cues;
    for (const std::string& phrase : settings.cue_phrases) {
        const auto cue = lower_tokens(tokenize_words(phrase));
        if (cue.empty()) continue;
        for (std::size_t i = 0; i + cue.size() <= lower.size(); ++i) {
            if (std::equal(cue.begin(), cue.end(), lower.begin() + static_cast<std::ptrdiff_t>(i))) {
                cues.emplace_back(i, i + cue.size() - 1);
            }
        }
    }
    auto near_cue = [&](std::size_t k) {
        for (const auto& [cs, ce] : cues) {
            if (k >= cs && k <= ce) continue;
            const std::size_t gap = k > ce ? k - ce - 1 : cs - k - 1;
            if (gap <= settings.derived_window) return true;
        }
        return false;
    };

    for (std::size_t k = 0; k < toks.size(); ++k) {
        if (used[k] || citation[k]) continue;
        if (!try_parse_quantity(toks[k].text)) continue;
        const bool derived = has_sign(toks[k].text) || near_cue(k);
        emit(k, k, derived ? MentionType::DerivedValue : MentionType::RawValue);
    }

    std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
        return std::tuple(a.span, static_cast<int>(a.type)) < std::tuple(b.span, static_cast<int>(b.type));
    });
    return out;
}

std::vector<Mention> detect_mentions_deterministic(const Sentence& sentence, const Table& table) {
    static const PipelineOptions defaults;
    return detect_mentions_deterministic(sentence, table, defaults.detection);
}

// ---------------------------------------------------------------------------
// Validation and remote detection
// ---------------------------------------------------------------------------

std::vector<Mention> validate_mention_spans(const Sentence& sentence, std::span<const MentionCandidate> candidates,
                                            MentionSource source) {
    const std::string_view text = sentence.text;
    std::vector<Mention> out;
    for (const MentionCandidate& c : candidates) {
        if (c.text.empty()) continue;
        Span span;
        if (c.span) {
            if (c.span->end > text.size() || c.span->start > c.span->end) continue;
            if (slice(text, *c.span) != c.text) continue;
            span = *c.span;
        } else {
            const std::size_t first = text.find(c.text);
            if (first == std::string_view::npos || text.find(c.text, first + 1) != std::string_view::npos) continue;
            span = Span{first, first + c.text.size()};
        }
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Mention& m) {
            return m.span == span && m.type == c.type;
        });
        if (duplicate) continue;
        Mention m;
        m.sentence_id = sentence.id;
        m.text = c.text;
        m.span = span;
        m.type = c.type;
        m.source = source;
        out.push_back(std::move(m));
    }
    return out;
}

std::string detection_request_json(const Sentence& sentence, const Table& table, std::string_view paragraph_context) {
    json j;
    j["task"] = "detect";
    j["instruction_id"] = "detect-v1";
    j["sentence"] = sentence.text;
    j["table_context"] = json::parse(table_context_json(table));
    j["paragraph_included"] = !paragraph_context.empty();
    if (!paragraph_context.empty()) j["paragraph"] = std::string(paragraph_context);
    return j.dump();
}

std::vector<MentionCandidate> parse_detection_response(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("detection response is not JSON: ") + e.what(), body);
    }
    if (!j.is_object() || !j.contains("mentions") || !j["mentions"].is_array()) {
        throw ProtocolError("detection response lacks a 'mentions' array", body);
    }
    std::vector<MentionCandidate> out;
    for (const json& m : j["mentions"]) {
        if (!m.is_object() || !m.contains("text") || !m["text"].is_string() || !m.contains("type") ||
            !m["type"].is_string()) {
            throw ProtocolError("mention entry needs string 'text' and 'type'", body);
        }
        auto type = parse_mention_type(m["type"].get<std::string>());
        if (!type) continue;
        MentionCandidate c;
        c.text = m["text"].get<std::string>();
        c.type = *type;
        const bool has_start = m.contains("start") && !m["start"].is_null();
        const bool has_end = m.contains("end") && !m["end"].is_null();
        if (has_start && has_end) {
            if (!m["start"].is_number_integer() || !m["end"].is_number_integer()) {
                throw ProtocolError("mention 'start'/'end' must be integers", body);
            }
            const auto s = m["start"].get<long long>();
            const auto e = m["end"].get<long long>();
            if (s < 0 || e < s) continue;
            c.span = Span{static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Mention> detect_mentions_remote(const Sentence& sentence, const Table& table, InferenceClient& client,
                                            const RemoteSettings& settings, std::string_view paragraph_context) {
    const std::string request =
        detection_request_json(sentence, table, settings.send_paragraph ? paragraph_context : std::string_view{});
    const std::string body = exchange_with_retry(client, request, settings.max_attempts);
    const auto candidates = parse_detection_response(body);
    return validate_mention_spans(sentence, candidates, MentionSource::Remote);
}

std::vector<Mention> combine_mentions(std::vector<Mention> deterministic, std::vector<Mention> remote) {
    std::vector<Mention> out = std::move(deterministic);
    for (Mention& r : remote) {
        bool same_type_conflict = false;
        bool any_conflict = false;
        for (const Mention& d : out) {
            if (!d.span.overlaps(r.span)) continue;
            any_conflict = true;
            if (d.type == r.type) same_type_conflict = true;
        }
        if (same_type_conflict) continue;
        if (any_conflict) {
            std::erase_if(out, [&](const Mention& d) {
                return d.source == MentionSource::Deterministic && d.span.overlaps(r.span);
            });
        }
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
        return std::tuple(a.span, static_cast<int>(a.type)) < std::tuple(b.span, static_cast<int>(b.type));
    });
    return out;
}

void assign_mention_ids(std::vector<Mention>& mentions, std::string_view sentence_id, std::string_view table_id) {
    for (std::size_t k = 0; k < mentions.size(); ++k) {
        mentions[k].sentence_id = std::string(sentence_id);
        mentions[k].id = std::string(sentence_id) + "#" + std::string(table_id) + "#m" + std::to_string(k);
    }
}

}  // namespace tablink
