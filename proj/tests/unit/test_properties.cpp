// Randomized invariants. Each case runs kCases generated inputs from a
// fixed seed so failures reproduce.
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "support.hpp"
#include "tablink/evaluation.hpp"
#include "tablink/scope.hpp"
#include "tablink/service.hpp"

using namespace tablink;

namespace {

constexpr int kCases = 1000;

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

const std::vector<std::string> kNames = {"Baseline", "MLP",  "Transformer", "GPT-2",    "LLaMA", "BERT base",
                                         "ResNet",   "T5",   "Codex SQL",   "ViT large", "RoBERTa", "XLNet"};
const std::vector<std::string> kHeaders = {"Accuracy", "BLEU", "F1", "Recall", "Precision", "NAT", "SOC", "AVG",
                                           "Latency",  "Size"};
const std::vector<std::string> kFiller = {"the", "model", "results", "clearly", "we", "observe", "that", "on",
                                          "average", "while", "and", "also", "e.g.", "Fig.", "i.e.", "vs."};
const std::vector<std::string> kCues = {"improves by", "outperforms", "gain of", "drop of", "higher", "lower"};
const std::vector<std::string> kOrdinals = {"the first row", "the second row", "the last column", "the third column",
                                            "the last two rows", "row 2"};

std::string number_text(Rng& rng) {
    const double v = uniform_real(rng, 0.5, 99.5);
    switch (uniform(rng, 0, 3)) {
        case 0: return fmt::format("{:.1f}", v);
        case 1: return fmt::format("{:.2f}", v);
        case 2: return fmt::format("{:.1f}%", v);
        default: return fmt::format("{}", static_cast<int>(v));
    }
}

struct RandomTable {
    std::vector<std::vector<std::string>> grid;
};

RandomTable random_table(Rng& rng) {
    RandomTable t;
    const int rows = uniform(rng, 2, 8);
    const int cols = uniform(rng, 2, 5);
    std::vector<std::string> header = {"Method"};
    auto heads = kHeaders;
    std::shuffle(heads.begin(), heads.end(), rng);
    for (int c = 1; c < cols; ++c) header.push_back(heads[static_cast<std::size_t>(c - 1)]);
    t.grid.push_back(header);
    auto names = kNames;
    std::shuffle(names.begin(), names.end(), rng);
    for (int r = 1; r <= rows; ++r) {
        std::vector<std::string> row = {names[static_cast<std::size_t>(r - 1)]};
        for (int c = 1; c < cols; ++c) row.push_back(number_text(rng));
        t.grid.push_back(row);
    }
    return t;
}

std::string html_of(const RandomTable& t) {
    std::string out = "<table>";
    for (std::size_t r = 0; r < t.grid.size(); ++r) {
        out += "<tr>";
        for (const auto& cell : t.grid[r]) out += (r == 0 ? "<th>" : "<td>") + cell + (r == 0 ? "</th>" : "</td>");
        out += "</tr>";
    }
    return out + "</table>";
}

std::string random_sentence(Rng& rng, const RandomTable& t) {
    std::vector<std::string> words;
    const int n = uniform(rng, 3, 12);
    for (int i = 0; i < n; ++i) {
        const auto& row = t.grid[static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(t.grid.size()) - 1))];
        switch (uniform(rng, 0, 6)) {
            case 0: words.push_back(row[0]); break;
            case 1: words.push_back(pick(rng, t.grid[0])); break;
            case 2: words.push_back(row[static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(row.size()) - 1))]); break;
            case 3: words.push_back(pick(rng, kCues) + " " + number_text(rng)); break;
            case 4: words.push_back(pick(rng, kOrdinals)); break;
            default: words.push_back(pick(rng, kFiller)); break;
        }
        if (uniform(rng, 0, 5) == 0) words.back() += ",";
    }
    std::string s = "In contrast " + words[0];
    for (std::size_t i = 1; i < words.size(); ++i) s += " " + words[i];
    return s + (uniform(rng, 0, 4) == 0 ? "!" : ".");
}

std::string random_paragraph(Rng& rng, const RandomTable& t) {
    std::string text = "Table 1 shows the results.";
    const int n = uniform(rng, 1, 4);
    for (int i = 0; i < n; ++i) text += std::string(uniform(rng, 1, 2), ' ') + random_sentence(rng, t);
    return text;
}

std::string random_bundle(Rng& rng, const std::string& doc_id) {
    const RandomTable t = random_table(rng);
    const int rows = static_cast<int>(t.grid.size());
    nlohmann::json b;
    b["doc_id"] = doc_id;
    b["pages"] = {{{"index", 0}, {"width", 612}, {"height", 792}}};
    b["paragraphs"] = {{{"id", "p1"}, {"page", 0}, {"box", {72, 90, 468, 60}}, {"text", random_paragraph(rng, t)}}};
    b["tables"] = {{{"id", "t1"},
                    {"number", 1},
                    {"page", 0},
                    {"box", {72, 200, 468, 18 * rows}},
                    {"html", html_of(t)}}};
    return b.dump();
}

Sentence sentence_of(const std::string& text) { return Sentence{"s1", "p1", Span{0, text.size()}, text}; }

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Random partition of a rows x cols grid into rectangles, as (row, col,
// row_span, col_span) in row-major anchor order.
using Rect = std::tuple<int, int, int, int>;

std::vector<Rect> random_partition(Rng& rng, int rows, int cols) {
    std::vector<std::vector<bool>> used(static_cast<std::size_t>(rows), std::vector<bool>(static_cast<std::size_t>(cols)));
    std::vector<Rect> out;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (used[r][c]) continue;
            int cs = 1;
            const int want_cs = uniform(rng, 0, 3) == 0 ? uniform(rng, 2, 3) : 1;
            while (cs < want_cs && c + cs < cols && !used[r][c + cs]) ++cs;
            const int rs = std::min(uniform(rng, 0, 3) == 0 ? uniform(rng, 2, 3) : 1, rows - r);
            for (int i = r; i < r + rs; ++i)
                for (int j = c; j < c + cs; ++j) used[i][j] = true;
            out.emplace_back(r, c, rs, cs);
        }
    }
    return out;
}

std::string partition_html(const std::vector<Rect>& rects, int rows, Rng& rng) {
    std::string out = "<table>";
    for (int r = 0; r < rows; ++r) {
        out += "<tr>";
        for (const auto& [rr, c, rs, cs] : rects) {
            if (rr != r) continue;
            out += "<td";
            if (rs > 1) out += fmt::format(" rowspan=\"{}\"", rs);
            if (cs > 1) out += fmt::format(" colspan=\"{}\"", cs);
            out += ">" + (uniform(rng, 0, 1) ? number_text(rng) : pick(rng, kNames)) + "</td>";
        }
        out += "</tr>";
    }
    return out + "</table>";
}

Table table_from_grid(TableGrid grid) {
    Table t;
    t.id = "t1";
    t.number = 1;
    t.n_rows = grid.n_rows;
    t.n_cols = grid.n_cols;
    t.header_rows = std::min(1, t.n_rows - 1);
    t.box = Box{0, 0, 40.0 * t.n_cols, 20.0 * t.n_rows};
    t.cells = std::move(grid.cells);
    for (Cell& c : t.cells) c.numeric = try_parse_quantity(c.text);
    layout_missing_cell_boxes(t, grid.explicit_box);
    t.index();
    return t;
}

AlignmentTarget random_target(Rng& rng, const Table& t) {
    switch (uniform(rng, 0, 3)) {
        case 0: return AlignmentTarget::whole_row(uniform(rng, 0, t.n_rows - 1));
        case 1: return AlignmentTarget::whole_column(uniform(rng, 0, t.n_cols - 1));
        case 2: {
            const int r0 = uniform(rng, 0, t.n_rows - 1), r1 = uniform(rng, r0, t.n_rows - 1);
            const int c0 = uniform(rng, 0, t.n_cols - 1), c1 = uniform(rng, c0, t.n_cols - 1);
            return AlignmentTarget::region(CellRect{r0, r1, c0, c1});
        }
        default: {
            std::set<std::string> ids;
            const int n = uniform(rng, 1, 3);
            for (int i = 0; i < n; ++i) ids.insert(pick(rng, t.cells).id);
            return AlignmentTarget::cell_set({ids.begin(), ids.end()}, t);
        }
    }
}

std::set<std::size_t> coverage(std::span<const AlignmentTarget> targets, const Table& t) {
    std::set<std::size_t> out;
    for (const auto& target : targets)
        for (std::size_t i : covered_cells(target, t)) out.insert(i);
    return out;
}

}  // namespace

TEST_CASE("sentences partition the paragraph") {
    Rng rng(11);
    for (int i = 0; i < kCases; ++i) {
        const auto t = random_table(rng);
        Paragraph p;
        p.id = "p1";
        p.text = (uniform(rng, 0, 3) == 0 ? "  " : "") + random_paragraph(rng, t) + (uniform(rng, 0, 3) == 0 ? " " : "");
        const auto sentences = segment_sentences(p);
        REQUIRE_FALSE(sentences.empty());
        std::size_t pos = 0;
        for (const auto& s : sentences) {
            REQUIRE(s.span.start >= pos);
            for (std::size_t k = pos; k < s.span.start; ++k) REQUIRE(is_ws(p.text[k]));
            REQUIRE_FALSE(s.span.empty());
            REQUIRE(s.text == std::string(slice(p.text, s.span)));
            REQUIRE(s.paragraph_id == "p1");
            pos = s.span.end;
        }
        for (std::size_t k = pos; k < p.text.size(); ++k) REQUIRE(is_ws(p.text[k]));
    }
}

TEST_CASE("detected mentions are substrings of their sentence") {
    Rng rng(12);
    for (int i = 0; i < kCases; ++i) {
        const auto rt = random_table(rng);
        const Table table = testing::make_table(rt.grid);
        const auto sentence = sentence_of(random_sentence(rng, rt));
        const auto mentions = detect_mentions_deterministic(sentence, table);
        Span last{0, 0};
        for (const auto& m : mentions) {
            REQUIRE(m.span.end <= sentence.text.size());
            REQUIRE_FALSE(m.span.empty());
            REQUIRE(m.text == std::string(slice(sentence.text, m.span)));
            REQUIRE(last <= m.span);
            last = m.span;
        }
    }
}

TEST_CASE("table layout covers every slot exactly once") {
    Rng rng(13);
    for (int i = 0; i < kCases; ++i) {
        const int rows = uniform(rng, 1, 9), cols = uniform(rng, 1, 9);
        const auto rects = random_partition(rng, rows, cols);
        const auto grid = parse_table_grid(partition_html(rects, rows, rng));
        REQUIRE(grid.n_rows == rows);
        REQUIRE(grid.n_cols == cols);
        std::vector<Rect> got;
        std::vector<int> hits(static_cast<std::size_t>(rows * cols), 0);
        for (const Cell& c : grid.cells) {
            got.emplace_back(c.row, c.col, c.row_span, c.col_span);
            REQUIRE(c.id == format_cell_id(c.row, c.col));
            for (int r = c.row; r <= c.last_row(); ++r)
                for (int k = c.col; k <= c.last_col(); ++k) ++hits[static_cast<std::size_t>(r * cols + k)];
        }
        REQUIRE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        REQUIRE(got == rects);
        REQUIRE_NOTHROW(table_from_grid(grid));
    }
}

TEST_CASE("normalized boxes stay on the page and round-trip") {
    Rng rng(14);
    for (int i = 0; i < kCases; ++i) {
        const PageInfo page{uniform(rng, 0, 3), uniform_real(rng, 100, 2000), uniform_real(rng, 100, 2000)};
        const bool inside = uniform(rng, 0, 1);
        Box box;
        if (inside) {
            box.x = uniform_real(rng, 0, page.width);
            box.y = uniform_real(rng, 0, page.height);
            box.w = uniform_real(rng, 0, page.width - box.x);
            box.h = uniform_real(rng, 0, page.height - box.y);
        } else {
            box = Box{uniform_real(rng, -200, page.width), uniform_real(rng, -200, page.height),
                      uniform_real(rng, 0, 2 * page.width), uniform_real(rng, 0, 2 * page.height)};
        }
        Warnings warnings;
        const NormalizedBox n = normalize_box(box, page, &warnings);
        REQUIRE(n.page == page.index);
        REQUIRE(n.x >= 0.0);
        REQUIRE(n.y >= 0.0);
        REQUIRE(n.w >= 0.0);
        REQUIRE(n.h >= 0.0);
        REQUIRE(n.x + n.w <= 1.0);
        REQUIRE(n.y + n.h <= 1.0);
        if (inside) {
            const Box back = denormalize_box(n, page);
            REQUIRE(std::abs(back.x - box.x) <= 1e-9 * page.width);
            REQUIRE(std::abs(back.y - box.y) <= 1e-9 * page.height);
            REQUIRE(std::abs(back.w - box.w) <= 1e-9 * page.width);
            REQUIRE(std::abs(back.h - box.h) <= 1e-9 * page.height);
        } else if (!box_within_page(box, page)) {
            REQUIRE(warnings.size() == 1);
            REQUIRE(warnings[0].code == "box-clamped");
        }
    }
}

TEST_CASE("merging keeps coverage, never adds regions, and is idempotent") {
    Rng rng(15);
    for (int i = 0; i < kCases; ++i) {
        const int rows = uniform(rng, 2, 9), cols = uniform(rng, 1, 7);
        const Table table = table_from_grid(parse_table_grid(partition_html(random_partition(rng, rows, cols), rows, rng)));
        std::vector<AlignmentTarget> targets;
        const int n = uniform(rng, 1, 6);
        for (int k = 0; k < n; ++k) targets.push_back(random_target(rng, table));
        ScopeSettings settings;
        settings.promotion_threshold = pick(rng, std::vector<double>{0.3, 0.5, 0.75, 1.0});

        const auto merged = merge_targets(targets, table, settings);
        REQUIRE_FALSE(merged.empty());
        REQUIRE(merged.size() <= targets.size());
        for (const auto& m : merged) REQUIRE(is_valid_target(m, table));
        const auto before = coverage(targets, table);
        const auto after = coverage(merged, table);
        REQUIRE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
        REQUIRE(merge_targets(merged, table, settings) == merged);
    }
}

TEST_CASE("schemas survive encode and decode byte for byte") {
    Rng rng(16);
    for (int i = 0; i < kCases; ++i) {
        const auto doc = ingest_document(random_bundle(rng, fmt::format("rand-{}", i)));
        const auto schema = build_schema(doc, PipelineOptions{});
        REQUIRE_NOTHROW(validate_schema(schema, doc));
        const std::string bytes = encode_schema(schema);
        const auto decoded = decode_schema(bytes);
        REQUIRE(encode_schema(decoded) == bytes);
        REQUIRE_NOTHROW(validate_schema(decoded, doc));
        for (const auto& pair : decoded.pairs)
            for (const auto& s : pair.sentences)
                for (const auto& m : s.mentions) REQUIRE(m.mention.text == std::string(slice(s.sentence.text, m.mention.span)));
    }
}

TEST_CASE("the service answers repeated submissions with identical bytes") {
    Rng rng(17);
    const auto dir = std::filesystem::temp_directory_path() / fmt::format("tablink-prop-{}", std::random_device{}());
    {
        SchemaService svc(dir, PipelineOptions{}, nullptr, 4);
        std::vector<std::pair<std::string, std::string>> docs;
        for (int i = 0; i < kCases; ++i) {
            const std::string id = fmt::format("doc-{}", i);
            const std::string bundle = random_bundle(rng, id);
            svc.submit(bundle);
            docs.emplace_back(id, bundle);
        }
        svc.wait_idle();
        for (const auto& [id, bundle] : docs) {
            const auto first = svc.fetch_schema(id);
            REQUIRE(first.status == 200);
            const auto again = svc.submit(bundle);
            REQUIRE(again.state == JobState::Done);
            const auto second = svc.fetch_schema(id);
            REQUIRE(second.body == first.body);
            REQUIRE(first.body == encode_schema(build_schema(ingest_document(bundle), PipelineOptions{})));
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("span IoU is symmetric and bounded") {
    Rng rng(18);
    for (int i = 0; i < kCases; ++i) {
        const auto a0 = static_cast<std::size_t>(uniform(rng, 0, 50));
        const auto b0 = static_cast<std::size_t>(uniform(rng, 0, 50));
        const Span a{a0, a0 + static_cast<std::size_t>(uniform(rng, 0, 20))};
        const Span b{b0, b0 + static_cast<std::size_t>(uniform(rng, 0, 20))};
        const double x = span_iou(a, b);
        REQUIRE(x == span_iou(b, a));
        REQUIRE(x >= 0.0);
        REQUIRE(x <= 1.0);
        if (!a.empty()) REQUIRE(span_iou(a, a) == 1.0);
        if (!a.overlaps(b)) REQUIRE(x == 0.0);
    }
}

TEST_CASE("greedy matching is one-to-one and respects the threshold") {
    Rng rng(19);
    for (int i = 0; i < kCases; ++i) {
        auto random_items = [&](int n) {
            std::vector<SpanItem> out;
            for (int k = 0; k < n; ++k) {
                const auto s = static_cast<std::size_t>(uniform(rng, 0, 40));
                out.push_back({uniform(rng, 0, 1) ? "a" : "b", Span{s, s + static_cast<std::size_t>(uniform(rng, 1, 10))}});
            }
            return out;
        };
        const auto pred = random_items(uniform(rng, 0, 8));
        const auto gold = random_items(uniform(rng, 0, 8));
        const double threshold = uniform_real(rng, 0.1, 1.0);
        const auto m = match_spans(pred, gold, threshold);
        std::set<std::size_t> ps, gs;
        for (auto [p, g] : m) {
            REQUIRE(ps.insert(p).second);
            REQUIRE(gs.insert(g).second);
            REQUIRE(pred[p].group == gold[g].group);
            REQUIRE(span_iou(pred[p].span, gold[g].span) >= threshold);
        }
        const auto s = score_detection(pred, gold, threshold);
        REQUIRE(s.true_positives == m.size());
        REQUIRE(s.precision >= 0.0);
        REQUIRE(s.precision <= 1.0);
        REQUIRE(s.recall >= 0.0);
        REQUIRE(s.recall <= 1.0);
        REQUIRE(s.f1 <= std::max(s.precision, s.recall) + 1e-12);
    }
}

TEST_CASE("bucket accuracies recompose the overall accuracy") {
    Rng rng(20);
    for (int i = 0; i < kCases; ++i) {
        std::vector<Table> tables;
        const int n_tables = uniform(rng, 1, 3);
        for (int k = 0; k < n_tables; ++k) {
            const int rows = uniform(rng, 2, 12), cols = uniform(rng, 2, 12);
            std::vector<std::vector<std::string>> grid(static_cast<std::size_t>(rows),
                                                       std::vector<std::string>(static_cast<std::size_t>(cols), "1"));
            tables.push_back(testing::make_table(grid, 1, fmt::format("t{}", k)));
        }
        std::vector<ResolutionItem> gold, pred;
        const int n = uniform(rng, 0, 10);
        for (int k = 0; k < n; ++k) {
            const Table& t = pick(rng, tables);
            const auto target = random_target(rng, t);
            gold.push_back({fmt::format("m{}", k), t.id, target});
            const int what = uniform(rng, 0, 3);
            if (what == 0) continue;
            pred.push_back({fmt::format("m{}", k), t.id, what == 1 ? target : random_target(rng, t)});
        }
        if (uniform(rng, 0, 2) == 0) pred.push_back({"extra", tables[0].id, random_target(rng, tables[0])});
        const auto s = score_resolution(pred, gold, tables);
        std::size_t c = 0, total = 0;
        for (const auto& b : s.buckets) {
            c += b.correct;
            total += b.total;
            REQUIRE(b.correct <= b.total);
        }
        REQUIRE(c == s.overall.correct);
        REQUIRE(total == s.overall.total);
        REQUIRE(total == gold.size() + s.unmatched_predictions);
    }
}
