#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "tablink/document.hpp"
#include "tablink/geometry.hpp"

using namespace tablink;
using nlohmann::json;

namespace {

json minimal_bundle() {
    return json::parse(R"({
      "doc_id": "d",
      "pages": [{"index": 0, "width": 612, "height": 792}],
      "paragraphs": [{"id": "p0", "page": 0, "box": [72, 72, 400, 40], "text": "See Table 1."}],
      "tables": [{"id": "t1", "number": 1, "page": 0, "box": [72, 200, 300, 60],
                  "html": "<table><tr><th>A</th><th>B</th></tr><tr><td>1</td><td>2</td></tr></table>"}]
    })");
}

}  // namespace

TEST_CASE("grid layout with merged cells") {
    const auto g = parse_table_grid(
        "<table><tr><th rowspan=\"2\">Method</th><th colspan=\"2\">BLEU</th></tr>"
        "<tr><th>fr</th><th>de</th></tr><tr><td>X</td><td>1.0</td></tr></table>");
    CHECK(g.n_rows == 3);
    CHECK(g.n_cols == 3);
    REQUIRE(g.cells.size() == 7);  // short last row padded with one empty cell
    CHECK(g.cells[0].id == "r0c0");
    CHECK(g.cells[0].row_span == 2);
    CHECK(g.cells[1].col_span == 2);
    CHECK(g.cells[2].id == "r1c1");
    CHECK(g.cells.back().text.empty());
}

TEST_CASE("explicit cell boxes are kept") {
    const auto g = parse_table_grid("<table><tr><td data-box=\"1,2,3,4\">a</td><td>b</td></tr></table>");
    REQUIRE(g.cells.size() == 2);
    CHECK(g.explicit_box[0]);
    CHECK_FALSE(g.explicit_box[1]);
    CHECK(g.cells[0].box == Box{1, 2, 3, 4});
}

TEST_CASE("rowspan past the last row is a structure error") {
    CHECK_THROWS_AS(parse_table_grid("<table><tr><td rowspan=\"3\">a</td></tr><tr><td>b</td></tr></table>"),
                    StructureError);
}

TEST_CASE("cell ids") {
    CHECK(format_cell_id(3, 12) == "r3c12");
    CHECK(parse_cell_id("r3c12") == std::pair{3, 12});
    CHECK_FALSE(parse_cell_id("r3").has_value());
    CHECK_FALSE(parse_cell_id("x1c1").has_value());
}

TEST_CASE("complexity buckets at the boundaries") {
    CHECK(classify_area(48) == ComplexityBucket::Simple);
    CHECK(classify_area(49) == ComplexityBucket::Standard);
    CHECK(classify_area(90) == ComplexityBucket::Standard);
    CHECK(classify_area(91) == ComplexityBucket::Complex);
    CHECK(to_string(ComplexityBucket::Standard) == "standard");
}

TEST_CASE("ingest parses cells and hashes canonically") {
    const json b = minimal_bundle();
    const auto doc = ingest_document(b.dump());
    REQUIRE(doc.tables.size() == 1);
    const Table& t = doc.tables[0];
    CHECK(t.n_rows == 2);
    CHECK(t.header_rows == 1);
    REQUIRE(t.cell_at(1, 1));
    CHECK(t.cell_at(1, 1)->numeric->magnitude == 2.0);
    CHECK_FALSE(t.cell_at(0, 0)->numeric.has_value());
    // Uniform layout over the table box.
    CHECK(t.cell_at(1, 1)->box == Box{222, 230, 150, 30});
    CHECK(doc.content_hash.rfind("sha256:", 0) == 0);
    CHECK(ingest_document(b.dump(4)).content_hash == doc.content_hash);
}

TEST_CASE("ingest rejects bad bundles") {
    auto without = [](const char* key) {
        json b = minimal_bundle();
        b.erase(key);
        return b.dump();
    };
    CHECK_THROWS_AS(ingest_document(without("pages")), ValidationError);
    CHECK_THROWS_AS(ingest_document(without("doc_id")), ValidationError);
    CHECK_THROWS_AS(ingest_document("{not json"), ValidationError);

    json b = minimal_bundle();
    b["paragraphs"].push_back(b["paragraphs"][0]);
    CHECK_THROWS_AS(ingest_document(b.dump()), ValidationError);

    b = minimal_bundle();
    b["tables"][0]["box"] = {500, 700, 300, 300};
    CHECK_THROWS_AS(ingest_document(b.dump()), ValidationError);

    b = minimal_bundle();
    b["paragraphs"][0]["page"] = 3;
    CHECK_THROWS_AS(ingest_document(b.dump()), ValidationError);
}

TEST_CASE("paragraph lines become fragments") {
    json b = minimal_bundle();
    b["paragraphs"][0]["lines"] = json::array({{{"start", 0}, {"end", 12}, {"box", {72, 72, 400, 12}}}});
    const auto doc = ingest_document(b.dump());
    REQUIRE(doc.paragraphs[0].fragments.size() == 1);
    CHECK(doc.paragraphs[0].fragments[0].is_line);
}

TEST_CASE("stub column skips numeric leading columns") {
    const Table t = testing::make_table({{"Year", "Model", "Params"}, {"2019", "BERT", "3.4E+08"}, {"2020", "GPT-3", "1.75E+11"}});
    CHECK(t.stub_column() == 1);
}

TEST_CASE("normalize_box divides by page size") {
    const PageInfo page{0, 612, 792};
    const auto n = normalize_box(Box{61.2, 79.2, 122.4, 39.6}, page);
    CHECK(n.x == doctest::Approx(0.1));
    CHECK(n.y == doctest::Approx(0.1));
    CHECK(n.w == doctest::Approx(0.2));
    CHECK(n.h == doctest::Approx(0.05));
    const auto full = normalize_box(Box{0, 0, 612, 792}, page);
    CHECK(full == NormalizedBox{0, 0, 0, 1, 1});
    CHECK_THROWS_AS(normalize_box(Box{0, 0, 1, 1}, PageInfo{0, 0, 792}), GeometryError);

    Warnings w;
    const auto clamped = normalize_box(Box{600, 780, 50, 50}, page, &w);
    CHECK(clamped.x + clamped.w <= 1.0);
    CHECK(clamped.y + clamped.h <= 1.0);
    REQUIRE(w.size() == 1);
    CHECK(w[0].code == "box-clamped");
}
