#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "tablink/schema.hpp"

using namespace tablink;
using nlohmann::json;

namespace {

LinkingSchema built(const std::string& fixture) {
    return build_schema(testing::load_fixture(fixture), PipelineOptions{});
}

const LinkedSentence& sentence_with(const LinkingSchema& s, std::string_view needle) {
    for (const auto& p : s.pairs)
        for (const auto& ls : p.sentences)
            if (ls.sentence.text.find(needle) != std::string::npos) return ls;
    throw std::runtime_error("no sentence contains " + std::string(needle));
}

}  // namespace

TEST_CASE("document without table references has no pairs") {
    json b = json::parse(testing::read_fixture("binder_tabfact.json"));
    b["paragraphs"][0]["text"] = "Nothing is cited here.";
    const auto schema = build_schema(ingest_document(b.dump()), PipelineOptions{});
    CHECK(schema.pairs.empty());
    CHECK(encode_schema(schema).find("\"pairs\":[]") != std::string::npos);
}

TEST_CASE("accuracy fixture links the derived value to its two cells") {
    const auto doc = testing::load_fixture("binder_tabfact.json");
    const auto schema = build_schema(doc, PipelineOptions{});
    REQUIRE(schema.pairs.size() == 1);
    CHECK(schema.pairs[0].pair.table_id == "t2");
    const auto& ls = sentence_with(schema, "12.5%");
    const auto m = std::find_if(ls.mentions.begin(), ls.mentions.end(),
                                [](const LinkedMention& x) { return x.mention.text == "12.5%"; });
    REQUIRE(m != ls.mentions.end());
    CHECK(m->mention.type == MentionType::DerivedValue);
    CHECK(m->alignment.target.cells == std::vector<std::string>{"r2c1", "r4c1"});
    CHECK(m->boxes.size() == 2);
    CHECK(schema.content_hash == doc.content_hash);
}

TEST_CASE("rebuilds are byte-identical and round-trip") {
    const auto a = encode_schema(built("distillation_scores.json"));
    const auto b = encode_schema(built("distillation_scores.json"));
    CHECK(a == b);
    const auto decoded = decode_schema(a);
    CHECK(encode_schema(decoded) == a);
    CHECK(decode_schema(encode_schema(decoded)) == decoded);
    validate_schema(decoded, testing::load_fixture("distillation_scores.json"));
}

TEST_CASE("canonical key order and six-decimal fractions") {
    const auto bytes = encode_schema(built("translation_bleu.json"));
    CHECK(bytes.rfind(R"({"version":"1","doc_id":"translation-bleu","content_hash":"sha256:)", 0) == 0);
    CHECK(bytes.back() == '\n');
    CHECK(bytes.find(R"("sentence_boxes":[{"page":0,"x":0.117647,)") != std::string::npos);
    CHECK(bytes.find(R"({"id":"p0#s1","text":)") != std::string::npos);
    CHECK(bytes.find(R"("mentions":[{"id":"p0#s1#t4#m0","text":"fr to en","span":[3,11],"type":"NamedEntity","source":"deterministic","mechanism":"semantic")") !=
          std::string::npos);
}

TEST_CASE("unknown versions and broken payloads are rejected") {
    auto bytes = encode_schema(built("translation_bleu.json"));
    json j = json::parse(bytes);
    j["version"] = "2";
    CHECK_THROWS_AS(decode_schema(j.dump()), SchemaError);
    j.erase("version");
    CHECK_THROWS_AS(decode_schema(j.dump()), SchemaError);
    CHECK_THROWS_AS(decode_schema("[]"), SchemaError);
    CHECK_THROWS_AS(decode_schema("{"), SchemaError);
    j = json::parse(bytes);
    j["pairs"][0]["sentences"][1]["mentions"][0]["type"] = "Color";
    CHECK_THROWS_AS(decode_schema(j.dump()), SchemaError);
}

TEST_CASE("decode checks ids against the document") {
    const auto doc = testing::load_fixture("translation_bleu.json");
    const auto bytes = encode_schema(build_schema(doc, PipelineOptions{}));

    json j = json::parse(bytes);
    j["pairs"][0]["table_id"] = "t99";
    CHECK_THROWS_AS(validate_schema(decode_schema(j.dump()), doc), SchemaError);

    j = json::parse(bytes);
    j["pairs"][0]["sentences"][1]["mentions"][1]["target"] = {{"granularity", "cell"}, {"cells", {"r9c9"}}};
    CHECK_THROWS_AS(validate_schema(decode_schema(j.dump()), doc), SchemaError);

    j = json::parse(bytes);
    j["pairs"][0]["sentences"][1]["mentions"][0]["span"] = {0, 3};
    CHECK_THROWS_AS(validate_schema(decode_schema(j.dump()), doc), SchemaError);

    j = json::parse(bytes);
    j["doc_id"] = "other";
    CHECK_THROWS_AS(validate_schema(decode_schema(j.dump()), doc), SchemaError);
}

TEST_CASE("target boxes") {
    const Table t = testing::make_table({{"a", "b", "c"}, {"1", "2", "3"}, {"4", "5", "6"}});
    const PageInfo page{0, 100, 100};
    const auto row = target_to_boxes(AlignmentTarget::whole_row(1), t, page);
    REQUIRE(row.size() == 1);
    CHECK(row[0] == NormalizedBox{0, 0.0, 0.1, 0.3, 0.1});
    CHECK(target_to_boxes(AlignmentTarget::cell_set({"r1c1", "r2c2"}, t), t, page).size() == 2);
    const auto region = target_to_boxes(AlignmentTarget::region({0, 1, 0, 2}), t, page);
    REQUIRE(region.size() == 1);
    CHECK(region[0] == NormalizedBox{0, 0.0, 0.0, 0.3, 0.2});
}

TEST_CASE("merged header cells count once in a column box") {
    const auto doc = ingest_document(R"({"doc_id":"g","pages":[{"index":0,"width":300,"height":300}],"paragraphs":[],
      "tables":[{"id":"t","number":1,"page":0,"box":[0,0,300,90],
      "html":"<table><tr><th colspan=\"3\">All</th></tr><tr><td>a</td><td>b</td><td>c</td></tr><tr><td>d</td><td>e</td><td>f</td></tr></table>"}]})");
    const Table& t = doc.tables[0];
    const auto boxes = target_to_boxes(AlignmentTarget::whole_column(1), t, doc.pages[0]);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].x == doctest::Approx(0.0));
    CHECK(boxes[0].w == doctest::Approx(1.0));
    CHECK(boxes[0].h == doctest::Approx(0.3));
}

TEST_CASE("sentence boxes from lines and blocks") {
    ParsedDocument doc;
    doc.pages = {PageInfo{0, 100, 100}};
    Paragraph p;
    p.text = "abcdefghij";
    p.fragments = {TextFragment{0, Box{10, 10, 50, 5}, Span{0, 5}, true},
                   TextFragment{0, Box{10, 20, 50, 5}, Span{5, 10}, true}};
    auto boxes = span_boxes(p, Span{3, 7}, doc);
    REQUIRE(boxes.size() == 2);
    CHECK(boxes[0].x == doctest::Approx(0.4));
    CHECK(boxes[0].w == doctest::Approx(0.2));
    CHECK(boxes[1].x == doctest::Approx(0.1));
    CHECK(boxes[1].w == doctest::Approx(0.2));

    p.fragments = {TextFragment{0, Box{0, 0, 100, 40}, Span{0, 10}, false}};
    boxes = span_boxes(p, Span{5, 10}, doc);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].y == doctest::Approx(0.2));
    CHECK(boxes[0].h == doctest::Approx(0.2));
}
