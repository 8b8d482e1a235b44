#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "corpuskit/errors.hpp"
#include "corpuskit/record.hpp"
#include "corpuskit/utf8.hpp"

using namespace corpuskit;

TEST_CASE("record round-trips through its line form") {
    CorpusRecord r;
    r.id = "doc-1";
    r.kind = RecordKind::repo_file;
    r.language = "python";
    r.content = "print('hi')\n\ttab \"quoted\" \xC3\xA9";
    r.path = "pkg/mod.py";
    r.repo_id = "acme/widgets";
    r.meta["stars"] = std::int64_t{42};
    r.meta["score"] = 0.25;
    r.meta["comment"] = std::string("note");

    const auto line = serialize_record(r);
    CHECK(line.find('\n') == std::string::npos);
    auto back = parse_record_line(line);
    REQUIRE(back);
    CHECK(*back == r);
    CHECK(std::holds_alternative<std::int64_t>(back->meta.at("stars")));
    CHECK(std::holds_alternative<double>(back->meta.at("score")));
}

TEST_CASE("serialization uses sorted keys and omits unset optionals") {
    CorpusRecord r;
    r.id = "a";
    r.kind = RecordKind::text;
    r.content = "x";
    CHECK(serialize_record(r) == R"({"content":"x","id":"a","kind":"text"})");
}

TEST_CASE("malformed lines are skipped and counted") {
    std::istringstream in(
        "{\"id\":\"a\",\"kind\":\"text\",\"content\":\"x\"}\n"
        "not json\n"
        "\n"
        "{\"id\":\"b\",\"kind\":\"nonsense\",\"content\":\"x\"}\n"
        "{\"id\":\"c\",\"kind\":\"text\"}\n"
        "{\"id\":\"d\",\"kind\":\"text\",\"content\":\"y\",\"meta\":{\"k\":[1]}}\n"
        "{\"id\":\"e\",\"kind\":\"coco\",\"content\":\"z\"}\r\n");
    const auto loaded = load_records(in);
    REQUIRE(loaded.records.size() == 2);
    CHECK(loaded.records[0].id == "a");
    CHECK(loaded.records[1].id == "e");
    CHECK(loaded.malformed_lines == 4);
    CHECK(loaded.malformed_line_numbers == std::vector<std::size_t>{2, 4, 5, 6});
}

TEST_CASE("unknown fields are ignored") {
    auto r = parse_record_line(R"({"id":"a","kind":"text","content":"x","extra":{"nested":true}})");
    REQUIRE(r);
    CHECK(r->content == "x");
}

TEST_CASE("duplicate ids are a schema error") {
    std::istringstream in("{\"id\":\"a\",\"kind\":\"text\",\"content\":\"x\"}\n"
                          "{\"id\":\"a\",\"kind\":\"text\",\"content\":\"y\"}\n");
    CHECK_THROWS_AS(load_records(in), SchemaError);
}

TEST_CASE("invalid UTF-8 is repaired and the replacement count recorded") {
    // "ab" + lone continuation byte + "c" + truncated 3-byte sequence
    const std::string bad = "ab\x80" "c\xE2\x82";
    const auto repaired = utf8::repair(bad);
    CHECK(repaired.replacements == 2);
    CHECK(repaired.text == "ab\xEF\xBF\xBD" "c\xEF\xBF\xBD");
    CHECK(utf8::is_valid(repaired.text));

    const std::string line = std::string("{\"id\":\"a\",\"kind\":\"text\",\"content\":\"") + bad + "\"}";
    auto r = parse_record_line(line);
    REQUIRE(r);
    CHECK(r->meta_int(std::string(kUtf8ReplacementsKey)) == 2);
}

TEST_CASE("utf8 length counts code points") {
    CHECK(utf8::length("") == 0);
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("\xC3\xA9t\xC3\xA9") == 3);
    CHECK(utf8::length("\xF0\x9F\x98\x80") == 1);
}

TEST_CASE("non-finite meta values cannot be serialized") {
    CorpusRecord r;
    r.id = "a";
    r.content = "x";
    r.meta["bad"] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(serialize_record(r), SerializationError);
}

TEST_CASE("record kinds parse by name") {
    for (auto k : {RecordKind::source_code, RecordKind::text, RecordKind::coco, RecordKind::repo_file}) {
        CHECK(parse_record_kind(to_string(k)) == k);
    }
    CHECK_FALSE(parse_record_kind("source"));
}
