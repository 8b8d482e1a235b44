#include <doctest.h>

#include "corpuskit/errors.hpp"
#include "corpuskit/rule_filters.hpp"

using namespace corpuskit;

namespace {

CorpusRecord source(std::string content) {
    CorpusRecord r;
    r.id = "s";
    r.kind = RecordKind::source_code;
    r.content = std::move(content);
    return r;
}

CorpusRecord text(std::string content) {
    CorpusRecord r;
    r.id = "t";
    r.kind = RecordKind::text;
    r.content = std::move(content);
    return r;
}

std::string repeat(std::string_view s, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += s;
    return out;
}

}  // namespace

TEST_CASE("url character ratio is covered characters over all characters") {
    // "http://a.bc/x" is 13 of the 21 characters.
    const auto s = compute_content_stats("see http://a.bc/x now");
    CHECK(s.total_chars == 21);
    CHECK(s.url_ip_char_ratio == doctest::Approx(13.0 / 21.0));
}

TEST_CASE("the url rule is strict at the threshold") {
    // 12 url characters; 20 characters in total is exactly 0.60.
    CHECK(filter_source(source("http://ab.cd xxxxxxx"), {}).keep);
    const auto v = filter_source(source("http://ab.cd xxxxxx"), {});
    CHECK_FALSE(v.keep);
    CHECK(v.rule_id == "url_ip_ratio");
}

TEST_CASE("address patterns") {
    CHECK(compute_content_stats("10.1.2.3").url_ip_char_ratio == 1.0);
    CHECK(compute_content_stats("::1").url_ip_char_ratio == 1.0);
    CHECK(compute_content_stats("fe80::1:2").url_ip_char_ratio == 1.0);
    CHECK(compute_content_stats("std::vector").url_ip_char_ratio == 0.0);
    CHECK(compute_content_stats("a::b").url_ip_char_ratio == 0.0);
    CHECK(compute_content_stats("999.1.1.1").url_ip_char_ratio == 0.0);
    CHECK(compute_content_stats("v1.2.3.4.5").url_ip_char_ratio == 0.0);
}

TEST_CASE("pii covers emails, phone numbers and timestamps") {
    CHECK(compute_content_stats("jo@ex.io").pii_char_ratio == 1.0);
    CHECK(compute_content_stats("555-123-4567").pii_char_ratio == 1.0);
    CHECK(compute_content_stats("2024-01-31").pii_char_ratio == 1.0);
    // "2024-01-31T10:20:30Z" is 20 of the 24 characters.
    CHECK(compute_content_stats("at 2024-01-31T10:20:30Z.").pii_char_ratio == doctest::Approx(20.0 / 24.0));
    CHECK(compute_content_stats("x = 12345").pii_char_ratio == 0.0);
}

TEST_CASE("garbled counts replacement characters and stray controls") {
    // 2 garbled code points out of 10 (newline and tab are not garbled).
    const auto s = compute_content_stats("ab\x01" "cd\n\te\xEF\xBF\xBD" "f");
    CHECK(s.total_chars == 10);
    CHECK(s.garbled_ratio == doctest::Approx(0.2));
}

TEST_CASE("duplication ratios") {
    // Lines a, a, b: one repeated line out of three non-blank lines.
    const auto s = compute_content_stats("a\na\n\nb\n");
    CHECK(s.dup_line_ratio == doctest::Approx(1.0 / 3.0));
    // Words x x x y: two repeats out of four words.
    CHECK(compute_content_stats("x x x y").dup_word_ratio == doctest::Approx(0.5));
    CHECK(filter_source(source(repeat("same line\n", 10)), {}).rule_id == "duplication");
}

TEST_CASE("line lengths count code points") {
    const std::string e_acute = "\xC3\xA9";
    const auto exactly = repeat(e_acute, 1000);
    auto s = compute_content_stats(exactly);
    CHECK(s.max_line_len == 1000);

    PipelineConfig cfg;
    cfg.source_rules = {"max_line_len"};
    CHECK(filter_source(source(exactly), cfg).keep);
    CHECK(filter_source(source(exactly + e_acute), cfg).rule_id == "max_line_len");
}

TEST_CASE("average line length is strict at 100") {
    PipelineConfig cfg;
    cfg.source_rules = {"avg_line_len"};
    // Lines of 150 and 50 characters average exactly 100.
    CHECK(filter_source(source(std::string(150, 'a') + "\n" + std::string(50, 'b')), cfg).keep);
    const auto v = filter_source(source(std::string(151, 'a') + "\n" + std::string(50, 'b')), cfg);
    CHECK(v.rule_id == "avg_line_len");
    CHECK(v.measured == doctest::Approx(100.5));
}

TEST_CASE("text is exempt from line-length rules") {
    CHECK(filter_text(text(std::string(5000, 'q')), {}).keep);
}

TEST_CASE("rules run in order and the first failure is reported") {
    // Entirely a URL and an email: both ratios exceed their thresholds.
    const std::string both = "http://ex.com/aaaaaaaaaaaaaaaaaaaaaaaa\nme@ex.com\n";
    CHECK(filter_source(source(both), {}).rule_id == "url_ip_ratio");
    PipelineConfig cfg;
    cfg.source_rules = {"pii_ratio"};
    CHECK(filter_source(source("me@ex.com"), cfg).rule_id == "pii_ratio");
    cfg.source_rules = {};
    CHECK(filter_source(source(both), cfg).keep);
}

TEST_CASE("text-only rules") {
    CHECK(filter_text(text("intro\n![fig](a.png)\n"), {}).rule_id == "image_reference");
    CHECK(filter_text(text("<img src=x>"), {}).rule_id == "image_reference");
    CHECK(filter_text(text("Lorem Ipsum dolor"), {}).rule_id == "placeholder");
    // Two link lines out of three non-blank lines.
    CHECK(filter_text(text("[a](a.md) one\n[b](b.md) two\nthree four\n"), {}).rule_id == "link_density");
    // One of two is exactly 0.5: kept.
    CHECK(filter_text(text("[a](a.md) one\nthree four\n"), {}).keep);
}

TEST_CASE("filters reject records of the wrong kind") {
    CHECK_THROWS_AS(filter_source(text("x"), {}), UsageError);
    CHECK_THROWS_AS(filter_text(source("x"), {}), UsageError);
    auto repo_file = source("x");
    repo_file.kind = RecordKind::repo_file;
    CHECK(filter_source(repo_file, {}).keep);
}

TEST_CASE("toxicity runs after the rule set") {
    auto blocked = [](const CorpusRecord& r) { return r.content.find("slur") != std::string::npos; };
    CHECK(apply_toxicity(text("a slur here"), FilterVerdict::accept(), blocked).rule_id == "toxicity");
    CHECK(apply_toxicity(text("a slur here"), FilterVerdict::reject("garbled"), blocked).rule_id == "garbled");
    CHECK(apply_toxicity(text("a slur here"), FilterVerdict::accept(), nullptr).keep);
}

TEST_CASE("report merge is commutative and conserves counts") {
    FilterReport a, b;
    a.add(FilterVerdict::accept());
    a.add(FilterVerdict::reject("garbled"));
    b.add(FilterVerdict::reject("garbled"));
    b.add(FilterVerdict::reject("pii_ratio"));
    auto ab = a;
    ab.merge(b);
    auto ba = b;
    ba.merge(a);
    CHECK(ab.input == ba.input);
    CHECK(ab.rejected_by_rule == ba.rejected_by_rule);
    CHECK(ab.input == 4);
    CHECK(ab.kept + ab.rejected() == ab.input);
    CHECK(ab.rejected_by_rule.at("garbled") == 2);
}
