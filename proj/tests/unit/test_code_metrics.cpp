#include <doctest.h>

#include <cmath>

#include "corpuskit/code_metrics.hpp"
#include "corpuskit/errors.hpp"

using namespace corpuskit;

TEST_CASE("python lines by hand") {
    const char* src =
        "# header comment\n"       // comment
        "import os\n"              // code
        "\n"                       // blank
        "def f(x):\n"              // code
        "    \"\"\"Doc\n"          // comment (docstring)
        "    string\"\"\"\n"       // comment
        "    s = \"# not one\"\n"  // code: marker inside a string
        "    return x  # tail\n";  // code with trailing comment
    const auto c = classify_lines(src, "python");
    CHECK(c.total_lines == 8);
    CHECK(c.blank_lines == 1);
    CHECK(c.comment_lines == 3);
    CHECK(c.code_lines == 4);
    CHECK(comment_ratio(src, "python") == doctest::Approx(3.0 / 7.0));
    CHECK(effective_loc(src, "python") == 4);
}

TEST_CASE("c block comments span lines") {
    const char* src =
        "/* a\n"
        "   b */\n"
        "int x; // c\n"
        "// d\n"
        "int y = 1; /* e */ int z;\n"
        "char *s = \"/* no */\";";
    const auto c = classify_lines(src, "c");
    CHECK(c.total_lines == 6);
    CHECK(c.comment_lines == 3);
    CHECK(c.code_lines == 3);
}

TEST_CASE("shell comments need a word boundary") {
    const auto c = classify_lines("echo $#\n# real\nx=1 # tail\n", "shell");
    CHECK(c.comment_lines == 1);
    CHECK(c.code_lines == 2);
}

TEST_CASE("a trailing newline does not add a line; empty files have ratio 0") {
    CHECK(classify_lines("x = 1\n", "python").total_lines == 1);
    CHECK(classify_lines("", "python").total_lines == 0);
    CHECK(comment_ratio("", "python") == 0.0);
    CHECK(comment_ratio("\n\n", "python") == 0.0);
    CHECK_THROWS_AS(classify_lines("x", "klingon"), UsageError);
}

TEST_CASE("syntax adapters") {
    const auto reg = SyntaxRegistry::with_defaults();
    CHECK(syntax_valid("def f(x):\n    return x\n", "python", reg).valid == Tristate::yes);
    CHECK(syntax_valid("if x: pass\n", "python", reg).valid == Tristate::yes);
    CHECK(syntax_valid("def f(x)\n    return x\n", "python", reg).valid == Tristate::no);
    CHECK(syntax_valid("x = (1, 2\n", "python", reg).valid == Tristate::no);
    CHECK(syntax_valid("f(:)\n", "python", reg).valid == Tristate::no);
    CHECK(syntax_valid("s = 'unterminated\n", "python", reg).valid == Tristate::no);
    CHECK(syntax_valid("int main() { return 0; }", "c", reg).valid == Tristate::yes);
    CHECK(syntax_valid("int main() { return 0; ", "c", reg).valid == Tristate::no);
    CHECK(syntax_valid("char *s = \"{\"; /* } */", "cpp", reg).valid == Tristate::yes);
    CHECK(syntax_valid("/* never closed", "java", reg).valid == Tristate::no);

    const auto unknown = syntax_valid("def x\n  [1, 2\nend\n", "ruby", reg);
    CHECK(unknown.valid == Tristate::unknown);
    CHECK(unknown.from_fallback);
    CHECK(unknown.heuristic == false);
}

TEST_CASE("a throwing adapter surfaces its id") {
    struct Boom final : SyntaxAdapter {
        std::string id() const override { return "boom-adapter"; }
        bool parses(std::string_view) const override { throw std::runtime_error("kaput"); }
    };
    SyntaxRegistry reg;
    reg.add("python", std::make_shared<Boom>());
    try {
        syntax_valid("x", "python", reg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("boom-adapter") != std::string::npos);
    }
}

TEST_CASE("default quality score by hand") {
    QualityFeatures f;
    f.comment_ratio = 0.2;
    f.effective_loc = 10;
    f.syntax_valid = Tristate::yes;
    // z = -1.5 + 4*0.2 + 0.5*ln(11) + 1.5
    const double z = -1.5 + 0.8 + 0.5 * std::log(11.0) + 1.5;
    CHECK(default_quality_score(f) == doctest::Approx(1.0 / (1.0 + std::exp(-z))));

    // Comment ratio is capped at 0.5.
    QualityFeatures capped = f;
    capped.comment_ratio = 0.9;
    QualityFeatures half = f;
    half.comment_ratio = 0.5;
    CHECK(default_quality_score(capped) == default_quality_score(half));

    QualityFeatures worse = f;
    worse.syntax_valid = Tristate::no;
    worse.dup_line_ratio = 0.5;
    CHECK(default_quality_score(worse) < default_quality_score(f));
    CHECK(default_quality_score(worse) > 0.0);
}

namespace {

CorpusRecord scored(std::string id, double llm, double cls) {
    CorpusRecord r;
    r.id = std::move(id);
    r.meta["llm_score"] = llm;
    r.meta["classifier_score"] = cls;
    return r;
}

}  // namespace

TEST_CASE("web recall cascade") {
    const std::vector<CorpusRecord> records{scored("a", 4, 5), scored("b", 2, 5), scored("c", 3, 4),
                                            scored("d", 3, 5), scored("e", 5, 3)};
    const auto result = score_cascade(records, web_recall_stages(), ScorerRegistry::with_defaults());
    CHECK(result.kept == std::vector<std::string>{"a", "d"});
    REQUIRE(result.stages.size() == 2);
    CHECK(result.stages[0].input == 5);
    CHECK(result.stages[0].kept == 4);
    CHECK(result.stages[1].input == 4);
    CHECK(result.stages[1].kept == 2);
    for (const auto& s : result.stages) CHECK(s.kept + s.removed == s.input);
}

TEST_CASE("cascade stages parse and validate before scoring") {
    const auto st = parse_cascade_stage("meta.x>=0.5");
    CHECK(st.scorer_id == "meta.x");
    CHECK(st.predicate == StagePredicate::at_least);
    CHECK(st.threshold == 0.5);
    CHECK(to_string(parse_cascade_stage("q==5")) == "q==5");
    CHECK_THROWS(parse_cascade_stage("nonsense"));

    int calls = 0;
    ScorerRegistry reg;
    reg.add("counted", {[&](const CorpusRecord&) { return static_cast<double>(++calls); }, 0.0, 100.0});
    const std::vector<CorpusRecord> records{scored("a", 1, 1)};
    CHECK_THROWS_AS(score_cascade(records, {parse_cascade_stage("counted>=1"), parse_cascade_stage("missing>=1")}, reg),
                    ConfigError);
    CHECK(calls == 0);
    CHECK_THROWS_AS(score_cascade(records, {parse_cascade_stage("counted>=101")}, reg), ValidationError);
    CHECK(calls == 0);
}

TEST_CASE("scorer failures name the record") {
    CorpusRecord r;
    r.id = "rec-without-score";
    try {
        score_cascade({r}, web_recall_stages(), ScorerRegistry::with_defaults());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("rec-without-score") != std::string::npos);
    }
}

TEST_CASE("code metrics bundle") {
    const auto reg = SyntaxRegistry::with_defaults();
    const auto m = compute_code_metrics("# c\nx = 1\ny = 2\n", "python", reg);
    CHECK(m.comment_ratio == doctest::Approx(1.0 / 3.0));
    CHECK(m.effective_loc == 2);
    CHECK(m.total_lines == 3);
    CHECK(m.syntax_valid == Tristate::yes);
}
