#include <doctest.h>

#include <random>

#include "corpuskit/errors.hpp"
#include "corpuskit/repo_concat.hpp"
#include "test_support.hpp"

using namespace corpuskit;

namespace {

struct Fixture {
    RepoSnapshot snapshot;
    ImportGraph graph;
    TopoOrder topo;
};

Fixture fixture(const std::vector<std::pair<std::string, std::string>>& files) {
    Fixture f;
    f.snapshot.repo_id = "r";
    std::vector<std::string> paths;
    for (const auto& [p, c] : files) {
        f.snapshot.add_file(p, c);
        paths.push_back(p);
    }
    f.graph = make_graph(paths, {});
    f.topo = lex_topo_sort(f.graph);
    return f;
}

std::vector<std::pair<std::string, std::string>> sorted(std::vector<std::pair<std::string, std::string>> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("automatic headers follow the file's comment syntax") {
    const SeparatorTemplate sep;
    CHECK(sep.header("a/b.py") == "# a/b.py");
    CHECK(sep.header("x.cpp") == "// x.cpp");
    CHECK(sep.header("q.sql") == "-- q.sql");
    CHECK(sep.header("i.html") == "<!-- i.html -->");
    CHECK(sep.header("README") == "<<< README >>>");
    CHECK(sep.parse_header("# a/b.py") == "a/b.py");
    CHECK_FALSE(sep.parse_header("# not a path.txt"));
    CHECK_FALSE(sep.parse_header("# a.cpp"));
    CHECK_FALSE(sep.parse_header("// a.py"));

    const SeparatorTemplate custom("=== {path} ===");
    CHECK(custom.header("x") == "=== x ===");
    CHECK(custom.parse_header("=== x ===") == "x");
    CHECK_THROWS(SeparatorTemplate("no placeholder"));
    CHECK_THROWS(SeparatorTemplate("two\n{path}"));
}

TEST_CASE("document layout") {
    const auto f = fixture({{"a.py", "x = 1\n"}, {"b.py", "y = 2"}});
    const auto r = concat_repo(f.snapshot, f.graph, f.topo);
    CHECK(r.document == "# a.py\nx = 1\n\n# b.py\ny = 2");
    CHECK(r.stats.files == 2);
    CHECK(r.stats.content_bytes == 11);
    CHECK(r.document.size() == r.stats.content_bytes + r.stats.separator_bytes + r.stats.escaped_lines);
}

TEST_CASE("round trip survives header look-alikes and backslashes") {
    const std::vector<std::pair<std::string, std::string>> files{
        {"a.py", "# b.py\n\\# b.py\n\\\\# a.py\n# not-a-header\n"},
        {"b.py", "\n\n"},
        {"c.py", ""},
        {"d.cpp", "// a.py\n# a.py\n// d.cpp"},
        {"e.txt", "<<< e.txt >>>\r\n\\<<< c.py >>>"},
    };
    const auto f = fixture(files);
    const auto r = concat_repo(f.snapshot, f.graph, f.topo);
    CHECK(r.stats.escaped_lines == 5);
    CHECK(r.document.size() == r.stats.content_bytes + r.stats.separator_bytes + r.stats.escaped_lines);
    CHECK(sorted(split_document(r.document)) == files);
}

TEST_CASE("random round trips") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> atoms{"# a.py", "// b.js", "\\", "x", "\n", "<<< c >>>", "-- d.sql", " ", "\r"};
    for (int round = 0; round < 200; ++round) {
        std::vector<std::pair<std::string, std::string>> files;
        const std::vector<std::string> names{"a.py", "b.js", "c", "d.sql", "e.html"};
        for (const auto& name : names) {
            std::string content;
            const auto len = rng() % 12;
            for (std::size_t k = 0; k < len; ++k) content += atoms[rng() % atoms.size()];
            files.emplace_back(name, content);
        }
        const auto f = fixture(files);
        const auto r = concat_repo(f.snapshot, f.graph, f.topo);
        CHECK(r.document.size() == r.stats.content_bytes + r.stats.separator_bytes + r.stats.escaped_lines);
        CHECK(split_document(r.document) == files);
    }
}

TEST_CASE("concatenation checks its order") {
    const auto f = fixture({{"a.py", ""}, {"b.py", ""}});
    CHECK_THROWS_AS(concat_repo(f.snapshot, f.graph, TopoOrder{{0}, {}}), UsageError);
    RepoSnapshot missing = f.snapshot;
    missing.files.erase("b.py");
    CHECK_THROWS_AS(concat_repo(missing, f.graph, f.topo), UsageError);
}

TEST_CASE("repository quality gate") {
    const RepoThresholds t;
    RepoQuality q{0.9, 0.2, 40.0, 3};
    CHECK(repo_quality_filter(q, t).keep);
    auto low = q;
    low.avg_quality_score = 0.4;
    low.avg_effective_loc = 1;
    CHECK(repo_quality_filter(low, t).rule_id == "repo_quality");
    auto bare = q;
    bare.avg_comment_ratio = 0.0;
    CHECK(repo_quality_filter(bare, t).rule_id == "repo_comment_ratio");
    auto tiny = q;
    tiny.avg_effective_loc = 4.9;
    CHECK(repo_quality_filter(tiny, t).rule_id == "repo_effective_loc");
    auto edge = q;
    edge.avg_quality_score = t.min_quality;
    CHECK(repo_quality_filter(edge, t).keep);
    CHECK_THROWS_AS(repo_quality_filter(RepoQuality{}, t), UsageError);
}

TEST_CASE("full repository document") {
    const auto snap = snapshot_from_directory(test_support::data_dir() / "repos" / "python", "py");
    const auto doc = build_repo_document(snap, PipelineConfig{});
    CHECK(doc.record.id == "py");
    CHECK(doc.record.kind == RecordKind::text);
    CHECK(doc.quality.file_count == 5);
    CHECK(doc.cycle_broken == 0);
    const auto parts = split_document(doc.record.content);
    REQUIRE(parts.size() == 5);
    for (const auto& [path, content] : parts) CHECK(snap.files.at(path) == content);
}
