#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpuskit/config.hpp"
#include "corpuskit/lex_toposort.hpp"
#include "corpuskit/record.hpp"
#include "corpuskit/repo_graph.hpp"

namespace corpuskit {

/// Header line that introduces each file of a concatenated repository document.
///
/// The default ("auto") writes the path as a one-line comment in the file's own
/// syntax: `// p` (C family, Go, Rust, JS/TS, Java, ...), `# p` (Python, shell,
/// Ruby), `-- p` (SQL, Lua), `<!-- p -->` (HTML, XML), and `<<< p >>>` for
/// languages without line comments. A custom template is any single line
/// containing `{path}`.
///
/// Document layout: header(f0) "\n" body(f0) ["\n" header(fi) "\n" body(fi)]...
/// so every header starts a line. The newline before each later header belongs to
/// the separator. Bodies are escaped: a content line that would read as a header
/// (after any number of leading backslashes) gets one extra leading backslash;
/// splitting removes exactly one.
class SeparatorTemplate {
public:
    explicit SeparatorTemplate(std::string spec = "auto");

    std::string header(std::string_view path) const;
    /// Path if `line` is a header line, else nullopt.
    std::optional<std::string> parse_header(std::string_view line) const;
    bool is_auto() const noexcept { return spec_ == "auto"; }

private:
    std::string spec_;
    std::string prefix_;
    std::string suffix_;
};

struct ConcatStats {
    std::size_t files = 0;
    std::size_t content_bytes = 0;
    std::size_t separator_bytes = 0;
    std::size_t escaped_lines = 0;
};

struct ConcatResult {
    std::string document;
    ConcatStats stats;
};

/// Joins the files named by `topo` (node ids of `graph`) in order.
/// Throws UsageError when the order does not cover exactly the graph's nodes or a
/// node's path is missing from the snapshot.
ConcatResult concat_repo(const RepoSnapshot& snapshot, const ImportGraph& graph, const TopoOrder& topo,
                         const SeparatorTemplate& separator = SeparatorTemplate{});

/// Inverse of concat_repo: ordered (path, content) pairs.
std::vector<std::pair<std::string, std::string>> split_document(std::string_view document,
                                                                const SeparatorTemplate& separator = SeparatorTemplate{});

struct RepoQuality {
    double avg_quality_score = 0.0;
    double avg_comment_ratio = 0.0;
    double avg_effective_loc = 0.0;
    std::size_t file_count = 0;
};

struct RepoThresholds {
    double min_quality = 0.5;
    double min_comment_ratio = 0.01;
    double min_effective_loc = 5.0;

    static RepoThresholds from_config(const PipelineConfig& cfg);
};

/// Averages the default code metrics over the given files. Throws UsageError for an empty list.
RepoQuality measure_repo_quality(const RepoSnapshot& snapshot, const std::vector<std::string>& paths);

/// Keeps when every average reaches its threshold; rejects with rule
/// `repo_quality`, `repo_comment_ratio` or `repo_effective_loc` (checked in that
/// order). Throws UsageError when file_count is 0.
FilterVerdict repo_quality_filter(const RepoQuality& quality, const RepoThresholds& thresholds);

struct RepoDocument {
    CorpusRecord record;  // kind=text, id=repo_id
    RepoQuality quality;
    FilterVerdict verdict;
    std::size_t cycle_broken = 0;
};

/// Full repository pipeline: graph → order → concatenation → quality gate.
/// Throws UsageError when the repository has no graph-capable files.
RepoDocument build_repo_document(const RepoSnapshot& snapshot, const PipelineConfig& cfg);

}  // namespace corpuskit
