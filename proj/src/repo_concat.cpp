#include "corpuskit/repo_concat.hpp"

#include <algorithm>
#include <array>

#include "corpuskit/code_metrics.hpp"
#include "corpuskit/errors.hpp"
#include "corpuskit/languages.hpp"

namespace corpuskit {

namespace {

constexpr std::string_view kPathToken = "{path}";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

// Header paths must sit on one line and be recoverable from it.
bool valid_header_path(std::string_view p) {
    if (p.empty() || is_space(p.front()) || is_space(p.back())) return false;
    return p.find_first_of("\r\n") == std::string_view::npos;
}

struct Affixes {
    std::string_view prefix;
    std::string_view suffix;
};

constexpr std::array<Affixes, 5> kAutoForms{{
    {"// ", ""}, {"# ", ""}, {"-- ", ""}, {"<!-- ", " -->"}, {"<<< ", " >>>"},
}};

Affixes auto_affixes(std::string_view path) {
    const auto* lang = language_for_path(path);
    if (lang) {
        for (const auto& marker : lang->comments.line_markers) {
            for (const auto& form : kAutoForms) {
                if (form.suffix.empty() && form.prefix.substr(0, form.prefix.size() - 1) == marker) return form;
            }
        }
        for (const auto& block : lang->comments.block_markers) {
            if (block.open == "<!--") return kAutoForms[3];
        }
    }
    return kAutoForms[4];
}

std::optional<std::string> strip_affixes(std::string_view line, std::string_view prefix, std::string_view suffix) {
    if (line.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (!line.starts_with(prefix) || !line.ends_with(suffix)) return std::nullopt;
    auto p = line.substr(prefix.size(), line.size() - prefix.size() - suffix.size());
    if (!valid_header_path(p)) return std::nullopt;
    return std::string(p);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (true) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            return lines;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
}

}  // namespace

SeparatorTemplate::SeparatorTemplate(std::string spec) : spec_(std::move(spec)) {
    if (spec_ == "auto") return;
    if (spec_.find_first_of("\r\n") != std::string::npos) throw ValidationError("separator_template", "must be a single line");
    const auto pos = spec_.find(kPathToken);
    if (pos == std::string::npos || spec_.find(kPathToken, pos + 1) != std::string::npos) {
        throw ValidationError("separator_template", "must contain {path} exactly once");
    }
    prefix_ = spec_.substr(0, pos);
    suffix_ = spec_.substr(pos + kPathToken.size());
    if (prefix_.empty() && suffix_.empty()) throw ValidationError("separator_template", "needs text around {path}");
}

std::string SeparatorTemplate::header(std::string_view path) const {
    if (!valid_header_path(path)) throw UsageError("path cannot appear in a header line: '" + std::string(path) + "'");
    if (is_auto()) {
        const auto form = auto_affixes(path);
        return std::string(form.prefix) + std::string(path) + std::string(form.suffix);
    }
    return prefix_ + std::string(path) + suffix_;
}

std::optional<std::string> SeparatorTemplate::parse_header(std::string_view line) const {
    if (!is_auto()) return strip_affixes(line, prefix_, suffix_);
    // A line is a header only if it is exactly the header its own path would get.
    for (const auto& form : kAutoForms) {
        auto p = strip_affixes(line, form.prefix, form.suffix);
        if (p && header(*p) == line) return p;
    }
    return std::nullopt;
}

ConcatResult concat_repo(const RepoSnapshot& snapshot, const ImportGraph& graph, const TopoOrder& topo,
                         const SeparatorTemplate& separator) {
    validate_order(graph, topo);  // throws UsageError on a non-permutation
    ConcatResult result;
    auto& doc = result.document;
    for (std::size_t i = 0; i < topo.order.size(); ++i) {
        const auto& path = graph.nodes[topo.order[i]].path;
        auto it = snapshot.files.find(path);
        if (it == snapshot.files.end()) throw UsageError("ordered file missing from snapshot: " + path);

        const std::string head = separator.header(path);
        if (i > 0) {
            doc += '\n';
            ++result.stats.separator_bytes;
        }
        doc += head;
        doc += '\n';
        result.stats.separator_bytes += head.size() + 1;

        const auto lines = split_lines(it->second);
        for (std::size_t k = 0; k < lines.size(); ++k) {
            if (k > 0) doc += '\n';
            const auto line = lines[k];
            const auto bare = line.substr(std::min(line.size(), line.find_first_not_of('\\')));
            if (separator.parse_header(bare)) {
                doc += '\\';
                ++result.stats.escaped_lines;
            }
            doc += line;
        }
        result.stats.content_bytes += it->second.size();
        ++result.stats.files;
    }
    return result;
}

std::vector<std::pair<std::string, std::string>> split_document(std::string_view document,
                                                                const SeparatorTemplate& separator) {
    std::vector<std::pair<std::string, std::string>> files;
    if (document.empty()) return files;
    const auto lines = split_lines(document);
    auto first = separator.parse_header(lines.front());
    if (!first) throw ParseError("document does not start with a file header");

    files.emplace_back(std::move(*first), std::string());
    bool at_start = true;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        auto line = lines[k];
        if (auto p = separator.parse_header(line)) {
            files.emplace_back(std::move(*p), std::string());
            at_start = true;
            continue;
        }
        auto& body = files.back().second;
        if (!at_start) body += '\n';
        at_start = false;
        if (line.starts_with('\\')) {
            const auto bare = line.substr(line.find_first_not_of('\\') == std::string_view::npos
                                              ? line.size()
                                              : line.find_first_not_of('\\'));
            if (separator.parse_header(bare)) line.remove_prefix(1);
        }
        body += line;
    }
    return files;
}

RepoThresholds RepoThresholds::from_config(const PipelineConfig& cfg) {
    return {cfg.repo_min_quality, cfg.repo_min_comment_ratio, static_cast<double>(cfg.repo_min_effective_loc)};
}

RepoQuality measure_repo_quality(const RepoSnapshot& snapshot, const std::vector<std::string>& paths) {
    if (paths.empty()) throw UsageError("repository quality needs at least one file");
    static const SyntaxRegistry syntax = SyntaxRegistry::with_defaults();
    static const ScorerRegistry scorers = ScorerRegistry::with_defaults();
    const auto* scorer = scorers.find("quality");

    RepoQuality q;
    for (const auto& path : paths) {
        auto it = snapshot.files.find(path);
        if (it == snapshot.files.end()) throw UsageError("file missing from snapshot: " + path);
        CorpusRecord rec;
        rec.id = snapshot.repo_id + ":" + path;
        rec.kind = RecordKind::repo_file;
        rec.path = path;
        rec.content = it->second;
        if (const auto* lang = language_for_path(path)) {
            rec.language = lang->tag;
            const auto m = compute_code_metrics(it->second, lang->tag, syntax);
            q.avg_comment_ratio += m.comment_ratio;
            q.avg_effective_loc += static_cast<double>(m.effective_loc);
        }
        q.avg_quality_score += quality_score(rec, *scorer);
    }
    const auto n = static_cast<double>(paths.size());
    q.file_count = paths.size();
    q.avg_quality_score /= n;
    q.avg_comment_ratio /= n;
    q.avg_effective_loc /= n;
    return q;
}

FilterVerdict repo_quality_filter(const RepoQuality& quality, const RepoThresholds& t) {
    if (quality.file_count == 0) throw UsageError("repository quality over zero files");
    if (quality.avg_quality_score < t.min_quality) return FilterVerdict::reject("repo_quality", quality.avg_quality_score);
    if (quality.avg_comment_ratio < t.min_comment_ratio) {
        return FilterVerdict::reject("repo_comment_ratio", quality.avg_comment_ratio);
    }
    if (quality.avg_effective_loc < t.min_effective_loc) {
        return FilterVerdict::reject("repo_effective_loc", quality.avg_effective_loc);
    }
    return FilterVerdict::accept();
}

RepoDocument build_repo_document(const RepoSnapshot& snapshot, const PipelineConfig& cfg) {
    const auto built = build_graph(snapshot);
    if (built.graph.size() == 0) throw UsageError("repository " + snapshot.repo_id + " has no graph-capable files");
    const auto topo = lex_topo_sort(built.graph);
    const auto concat = concat_repo(snapshot, built.graph, topo, SeparatorTemplate(cfg.separator_template));

    std::vector<std::string> paths;
    for (auto id : topo.order) paths.push_back(built.graph.nodes[id].path);

    RepoDocument out;
    out.quality = measure_repo_quality(snapshot, paths);
    out.verdict = repo_quality_filter(out.quality, RepoThresholds::from_config(cfg));
    out.cycle_broken = topo.cycle_broken.size();

    auto& rec = out.record;
    rec.id = snapshot.repo_id;
    rec.kind = RecordKind::text;
    rec.content = concat.document;
    rec.repo_id = snapshot.repo_id;
    rec.meta["repo_avg_quality_score"] = out.quality.avg_quality_score;
    rec.meta["repo_avg_comment_ratio"] = out.quality.avg_comment_ratio;
    rec.meta["repo_avg_effective_loc"] = out.quality.avg_effective_loc;
    rec.meta["repo_file_count"] = static_cast<std::int64_t>(out.quality.file_count);
    rec.meta["repo_cycle_broken"] = static_cast<std::int64_t>(out.cycle_broken);
    rec.meta["repo_imports_resolved"] = static_cast<std::int64_t>(built.imports_resolved);
    return out;
}

}  // namespace corpuskit
