#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpuskit/record.hpp"

namespace corpuskit {

struct RepoMeta {
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    std::int64_t file_count = 0;
};

/// Normalizes a repo-relative path: '\' becomes '/', empty and "." segments are
/// dropped, ".." pops a segment. Throws ValidationError when ".." escapes the
/// root or the result is empty.
std::string normalize_path(std::string_view path);

std::string parent_dir(std::string_view path);  // "" for top-level files

struct RepoSnapshot {
    std::string repo_id;
    std::map<std::string, std::string> files;  // normalized path → content
    RepoMeta meta;

    /// Adds a file under its normalized path. Throws SchemaError if the normalized
    /// path is already present.
    void add_file(std::string_view path, std::string content);
};

/// Groups repo_file records by repo_id (records without a path are skipped).
std::vector<RepoSnapshot> snapshots_from_records(const std::vector<CorpusRecord>& records);

/// Reads a directory tree into a snapshot (test fixtures and local use).
RepoSnapshot snapshot_from_directory(const std::filesystem::path& root, std::string repo_id);

/// Read-only in-memory view of a snapshot.
class Vfs {
public:
    Vfs() = default;
    explicit Vfs(const RepoSnapshot& snapshot);

    bool exists(std::string_view path) const;
    const std::string* read(std::string_view path) const;
    /// Paths under a directory prefix ("a/" or "a"), sorted.
    std::vector<std::string> list(std::string_view prefix) const;
    /// Direct children files of a directory, sorted.
    std::vector<std::string> list_dir(std::string_view dir) const;
    bool is_dir(std::string_view dir) const;
    std::vector<std::string> with_extension(std::string_view ext) const;
    const std::vector<std::string>& paths() const noexcept { return paths_; }
    std::size_t size() const noexcept { return paths_.size(); }

private:
    std::map<std::string, const std::string*, std::less<>> files_;
    std::vector<std::string> paths_;
};

Vfs build_vfs(const RepoSnapshot& snapshot);

enum class ImportKind { relative, package_like, unresolvable_yet };
std::string_view to_string(ImportKind kind);

struct ImportRef {
    std::string importer;
    std::string raw;
    ImportKind kind = ImportKind::package_like;
    bool operator==(const ImportRef&) const = default;
};

enum class ExtractionBackend { syntax, pattern };

struct ExtractionResult {
    std::vector<ImportRef> imports;
    ExtractionBackend backend = ExtractionBackend::syntax;
    /// The syntax backend could not tokenize the file and the pattern backend was used.
    bool fell_back = false;
};

/// Token-level extractor: lexes the file with the language's string/comment rules
/// and recognizes import statements structurally, so imports inside comments or
/// strings are never reported.
std::vector<ImportRef> extract_imports_syntax(std::string_view path, std::string_view content,
                                              std::string_view language);

/// Per-language line patterns (the fallback backend).
std::vector<ImportRef> extract_imports_pattern(std::string_view path, std::string_view content,
                                               std::string_view language);

/// Uses the syntax backend when the file lexes cleanly, the pattern backend otherwise.
/// Throws UsageError for an unregistered language.
ExtractionResult extract_imports(std::string_view path, std::string_view content,
                                 std::string_view language);

/// Resolves an import to a file inside the repository, or nullopt for external modules.
///
/// Path-based search first: the specifier relative to the importer's directory,
/// then relative to the repository root, each tried verbatim, with every registered
/// extension, and as a directory with index files. Then naming conventions:
/// namespaced specifiers (a.b.c, a::b::c) become a/b/c under the importer's
/// directory, the root, and finally any directory whose suffix matches
/// (lexicographically smallest hit). The first hit wins.
std::optional<std::string> resolve_import(const ImportRef& ref, const Vfs& vfs, std::string_view language);

struct GraphNode {
    std::uint32_t id = 0;
    std::string path;
};

/// Edge (u, v) means "u is imported by v": dependency → dependent.
struct ImportGraph {
    bool directed = true;
    std::vector<GraphNode> nodes;  // nodes[i].id == i, paths strictly increasing
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // sorted, unique

    std::size_t size() const noexcept { return nodes.size(); }
    std::optional<std::uint32_t> find(std::string_view path) const;
};

/// Builds a graph from node paths and (dependency, dependent) path pairs. Ids are
/// the lexicographic ranks of the paths; duplicate edges collapse and self-loops drop.
/// Edge endpoints missing from `paths` are added as nodes.
ImportGraph make_graph(std::vector<std::string> paths,
                       const std::vector<std::pair<std::string, std::string>>& edges);

struct GraphBuildResult {
    ImportGraph graph;
    std::size_t imports_found = 0;
    std::size_t imports_resolved = 0;
    std::size_t files_fell_back = 0;
};

/// Import graph over the snapshot's files whose language (by extension) takes part
/// in import graphs and, if `languages` is non-empty, is listed there.
GraphBuildResult build_graph(const RepoSnapshot& snapshot, const std::vector<std::string>& languages = {});

}  // namespace corpuskit
