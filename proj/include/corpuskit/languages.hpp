#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corpuskit {

struct BlockComment {
    std::string open;
    std::string close;
};

struct CommentSyntax {
    std::vector<std::string> line_markers;
    std::vector<BlockComment> block_markers;
    /// Quote characters that open single-line string literals (comment markers inside are ignored).
    std::string string_quotes;
    /// Line markers only count at the start of a word (shell: `$#` is not a comment).
    bool line_marker_at_word_start = false;
};

/// How a language names other files in import statements.
struct ImportConventions {
    /// Extensions tried when resolving a specifier, in order (with leading dot).
    std::vector<std::string> extensions;
    /// File stems tried when a specifier names a directory (e.g. "__init__", "index", "mod").
    std::vector<std::string> index_names;
    /// Separator of namespaced specifiers ("." for Python/Java, "::" for Rust); empty if none.
    std::string namespace_separator;
    /// Drop trailing namespace segments until a file matches (specifiers naming items inside modules).
    bool strip_trailing_segments = false;
    /// Treat a directory hit as a package: resolve to its smallest source file (Go).
    bool directory_packages = false;
};

struct LanguageInfo {
    std::string tag;
    CommentSyntax comments;
    std::vector<std::string> file_extensions;
    /// Participates in repository import graphs.
    bool import_graph = false;
    ImportConventions imports;
};

/// The shipped comment-syntax and import-convention table.
///
/// Tags: python, java, javascript, typescript, c, cpp, go, rust, shell, sql, html,
/// xml, css, lua, ruby, kotlin, scala, csharp, swift, php. Aliases such as "py",
/// "c++", "js", "ts", "bash" map onto these.
const std::vector<LanguageInfo>& language_table();

/// Looks up a tag or alias (case-insensitive).
const LanguageInfo* find_language(std::string_view tag);

/// Like find_language but throws UsageError naming the tag.
const LanguageInfo& require_language(std::string_view tag);

/// Language for a path by extension, if any.
const LanguageInfo* language_for_path(std::string_view path);

/// Canonical tag, or nullopt for unknown languages.
std::optional<std::string> canonical_language(std::string_view tag);

}  // namespace corpuskit
