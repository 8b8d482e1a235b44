#include "corpuskit/languages.hpp"

#include <algorithm>
#include <cctype>

#include "corpuskit/errors.hpp"

namespace corpuskit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

CommentSyntax c_family() { return {{"//"}, {{"/*", "*/"}}, "\"'"}; }
CommentSyntax hash_style(bool word_start = false) { return {{"#"}, {}, "\"'", word_start}; }

std::vector<LanguageInfo> build_table() {
    std::vector<LanguageInfo> t;

    t.push_back({"python",
                 {{"#"}, {{"\"\"\"", "\"\"\""}, {"'''", "'''"}}, "\"'"},
                 {".py", ".pyi"},
                 true,
                 {{".py", ".pyi"}, {"__init__"}, ".", false, false}});
    t.push_back({"java", c_family(), {".java"}, true, {{".java"}, {}, ".", true, false}});
    t.push_back({"javascript",
                 {{"//"}, {{"/*", "*/"}}, "\"'`"},
                 {".js", ".jsx", ".mjs", ".cjs"},
                 true,
                 {{".js", ".jsx", ".mjs", ".cjs", ".ts", ".tsx"}, {"index"}, "", false, false}});
    t.push_back({"typescript",
                 {{"//"}, {{"/*", "*/"}}, "\"'`"},
                 {".ts", ".tsx", ".mts", ".cts"},
                 true,
                 {{".ts", ".tsx", ".d.ts", ".js", ".jsx"}, {"index"}, "", false, false}});
    t.push_back({"c", c_family(), {".c", ".h"}, true, {{".h", ".c"}, {}, "", false, false}});
    t.push_back({"cpp",
                 c_family(),
                 {".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx", ".h++", ".ipp"},
                 true,
                 {{".hpp", ".h", ".hh", ".hxx", ".cpp", ".cc", ".cxx"}, {}, "", false, false}});
    t.push_back({"go", {{"//"}, {{"/*", "*/"}}, "\"`"}, {".go"}, true, {{".go"}, {}, "", false, true}});
    // Rust: ' is a lifetime marker as often as a char literal, so only " opens strings.
    t.push_back({"rust", {{"//"}, {{"/*", "*/"}}, "\""}, {".rs"}, true, {{".rs"}, {"mod"}, "::", true, false}});
    t.push_back({"shell", hash_style(true), {".sh", ".bash", ".zsh", ".ksh"}, true, {{".sh", ".bash"}, {}, "", false, false}});

    t.push_back({"sql", {{"--"}, {{"/*", "*/"}}, "'\""}, {".sql"}, false, {}});
    t.push_back({"html", {{}, {{"<!--", "-->"}}, ""}, {".html", ".htm", ".xhtml"}, false, {}});
    t.push_back({"xml", {{}, {{"<!--", "-->"}}, ""}, {".xml", ".xsd", ".svg"}, false, {}});
    t.push_back({"css", {{}, {{"/*", "*/"}}, "\"'"}, {".css", ".scss", ".less"}, false, {}});
    t.push_back({"lua", {{"--"}, {{"--[[", "]]"}}, "\"'"}, {".lua"}, false, {}});
    t.push_back({"ruby", hash_style(), {".rb"}, false, {}});
    t.push_back({"kotlin", c_family(), {".kt", ".kts"}, false, {}});
    t.push_back({"scala", c_family(), {".scala"}, false, {}});
    t.push_back({"csharp", c_family(), {".cs"}, false, {}});
    t.push_back({"swift", c_family(), {".swift"}, false, {}});
    t.push_back({"php", {{"//", "#"}, {{"/*", "*/"}}, "\"'"}, {".php"}, false, {}});
    return t;
}

struct Alias {
    std::string_view alias;
    std::string_view tag;
};

constexpr Alias kAliases[] = {
    {"py", "python"},      {"python3", "python"},   {"js", "javascript"}, {"node", "javascript"},
    {"jsx", "javascript"}, {"ts", "typescript"},    {"tsx", "typescript"}, {"c++", "cpp"},
    {"cxx", "cpp"},        {"cc", "cpp"},           {"golang", "go"},     {"rs", "rust"},
    {"bash", "shell"},     {"sh", "shell"},         {"zsh", "shell"},     {"c#", "csharp"},
    {"cs", "csharp"},      {"kt", "kotlin"},        {"htm", "html"},      {"rb", "ruby"},
};

}  // namespace

const std::vector<LanguageInfo>& language_table() {
    static const std::vector<LanguageInfo> table = build_table();
    return table;
}

const LanguageInfo* find_language(std::string_view tag) {
    const std::string key = lower(tag);
    std::string_view name = key;
    for (const auto& a : kAliases) {
        if (a.alias == key) {
            name = a.tag;
            break;
        }
    }
    for (const auto& info : language_table()) {
        if (info.tag == name) return &info;
    }
    return nullptr;
}

const LanguageInfo& require_language(std::string_view tag) {
    if (const auto* info = find_language(tag)) return *info;
    throw UsageError("unknown language '" + std::string(tag) + "'");
}

const LanguageInfo* language_for_path(std::string_view path) {
    const auto slash = path.rfind('/');
    const std::string name = lower(slash == std::string_view::npos ? path : path.substr(slash + 1));
    // Longest matching extension wins (".d.ts" over ".ts").
    const LanguageInfo* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& info : language_table()) {
        for (const auto& ext : info.file_extensions) {
            if (name.size() > ext.size() && name.ends_with(ext) && ext.size() > best_len) {
                best = &info;
                best_len = ext.size();
            }
        }
    }
    return best;
}

std::optional<std::string> canonical_language(std::string_view tag) {
    if (const auto* info = find_language(tag)) return info->tag;
    return std::nullopt;
}

}  // namespace corpuskit
