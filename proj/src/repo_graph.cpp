#include "corpuskit/repo_graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "corpuskit/errors.hpp"
#include "corpuskit/languages.hpp"
#include "corpuskit/utf8.hpp"

namespace corpuskit {

// ---------------------------------------------------------------------------
// Paths and snapshots

std::string normalize_path(std::string_view path) {
    std::vector<std::string_view> parts;
    std::string unified(path);
    std::replace(unified.begin(), unified.end(), '\\', '/');
    std::string_view s = unified;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto slash = s.find('/', start);
        if (slash == std::string_view::npos) slash = s.size();
        const auto part = s.substr(start, slash - start);
        start = slash + 1;
        if (part.empty() || part == ".") continue;
        if (part == "..") {
            if (parts.empty()) throw ValidationError("path", "'" + std::string(path) + "' escapes the repository root");
            parts.pop_back();
            continue;
        }
        parts.push_back(part);
    }
    if (parts.empty()) throw ValidationError("path", "'" + std::string(path) + "' is empty after normalization");
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '/';
        out += parts[i];
    }
    return out;
}

std::string parent_dir(std::string_view path) {
    const auto slash = path.rfind('/');
    return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

void RepoSnapshot::add_file(std::string_view path, std::string content) {
    auto normalized = normalize_path(path);
    if (!files.emplace(normalized, std::move(content)).second) {
        throw SchemaError("repository " + repo_id + ": duplicate path '" + normalized + "'");
    }
}

std::vector<RepoSnapshot> snapshots_from_records(const std::vector<CorpusRecord>& records) {
    std::map<std::string, RepoSnapshot> repos;
    for (const auto& r : records) {
        if (r.kind != RecordKind::repo_file || !r.path) continue;
        const std::string repo = r.repo_id.value_or("");
        auto& snap = repos[repo];
        snap.repo_id = repo;
        snap.add_file(*r.path, r.content);
        if (auto v = r.meta_int("stars")) snap.meta.stars = *v;
        if (auto v = r.meta_int("forks")) snap.meta.forks = *v;
        if (auto v = r.meta_int("file_count")) snap.meta.file_count = *v;
    }
    std::vector<RepoSnapshot> out;
    out.reserve(repos.size());
    for (auto& [id, snap] : repos) {
        if (snap.meta.file_count == 0) snap.meta.file_count = static_cast<std::int64_t>(snap.files.size());
        out.push_back(std::move(snap));
    }
    return out;
}

RepoSnapshot snapshot_from_directory(const std::filesystem::path& root, std::string repo_id) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
    RepoSnapshot snap;
    snap.repo_id = std::move(repo_id);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot read " + file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        snap.add_file(fs::relative(file, root).generic_string(), utf8::repair(buf.str()).text);
    }
    snap.meta.file_count = static_cast<std::int64_t>(snap.files.size());
    return snap;
}

// ---------------------------------------------------------------------------
// Vfs

Vfs::Vfs(const RepoSnapshot& snapshot) {
    for (const auto& [path, content] : snapshot.files) {
        files_.emplace(path, &content);
        paths_.push_back(path);
    }
}

bool Vfs::exists(std::string_view path) const { return files_.find(path) != files_.end(); }

const std::string* Vfs::read(std::string_view path) const {
    auto it = files_.find(path);
    return it == files_.end() ? nullptr : it->second;
}

std::vector<std::string> Vfs::list(std::string_view prefix) const {
    std::string p(prefix);
    if (!p.empty() && p.back() != '/') p += '/';
    std::vector<std::string> out;
    for (auto it = files_.lower_bound(p); it != files_.end() && it->first.starts_with(p); ++it) {
        out.push_back(it->first);
    }
    return out;
}

std::vector<std::string> Vfs::list_dir(std::string_view dir) const {
    std::vector<std::string> out;
    for (auto& path : list(dir)) {
        const auto rest = std::string_view(path).substr(dir.empty() ? 0 : dir.size() + 1);
        if (rest.find('/') == std::string_view::npos) out.push_back(path);
    }
    return out;
}

bool Vfs::is_dir(std::string_view dir) const { return !dir.empty() && !list(dir).empty(); }

std::vector<std::string> Vfs::with_extension(std::string_view ext) const {
    std::vector<std::string> out;
    for (const auto& p : paths_) {
        if (p.size() > ext.size() && std::string_view(p).ends_with(ext)) out.push_back(p);
    }
    return out;
}

Vfs build_vfs(const RepoSnapshot& snapshot) {
    for (const auto& [path, content] : snapshot.files) {
        if (normalize_path(path) != path) throw SchemaError("snapshot path '" + path + "' is not normalized");
    }
    return Vfs(snapshot);
}

std::string_view to_string(ImportKind kind) {
    switch (kind) {
        case ImportKind::relative: return "relative";
        case ImportKind::package_like: return "package-like";
        case ImportKind::unresolvable_yet: return "unresolvable-yet";
    }
    return "package-like";
}

// ---------------------------------------------------------------------------
// Import extraction: shared helpers

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || static_cast<unsigned char>(c) >= 0x80;
}

ImportKind classify(std::string_view language, std::string_view raw, bool angle = false) {
    if (raw.find('$') != std::string_view::npos && language == "shell") return ImportKind::unresolvable_yet;
    if (language == "python") return raw.starts_with('.') ? ImportKind::relative : ImportKind::package_like;
    if (language == "c" || language == "cpp") return angle ? ImportKind::package_like : ImportKind::relative;
    if (language == "javascript" || language == "typescript" || language == "go") {
        return raw.starts_with("./") || raw.starts_with("../") || raw.starts_with('/') ? ImportKind::relative
                                                                                      : ImportKind::package_like;
    }
    if (language == "rust") {
        return raw.find("::") == std::string_view::npos ? ImportKind::relative : ImportKind::package_like;
    }
    if (language == "shell") return ImportKind::relative;
    return ImportKind::package_like;
}

ImportRef make_ref(std::string_view path, std::string_view language, std::string raw, bool angle = false) {
    ImportRef ref;
    ref.importer = std::string(path);
    ref.kind = classify(language, raw, angle);
    ref.raw = std::move(raw);
    return ref;
}

// Expands a Rust use-tree ("a::{b, c::{d, e}}") into flat paths.
void expand_use_tree(std::string_view tree, const std::string& prefix, std::vector<std::string>& out) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    tree = trim(tree);
    if (tree.empty()) return;
    const auto brace = tree.find('{');
    if (brace == std::string_view::npos) {
        // Drop an `as alias` suffix.
        std::string_view path = tree;
        if (auto as = path.find(" as "); as != std::string_view::npos) path = trim(path.substr(0, as));
        std::string full = prefix.empty() ? std::string(path) : prefix + "::" + std::string(path);
        if (full.ends_with("::self")) full.resize(full.size() - 6);
        if (full.ends_with("::*")) full.resize(full.size() - 3);
        if (!full.empty()) out.push_back(std::move(full));
        return;
    }
    std::string head(trim(tree.substr(0, brace)));
    if (head.ends_with("::")) head.resize(head.size() - 2);
    const std::string next_prefix = prefix.empty() ? head : (head.empty() ? prefix : prefix + "::" + head);
    const auto close = tree.rfind('}');
    const auto inner = tree.substr(brace + 1, (close == std::string_view::npos ? tree.size() : close) - brace - 1);
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
        if (i == inner.size() || (inner[i] == ',' && depth == 0)) {
            const auto item = trim(inner.substr(start, i - start));
            if (item == "self") {
                if (!next_prefix.empty()) out.push_back(next_prefix);
            } else {
                expand_use_tree(item, next_prefix, out);
            }
            start = i + 1;
        } else if (inner[i] == '{') {
            ++depth;
        } else if (inner[i] == '}') {
            --depth;
        }
    }
}

std::string shell_unquote(std::string_view word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const char c = word[i];
        if (c == '"' || c == '\'') continue;
        if (c == '\\' && i + 1 < word.size()) {
            out += word[++i];
            continue;
        }
        out += c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Syntax backend: tokenizer

enum class Tok { ident, string, punct, newline };

struct Token {
    Tok kind;
    std::string text;  // identifier, punctuation, or string body without quotes
    std::size_t offset = 0;
};

std::optional<std::vector<Token>> tokenize(std::string_view src, const LanguageInfo& lang) {
    const CommentSyntax& syntax = lang.comments;
    const bool python = lang.tag == "python";
    const std::string multiline_quotes = lang.tag == "javascript" || lang.tag == "typescript" || lang.tag == "go" ? "`"
                                         : lang.tag == "rust"                                                    ? "\""
                                                                                                                 : "";
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            tokens.push_back({Tok::newline, "\n", i});
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // Longest block opener first.
        const BlockComment* block = nullptr;
        for (const auto& b : syntax.block_markers) {
            if (src.substr(i, b.open.size()) == b.open && (!block || b.open.size() > block->open.size())) block = &b;
        }
        if (block) {
            const auto close = src.find(block->close, i + block->open.size());
            if (close == std::string_view::npos) return std::nullopt;
            if (python) {
                const auto body_start = i + block->open.size();
                tokens.push_back({Tok::string, std::string(src.substr(body_start, close - body_start)), i});
            } else {
                // Keep line structure for preprocessor recognition.
                for (auto k = i; k < close; ++k) {
                    if (src[k] == '\n') tokens.push_back({Tok::newline, "\n", k});
                }
            }
            i = close + block->close.size();
            continue;
        }
        bool line_comment = false;
        for (const auto& m : syntax.line_markers) {
            if (src.substr(i, m.size()) == m) line_comment = true;
        }
        if (line_comment) {
            const auto nl = src.find('\n', i);
            i = nl == std::string_view::npos ? src.size() : nl;
            continue;
        }
        if (syntax.string_quotes.find(c) != std::string::npos) {
            const bool multiline = multiline_quotes.find(c) != std::string::npos;
            std::string body;
            std::size_t j = i + 1;
            bool closed = false;
            for (; j < src.size(); ++j) {
                if (src[j] == '\\' && c != '`' && j + 1 < src.size()) {
                    body += src[j];
                    body += src[++j];
                    continue;
                }
                if (src[j] == '\n' && !multiline) break;
                if (src[j] == c) {
                    closed = true;
                    break;
                }
                body += src[j];
            }
            if (!closed) return std::nullopt;
            tokens.push_back({Tok::string, std::move(body), i});
            i = j + 1;
            continue;
        }
        if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < src.size() && is_ident_char(src[j])) ++j;
            tokens.push_back({Tok::ident, std::string(src.substr(i, j - i)), i});
            i = j;
            continue;
        }
        if (c == ':' && i + 1 < src.size() && src[i + 1] == ':') {
            tokens.push_back({Tok::punct, "::", i});
            i += 2;
            continue;
        }
        tokens.push_back({Tok::punct, std::string(1, c), i});
        ++i;
    }
    return tokens;
}

bool is(const Token& t, Tok kind, std::string_view text) { return t.kind == kind && t.text == text; }

// Index of the next token that is not a newline, starting at i.
std::size_t skip_newlines(const std::vector<Token>& t, std::size_t i) {
    while (i < t.size() && t[i].kind == Tok::newline) ++i;
    return i;
}

// ---------------------------------------------------------------------------
// Syntax backend: recognizers

std::vector<ImportRef> python_imports(std::string_view path, const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    int depth = 0;
    bool stmt_start = true;
    auto dotted = [&](std::size_t& i) {
        std::string name;
        while (i < t.size() && (is(t[i], Tok::punct, ".") || (t[i].kind == Tok::ident && t[i].text != "import" && (name.empty() || name.back() == '.')))) {
            name += t[i].text;
            ++i;
        }
        return name;
    };
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& tok = t[i];
        if (tok.kind == Tok::newline) {
            if (depth == 0) stmt_start = true;
            continue;
        }
        if (tok.kind == Tok::punct) {
            if (tok.text == "(" || tok.text == "[" || tok.text == "{") ++depth;
            if (tok.text == ")" || tok.text == "]" || tok.text == "}") depth = std::max(0, depth - 1);
            stmt_start = depth == 0 && tok.text == ";";
            continue;
        }
        if (!stmt_start) continue;
        stmt_start = false;
        if (is(tok, Tok::ident, "import")) {
            std::size_t j = i + 1;
            while (j < t.size() && t[j].kind != Tok::newline && !is(t[j], Tok::punct, ";")) {
                auto name = dotted(j);
                if (!name.empty()) out.push_back(make_ref(path, "python", name));
                if (j < t.size() && is(t[j], Tok::ident, "as")) j += 2;
                if (j < t.size() && is(t[j], Tok::punct, ",")) {
                    ++j;
                    continue;
                }
                if (j < t.size() && t[j].kind != Tok::newline && !is(t[j], Tok::punct, ";")) break;
            }
            i = j - 1;
        } else if (is(tok, Tok::ident, "from")) {
            std::size_t j = i + 1;
            auto module = dotted(j);
            if (module.empty() || j >= t.size() || !is(t[j], Tok::ident, "import")) continue;
            ++j;
            const bool dots_only = module.find_first_not_of('.') == std::string::npos;
            if (!dots_only) {
                out.push_back(make_ref(path, "python", module));
                i = j - 1;
                continue;
            }
            // `from . import a, b`: each name is a sibling module.
            bool paren = j < t.size() && is(t[j], Tok::punct, "(");
            if (paren) ++j;
            while (j < t.size()) {
                j = paren ? skip_newlines(t, j) : j;
                if (j >= t.size()) break;
                if (t[j].kind == Tok::ident) {
                    out.push_back(make_ref(path, "python", module + t[j].text));
                    ++j;
                    if (j < t.size() && is(t[j], Tok::ident, "as")) j += 2;
                    j = paren ? skip_newlines(t, j) : j;
                    if (j < t.size() && is(t[j], Tok::punct, ",")) {
                        ++j;
                        continue;
                    }
                }
                break;
            }
            if (paren) {
                while (j < t.size() && !is(t[j], Tok::punct, ")")) ++j;
                i = j;
            } else {
                i = j - 1;
            }
        }
    }
    return out;
}

std::vector<ImportRef> java_imports(std::string_view path, const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    int depth = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (is(t[i], Tok::punct, "{")) ++depth;
        if (is(t[i], Tok::punct, "}")) depth = std::max(0, depth - 1);
        if (depth != 0 || !is(t[i], Tok::ident, "import")) continue;
        if (i > 0 && is(t[i - 1], Tok::punct, ".")) continue;
        std::size_t j = skip_newlines(t, i + 1);
        if (j < t.size() && is(t[j], Tok::ident, "static")) j = skip_newlines(t, j + 1);
        std::string name;
        while (j < t.size() && !is(t[j], Tok::punct, ";")) {
            if (t[j].kind == Tok::newline) {
                ++j;
                continue;
            }
            if (t[j].kind == Tok::ident || is(t[j], Tok::punct, ".") || is(t[j], Tok::punct, "*")) {
                name += t[j].text;
                ++j;
            } else {
                break;
            }
        }
        if (j < t.size() && is(t[j], Tok::punct, ";") && !name.empty()) out.push_back(make_ref(path, "java", name));
        i = j;
    }
    return out;
}

std::vector<ImportRef> js_imports(std::string_view path, std::string_view language, const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    auto member_access = [&](std::size_t i) { return i > 0 && is(t[i - 1], Tok::punct, "."); };
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& tok = t[i];
        if (tok.kind != Tok::ident || member_access(i)) continue;
        if (tok.text == "require") {
            std::size_t j = skip_newlines(t, i + 1);
            if (j + 2 < t.size() && is(t[j], Tok::punct, "(") && t[j + 1].kind == Tok::string &&
                is(t[j + 2], Tok::punct, ")")) {
                out.push_back(make_ref(path, language, t[j + 1].text));
                i = j + 2;
            }
            continue;
        }
        if (tok.text != "import" && tok.text != "export") continue;
        std::size_t j = skip_newlines(t, i + 1);
        if (j >= t.size()) break;
        if (tok.text == "import" && (is(t[j], Tok::punct, "(") || is(t[j], Tok::punct, "."))) continue;  // dynamic / import.meta
        if (tok.text == "import" && t[j].kind == Tok::string) {
            out.push_back(make_ref(path, language, t[j].text));
            i = j;
            continue;
        }
        // Scan the clause up to `from "x"`, giving up at a statement boundary.
        int depth = 0;
        for (std::size_t k = j; k < t.size() && k < j + 512; ++k) {
            if (is(t[k], Tok::punct, "{")) ++depth;
            else if (is(t[k], Tok::punct, "}")) --depth;
            else if (is(t[k], Tok::punct, ";") || is(t[k], Tok::punct, "=") || is(t[k], Tok::punct, "(")) break;
            else if (depth == 0 && t[k].kind == Tok::ident && k > j &&
                     (t[k].text == "function" || t[k].text == "class" || t[k].text == "const" || t[k].text == "let" ||
                      t[k].text == "var" || t[k].text == "import" || t[k].text == "export")) {
                break;
            } else if (depth == 0 && is(t[k], Tok::ident, "from")) {
                const auto s = skip_newlines(t, k + 1);
                if (s < t.size() && t[s].kind == Tok::string) {
                    out.push_back(make_ref(path, language, t[s].text));
                    i = s;
                }
                break;
            }
        }
    }
    return out;
}

std::vector<ImportRef> c_imports(std::string_view path, std::string_view language, std::string_view src,
                                 const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    bool line_start = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind == Tok::newline) {
            line_start = true;
            continue;
        }
        const bool at_start = line_start;
        line_start = false;
        if (!at_start || !is(t[i], Tok::punct, "#")) continue;
        if (i + 2 >= t.size() || !is(t[i + 1], Tok::ident, "include")) continue;
        const auto& arg = t[i + 2];
        if (arg.kind == Tok::string && src[arg.offset] == '"') {
            out.push_back(make_ref(path, language, arg.text, false));
        } else if (is(arg, Tok::punct, "<")) {
            const auto close = src.find('>', arg.offset);
            const auto nl = src.find('\n', arg.offset);
            if (close != std::string_view::npos && close < nl) {
                out.push_back(make_ref(path, language, std::string(src.substr(arg.offset + 1, close - arg.offset - 1)), true));
            }
        }
    }
    return out;
}

std::vector<ImportRef> go_imports(std::string_view path, const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    auto spec = [&](std::size_t& j) {
        // [alias | . | _] "path"
        if (j < t.size() && (t[j].kind == Tok::ident || is(t[j], Tok::punct, "."))) ++j;
        if (j < t.size() && t[j].kind == Tok::string) {
            out.push_back(make_ref(path, "go", t[j].text));
            ++j;
            return true;
        }
        return false;
    };
    int depth = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (is(t[i], Tok::punct, "{")) ++depth;
        if (is(t[i], Tok::punct, "}")) depth = std::max(0, depth - 1);
        if (depth != 0 || !is(t[i], Tok::ident, "import")) continue;
        std::size_t j = i + 1;
        if (j < t.size() && is(t[j], Tok::punct, "(")) {
            ++j;
            while (j < t.size() && !is(t[j], Tok::punct, ")")) {
                j = skip_newlines(t, j);
                if (j < t.size() && is(t[j], Tok::punct, ")")) break;
                if (!spec(j)) ++j;
            }
            i = j;
        } else {
            spec(j);
            i = j - 1;
        }
    }
    return out;
}

std::vector<ImportRef> rust_imports(std::string_view path, std::string_view src, const std::vector<Token>& t) {
    std::vector<ImportRef> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (is(t[i], Tok::ident, "mod")) {
            if (i + 2 < t.size() && t[i + 1].kind == Tok::ident && is(t[i + 2], Tok::punct, ";")) {
                out.push_back(make_ref(path, "rust", t[i + 1].text));
                i += 2;
            }
        } else if (is(t[i], Tok::ident, "use")) {
            std::size_t j = i + 1;
            while (j < t.size() && !is(t[j], Tok::punct, ";")) ++j;
            if (j >= t.size()) break;
            const auto begin = t[i].offset + 3;
            std::string tree(src.substr(begin, t[j].offset - begin));
            std::replace(tree.begin(), tree.end(), '\n', ' ');
            std::vector<std::string> paths;
            expand_use_tree(tree, "", paths);
            for (auto& p : paths) {
                p.erase(std::remove_if(p.begin(), p.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                        p.end());
                if (p.starts_with("::")) p.erase(0, 2);
                if (!p.empty()) out.push_back(make_ref(path, "rust", p));
            }
            i = j;
        }
    }
    return out;
}

// Shell: split into commands on newline, ';', '&&', '||', '|' and look for source / '.'.
std::optional<std::vector<ImportRef>> shell_imports(std::string_view path, std::string_view src) {
    std::vector<ImportRef> out;
    std::vector<std::string> words;
    std::string word;
    bool in_word = false;
    auto end_word = [&] {
        if (in_word) words.push_back(word);
        word.clear();
        in_word = false;
    };
    auto end_command = [&] {
        end_word();
        if (words.size() >= 2 && (words[0] == "source" || words[0] == ".")) {
            out.push_back(make_ref(path, "shell", shell_unquote(words[1])));
        }
        words.clear();
    };
    for (std::size_t i = 0; i < src.size(); ++i) {
        const char c = src[i];
        if (c == '\\' && i + 1 < src.size()) {
            if (src[i + 1] == '\n') {
                ++i;
                end_word();
                continue;
            }
            word += c;
            word += src[++i];
            in_word = true;
            continue;
        }
        if (c == '"' || c == '\'') {
            const auto close = src.find(c, i + 1);
            if (close == std::string_view::npos) return std::nullopt;
            word.append(src.substr(i, close - i + 1));
            in_word = true;
            i = close;
            continue;
        }
        if (c == '#' && !in_word) {
            const auto nl = src.find('\n', i);
            i = (nl == std::string_view::npos ? src.size() : nl) - 1;
            continue;
        }
        if (c == '\n' || c == ';' || c == '|' || c == '&') {
            end_command();
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            end_word();
            continue;
        }
        word += c;
        in_word = true;
    }
    end_command();
    return out;
}

}  // namespace

std::vector<ImportRef> extract_imports_syntax(std::string_view path, std::string_view content, std::string_view language) {
    const auto& lang = require_language(language);
    if (lang.tag == "shell") {
        auto refs = shell_imports(path, content);
        if (!refs) throw ParseError("shell source does not tokenize");
        return *refs;
    }
    auto tokens = tokenize(content, lang);
    if (!tokens) throw ParseError(std::string(path) + ": source does not tokenize");
    if (lang.tag == "python") return python_imports(path, *tokens);
    if (lang.tag == "java") return java_imports(path, *tokens);
    if (lang.tag == "javascript" || lang.tag == "typescript") return js_imports(path, lang.tag, *tokens);
    if (lang.tag == "c" || lang.tag == "cpp") return c_imports(path, lang.tag, content, *tokens);
    if (lang.tag == "go") return go_imports(path, *tokens);
    if (lang.tag == "rust") return rust_imports(path, content, *tokens);
    return {};
}

// ---------------------------------------------------------------------------
// Pattern backend

namespace {

struct Match {
    std::size_t offset;
    ImportRef ref;
};

std::vector<std::string> split_names(std::string_view list) {
    std::vector<std::string> names;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto comma = list.find(',', start);
        if (comma == std::string_view::npos) comma = list.size();
        std::string_view item = list.substr(start, comma - start);
        start = comma + 1;
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        auto sp = item.find_first_of(" \t\r");
        if (sp != std::string_view::npos) item = item.substr(0, sp);  // drops "as alias"
        if (!item.empty()) names.emplace_back(item);
    }
    return names;
}

}  // namespace

}  // namespace corpuskit

#include <boost/regex.hpp>

namespace corpuskit {

namespace {

std::vector<Match> regex_all(std::string_view src, const boost::regex& re) {
    std::vector<Match> out;
    boost::cregex_iterator it(src.data(), src.data() + src.size(), re);
    for (boost::cregex_iterator end; it != end; ++it) {
        Match m{static_cast<std::size_t>((*it)[0].first - src.data()), {}};
        // Use the first participating capture group as the specifier.
        for (std::size_t g = 1; g < it->size(); ++g) {
            if ((*it)[g].matched) {
                m.ref.raw = (*it)[g].str();
                m.ref.kind = g == 1 ? ImportKind::relative : ImportKind::package_like;  // group hint, reclassified later
                break;
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

std::vector<ImportRef> extract_imports_pattern(std::string_view path, std::string_view content, std::string_view language) {
    const auto& lang = require_language(language);
    const std::string tag = lang.tag;
    std::vector<ImportRef> out;

    if (tag == "python") {
        static const boost::regex import_re(R"(^[ \t]*import[ \t]+([^#\n;]+))");
        static const boost::regex from_re(R"(^[ \t]*from[ \t]+(\.*[\w.]*)[ \t]+import[ \t]+(\([^)]*\)|[^#\n;]+))");
        std::vector<Match> hits;
        for (auto& m : regex_all(content, import_re)) {
            for (auto& name : split_names(m.ref.raw)) hits.push_back({m.offset, make_ref(path, tag, name)});
        }
        boost::cregex_iterator it(content.data(), content.data() + content.size(), from_re);
        for (boost::cregex_iterator end; it != end; ++it) {
            const auto offset = static_cast<std::size_t>((*it)[0].first - content.data());
            const std::string module = (*it)[1].str();
            if (module.find_first_not_of('.') != std::string::npos) {
                hits.push_back({offset, make_ref(path, tag, module)});
                continue;
            }
            std::string names = (*it)[2].str();
            names.erase(std::remove(names.begin(), names.end(), '('), names.end());
            names.erase(std::remove(names.begin(), names.end(), ')'), names.end());
            std::replace(names.begin(), names.end(), '\n', ' ');
            for (auto& name : split_names(names)) hits.push_back({offset, make_ref(path, tag, module + name)});
        }
        std::stable_sort(hits.begin(), hits.end(), [](const Match& a, const Match& b) { return a.offset < b.offset; });
        for (auto& h : hits) out.push_back(std::move(h.ref));
        return out;
    }
    if (tag == "java") {
        static const boost::regex re(R"(^[ \t]*import[ \t]+(?:static[ \t]+)?([\w.]+(?:\.\*)?)[ \t]*;)");
        for (auto& m : regex_all(content, re)) out.push_back(make_ref(path, tag, m.ref.raw));
        return out;
    }
    if (tag == "javascript" || tag == "typescript") {
        static const boost::regex re(
            R"((?<![\w.$])(?:import[ \t]*(?:[^'"`;()=]*?[ \t\n]from[ \t]*)?['"]([^'"\n]+)['"]|export[ \t]+[^'"`;()=]*?[ \t\n]from[ \t]*['"]([^'"\n]+)['"]|require[ \t]*\([ \t]*['"]([^'"\n]+)['"][ \t]*\)))");
        for (auto& m : regex_all(content, re)) out.push_back(make_ref(path, tag, m.ref.raw));
        return out;
    }
    if (tag == "c" || tag == "cpp") {
        static const boost::regex re(R"re(^[ \t]*#[ \t]*include[ \t]*(?:"([^"\n]+)"|<([^>\n]+)>))re");
        for (auto& m : regex_all(content, re)) {
            const bool angle = m.ref.kind == ImportKind::package_like;
            out.push_back(make_ref(path, tag, m.ref.raw, angle));
        }
        return out;
    }
    if (tag == "go") {
        static const boost::regex single(R"re(^[ \t]*import[ \t]+(?:[\w.]+[ \t]+)?["`]([^"`\n]+)["`])re");
        static const boost::regex block(R"(^[ \t]*import[ \t]*\(([^)]*)\))");
        static const boost::regex item(R"re(^[ \t]*(?:[\w.]+[ \t]+)?["`]([^"`\n]+)["`])re");
        std::vector<Match> hits = regex_all(content, single);
        boost::cregex_iterator it(content.data(), content.data() + content.size(), block);
        for (boost::cregex_iterator end; it != end; ++it) {
            const auto base = static_cast<std::size_t>((*it)[1].first - content.data());
            const std::string_view body(&*(*it)[1].first, static_cast<std::size_t>((*it)[1].length()));
            for (auto& m : regex_all(body, item)) hits.push_back({base + m.offset, std::move(m.ref)});
        }
        std::stable_sort(hits.begin(), hits.end(), [](const Match& a, const Match& b) { return a.offset < b.offset; });
        for (auto& h : hits) out.push_back(make_ref(path, tag, h.ref.raw));
        return out;
    }
    if (tag == "rust") {
        static const boost::regex re(
            R"(^[ \t]*(?:pub(?:\([^)]*\))?[ \t]+)?(?:mod[ \t]+(\w+)[ \t]*;|use[ \t]+([^;]+);))");
        for (auto& m : regex_all(content, re)) {
            if (m.ref.kind == ImportKind::relative) {
                out.push_back(make_ref(path, tag, m.ref.raw));
                continue;
            }
            std::string tree = m.ref.raw;
            std::replace(tree.begin(), tree.end(), '\n', ' ');
            std::vector<std::string> paths;
            expand_use_tree(tree, "", paths);
            for (auto& p : paths) {
                p.erase(std::remove_if(p.begin(), p.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                        p.end());
                if (p.starts_with("::")) p.erase(0, 2);
                if (!p.empty()) out.push_back(make_ref(path, tag, p));
            }
        }
        return out;
    }
    if (tag == "shell") {
        static const boost::regex re(R"re(^[ \t]*(?:source|\.)[ \t]+("[^"\n]*"|'[^'\n]*'|[^\s;&|#]+))re");
        for (auto& m : regex_all(content, re)) out.push_back(make_ref(path, tag, shell_unquote(m.ref.raw)));
        return out;
    }
    return out;
}

ExtractionResult extract_imports(std::string_view path, std::string_view content, std::string_view language) {
    require_language(language);
    ExtractionResult result;
    try {
        result.imports = extract_imports_syntax(path, content, language);
        result.backend = ExtractionBackend::syntax;
    } catch (const ParseError&) {
        result.imports = extract_imports_pattern(path, content, language);
        result.backend = ExtractionBackend::pattern;
        result.fell_back = true;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

std::string join(std::string_view dir, std::string_view rel) {
    if (dir.empty()) return std::string(rel);
    return std::string(dir) + "/" + std::string(rel);
}

std::optional<std::string> try_normalize(std::string_view p) {
    try {
        return normalize_path(p);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

// Tries `base` as a file, with extensions, and as a directory with index files.
std::optional<std::string> probe(const Vfs& vfs, std::string_view base, const ImportConventions& conv) {
    auto norm = try_normalize(base);
    if (!norm) return std::nullopt;
    if (vfs.exists(*norm)) return norm;
    for (const auto& ext : conv.extensions) {
        if (auto p = *norm + ext; vfs.exists(p)) return p;
    }
    for (const auto& index : conv.index_names) {
        for (const auto& ext : conv.extensions) {
            if (auto p = *norm + "/" + index + ext; vfs.exists(p)) return p;
        }
    }
    if (conv.directory_packages) {
        for (const auto& file : vfs.list_dir(*norm)) {
            for (const auto& ext : conv.extensions) {
                if (std::string_view(file).ends_with(ext) && !std::string_view(file).ends_with("_test.go")) return file;
            }
        }
    }
    return std::nullopt;
}

// Smallest VFS path that equals `rel` (with extension/index variants) or ends with "/" + variant.
std::optional<std::string> probe_suffix(const Vfs& vfs, std::string_view rel, const ImportConventions& conv) {
    std::vector<std::string> variants{std::string(rel)};
    for (const auto& ext : conv.extensions) variants.push_back(std::string(rel) + ext);
    for (const auto& index : conv.index_names) {
        for (const auto& ext : conv.extensions) variants.push_back(std::string(rel) + "/" + index + ext);
    }
    std::optional<std::string> best;
    for (const auto& path : vfs.paths()) {
        for (const auto& v : variants) {
            if (path == v || (path.size() > v.size() && std::string_view(path).ends_with(v) &&
                              path[path.size() - v.size() - 1] == '/')) {
                if (!best || path < *best) best = path;
                break;
            }
        }
    }
    return best;
}

std::vector<std::string> split_on(std::string_view s, std::string_view sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + sep.size();
    }
    return parts;
}

std::string join_segments(const std::vector<std::string>& segs, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += '/';
        out += segs[i];
    }
    return out;
}

// Directory that holds the Rust crate root (lib.rs / main.rs) governing `importer`.
std::string rust_crate_root(const Vfs& vfs, std::string_view importer) {
    std::string dir = parent_dir(importer);
    while (true) {
        if (vfs.exists(join(dir, "lib.rs")) || vfs.exists(join(dir, "main.rs"))) return dir;
        if (dir.empty()) break;
        dir = parent_dir(dir);
    }
    return vfs.is_dir("src") ? "src" : "";
}

// Directory in which `mod x;` declared by `importer` looks for x.
std::string rust_module_dir(std::string_view importer) {
    const std::string dir = parent_dir(importer);
    const auto slash = importer.rfind('/');
    const auto file = importer.substr(slash == std::string_view::npos ? 0 : slash + 1);
    if (file == "lib.rs" || file == "main.rs" || file == "mod.rs") return dir;
    return join(dir, file.substr(0, file.size() - 3));
}

std::optional<std::string> resolve_rust(const ImportRef& ref, const Vfs& vfs, const ImportConventions& conv) {
    if (ref.kind == ImportKind::relative) {  // mod x;
        if (auto p = probe(vfs, join(rust_module_dir(ref.importer), ref.raw), conv)) return p;
        return probe(vfs, join(parent_dir(ref.importer), ref.raw), conv);
    }
    auto segs = split_on(ref.raw, "::");
    std::string base;
    if (segs.front() == "crate") {
        base = rust_crate_root(vfs, ref.importer);
        segs.erase(segs.begin());
    } else if (segs.front() == "self") {
        base = rust_module_dir(ref.importer);
        segs.erase(segs.begin());
    } else if (segs.front() == "super") {
        base = parent_dir(rust_module_dir(ref.importer));
        while (!segs.empty() && segs.front() == "super") {
            segs.erase(segs.begin());
            if (!segs.empty() && segs.front() == "super") base = parent_dir(base);
        }
    } else {
        base = rust_crate_root(vfs, ref.importer);
    }
    for (std::size_t n = segs.size(); n >= 1; --n) {
        if (auto p = probe(vfs, join(base, join_segments(segs, n)), conv)) return p;
    }
    return std::nullopt;
}

std::optional<std::string> resolve_go(const ImportRef& ref, const Vfs& vfs, const ImportConventions& conv) {
    if (ref.kind == ImportKind::relative) return probe(vfs, join(parent_dir(ref.importer), ref.raw), conv);
    // Module-local imports carry the module path declared in go.mod.
    for (const auto& gomod : vfs.paths()) {
        if (gomod != "go.mod" && !std::string_view(gomod).ends_with("/go.mod")) continue;
        const std::string& text = *vfs.read(gomod);
        static const boost::regex module_re(R"(^[ \t]*module[ \t]+(\S+))");
        boost::smatch m;
        if (!boost::regex_search(text, m, module_re)) continue;
        const std::string module = m[1].str();
        const std::string_view raw = ref.raw;
        if (raw == module || (raw.starts_with(module) && raw.size() > module.size() && raw[module.size()] == '/')) {
            const std::string rest(raw.substr(std::min(raw.size(), module.size() + 1)));
            if (auto p = probe(vfs, join(parent_dir(gomod), rest), conv)) return p;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> resolve_import(const ImportRef& ref, const Vfs& vfs, std::string_view language) {
    const auto& lang = require_language(language);
    const auto& conv = lang.imports;
    if (ref.kind == ImportKind::unresolvable_yet || ref.raw.empty()) return std::nullopt;
    const std::string dir = parent_dir(ref.importer);

    if (lang.tag == "rust") return resolve_rust(ref, vfs, conv);
    if (lang.tag == "go") return resolve_go(ref, vfs, conv);
    if ((lang.tag == "javascript" || lang.tag == "typescript") && ref.kind == ImportKind::package_like) {
        return std::nullopt;  // bare specifiers name installed packages
    }

    if (lang.tag == "python" && ref.raw.starts_with('.')) {
        const auto dots = ref.raw.find_first_not_of('.');
        const std::size_t levels = dots == std::string::npos ? ref.raw.size() : dots;
        std::string base = dir;
        for (std::size_t i = 1; i < levels; ++i) {
            if (base.empty()) return std::nullopt;
            base = parent_dir(base);
        }
        std::string rest = dots == std::string::npos ? "" : ref.raw.substr(dots);
        std::replace(rest.begin(), rest.end(), '.', '/');
        if (rest.empty()) return probe(vfs, join(base, "__init__"), conv);
        return probe(vfs, join(base, rest), conv);
    }

    std::string raw = ref.raw;
    if (raw.ends_with(".*")) raw.resize(raw.size() - 2);

    // 1. Path-based: importer directory, then repository root.
    if (raw.front() != '/') {
        if (auto p = probe(vfs, join(dir, raw), conv)) return p;
    }
    if (auto p = probe(vfs, raw, conv)) return p;

    // 2. Naming conventions: namespaced specifier → directory path.
    std::vector<std::string> segs{raw};
    if (!conv.namespace_separator.empty() && raw.find(conv.namespace_separator) != std::string::npos) {
        segs = split_on(raw, conv.namespace_separator);
        if (std::any_of(segs.begin(), segs.end(), [](const std::string& s) { return s.empty(); })) return std::nullopt;
    }
    const std::size_t min_segments = conv.strip_trailing_segments ? 1 : segs.size();
    for (std::size_t n = segs.size(); n >= min_segments && n >= 1; --n) {
        const std::string rel = join_segments(segs, n);
        if (segs.size() > 1) {
            if (auto p = probe(vfs, join(dir, rel), conv)) return p;
            if (auto p = probe(vfs, rel, conv)) return p;
        }
        if (auto p = probe_suffix(vfs, rel, conv)) return p;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Graph

std::optional<std::uint32_t> ImportGraph::find(std::string_view path) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), path,
                               [](const GraphNode& n, std::string_view p) { return n.path < p; });
    if (it == nodes.end() || it->path != path) return std::nullopt;
    return it->id;
}

ImportGraph make_graph(std::vector<std::string> paths, const std::vector<std::pair<std::string, std::string>>& edges) {
    for (const auto& [u, v] : edges) {
        paths.push_back(u);
        paths.push_back(v);
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    ImportGraph g;
    g.nodes.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) g.nodes.push_back({static_cast<std::uint32_t>(i), std::move(paths[i])});
    g.edges.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        if (u == v) continue;
        g.edges.emplace_back(*g.find(u), *g.find(v));
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

GraphBuildResult build_graph(const RepoSnapshot& snapshot, const std::vector<std::string>& languages) {
    std::set<std::string> wanted;
    for (const auto& l : languages) wanted.insert(require_language(l).tag);

    const Vfs vfs(snapshot);
    std::vector<std::string> nodes;
    std::map<std::string, const LanguageInfo*> node_lang;
    for (const auto& [path, content] : snapshot.files) {
        const auto* info = language_for_path(path);
        if (!info || !info->import_graph) continue;
        if (!wanted.empty() && !wanted.count(info->tag)) continue;
        nodes.push_back(path);
        node_lang.emplace(path, info);
    }

    GraphBuildResult result;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& path : nodes) {
        const auto* info = node_lang.at(path);
        auto extracted = extract_imports(path, snapshot.files.at(path), info->tag);
        result.files_fell_back += extracted.fell_back;
        for (const auto& ref : extracted.imports) {
            ++result.imports_found;
            auto target = resolve_import(ref, vfs, info->tag);
            if (!target || !node_lang.count(*target) || *target == path) continue;
            ++result.imports_resolved;
            edges.emplace_back(*target, path);
        }
    }
    result.graph = make_graph(std::move(nodes), edges);
    return result;
}

}  // namespace corpuskit
