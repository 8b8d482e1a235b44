#include "corpuskit/code_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "corpuskit/errors.hpp"
#include "corpuskit/languages.hpp"
#include "corpuskit/rule_filters.hpp"

namespace corpuskit {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_with_at(std::string_view s, std::size_t pos, std::string_view token) {
    return !token.empty() && s.substr(pos, token.size()) == token;
}

// Returns the block-comment index opened at `pos`, longest opener first.
std::optional<std::size_t> block_opener_at(const CommentSyntax& syntax, std::string_view line, std::size_t pos) {
    std::optional<std::size_t> best;
    for (std::size_t b = 0; b < syntax.block_markers.size(); ++b) {
        const auto& open = syntax.block_markers[b].open;
        if (starts_with_at(line, pos, open) && (!best || open.size() > syntax.block_markers[*best].open.size())) {
            best = b;
        }
    }
    return best;
}

bool line_marker_at(const CommentSyntax& syntax, std::string_view line, std::size_t pos) {
    if (syntax.line_marker_at_word_start && pos > 0 && !is_space(line[pos - 1])) return false;
    return std::any_of(syntax.line_markers.begin(), syntax.line_markers.end(),
                       [&](const std::string& m) { return starts_with_at(line, pos, m); });
}

// Skips a single-line string literal starting at `pos` (the opening quote).
std::size_t skip_string(std::string_view line, std::size_t pos) {
    const char quote = line[pos];
    for (std::size_t i = pos + 1; i < line.size(); ++i) {
        if (line[i] == '\\') {
            ++i;
        } else if (line[i] == quote) {
            return i + 1;
        }
    }
    return line.size();
}

}  // namespace

LineClassification classify_lines(std::string_view content, std::string_view language) {
    const CommentSyntax& syntax = require_language(language).comments;
    LineClassification out;
    std::optional<std::size_t> open_block;

    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const std::string_view line = content.substr(start, end - start);
        start = end + 1;
        ++out.total_lines;

        bool has_code = false, has_comment = false;
        std::size_t i = 0;
        while (i < line.size()) {
            if (open_block) {
                const auto& close = syntax.block_markers[*open_block].close;
                const auto found = line.find(close, i);
                const auto stop = found == std::string_view::npos ? line.size() : found + close.size();
                for (std::size_t k = i; k < stop; ++k) has_comment |= !is_space(line[k]);
                i = stop;
                if (found != std::string_view::npos) open_block.reset();
                continue;
            }
            if (is_space(line[i])) {
                ++i;
                continue;
            }
            if (auto b = block_opener_at(syntax, line, i)) {
                open_block = b;
                has_comment = true;
                i += syntax.block_markers[*b].open.size();
                continue;
            }
            if (line_marker_at(syntax, line, i)) {
                has_comment = true;
                break;
            }
            has_code = true;
            if (syntax.string_quotes.find(line[i]) != std::string::npos) {
                i = skip_string(line, i);
            } else {
                ++i;
            }
        }

        if (has_code) {
            ++out.code_lines;
        } else if (has_comment) {
            ++out.comment_lines;
        } else {
            ++out.blank_lines;
        }
    }
    return out;
}

double comment_ratio(std::string_view content, std::string_view language) {
    const auto c = classify_lines(content, language);
    return c.non_blank() == 0 ? 0.0 : static_cast<double>(c.comment_lines) / static_cast<double>(c.non_blank());
}

std::size_t effective_loc(std::string_view content, std::string_view language) {
    return classify_lines(content, language).code_lines;
}

// ---------------------------------------------------------------------------
// Syntax adapters

bool BracketBalanceAdapter::parses(std::string_view content) const {
    std::vector<char> stack;
    for (const char c : content) {
        if (c == '(' || c == '[' || c == '{') {
            stack.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            const char want = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back() != want) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

namespace {

class LexicalAdapter final : public SyntaxAdapter {
public:
    explicit LexicalAdapter(const LanguageInfo& info) : info_(info) {}

    std::string id() const override { return "lexical-" + info_.tag; }

    bool parses(std::string_view src) const override {
        const CommentSyntax& syntax = info_.comments;
        const bool python = info_.tag == "python";
        // Quotes whose literals may continue over newlines.
        const std::string multiline_quotes = info_.tag == "javascript" || info_.tag == "typescript" ? "`"
                                             : info_.tag == "go"                                      ? "`"
                                             : info_.tag == "rust"                                    ? "\""
                                                                                                      : "";
        std::vector<char> stack;
        // Python block-header check state for the current logical line.
        bool at_line_start = true;
        bool header_line = false;
        bool header_colon = false;
        char last_significant = 0;

        auto end_logical_line = [&]() -> bool {
            if (python && header_line && !header_colon) return false;
            header_line = false;
            header_colon = false;
            at_line_start = true;
            last_significant = 0;
            return true;
        };

        std::size_t i = 0;
        while (i < src.size()) {
            const char c = src[i];
            if (c == '\n') {
                if (stack.empty() || !python) {
                    if (!end_logical_line()) return false;
                }
                ++i;
                continue;
            }
            if (is_space(c)) {
                ++i;
                continue;
            }
            if (python && c == '\\' && i + 1 < src.size() && src[i + 1] == '\n') {
                i += 2;  // explicit line continuation
                continue;
            }
            if (auto b = block_opener_at(syntax, src, i)) {
                const auto& marker = syntax.block_markers[*b];
                const auto close = src.find(marker.close, i + marker.open.size());
                if (close == std::string_view::npos) return false;
                i = close + marker.close.size();
                // A Python triple-quoted string is an expression token.
                if (python) last_significant = 's';
                continue;
            }
            if (line_marker_at(syntax, src, i)) {
                const auto nl = src.find('\n', i);
                i = nl == std::string_view::npos ? src.size() : nl;
                continue;
            }
            if (syntax.string_quotes.find(c) != std::string::npos) {
                const bool multiline = multiline_quotes.find(c) != std::string::npos;
                std::size_t j = i + 1;
                bool closed = false;
                for (; j < src.size(); ++j) {
                    if (src[j] == '\\' && c != '`') {
                        ++j;
                        continue;
                    }
                    if (src[j] == '\n' && !multiline) break;
                    if (src[j] == c) {
                        closed = true;
                        break;
                    }
                }
                if (!closed) return false;
                i = j + 1;
                last_significant = 's';
                at_line_start = false;
                continue;
            }

            if (python && at_line_start && (std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
                std::size_t j = i;
                while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
                static constexpr std::string_view kHeaders[] = {"def",    "class",   "if",      "elif",
                                                                "else",   "for",     "while",   "try",
                                                                "except", "finally", "with",    "async"};
                const auto word = src.substr(i, j - i);
                header_line = std::find(std::begin(kHeaders), std::end(kHeaders), word) != std::end(kHeaders);
            }
            at_line_start = false;

            if (c == '(' || c == '[' || c == '{') {
                stack.push_back(c);
            } else if (c == ')' || c == ']' || c == '}') {
                const char want = c == ')' ? '(' : c == ']' ? '[' : '{';
                if (stack.empty() || stack.back() != want) return false;
                stack.pop_back();
            } else if (python && (c == ':' || c == ',') && last_significant == '(') {
                return false;  // "(:" / "(," cannot start an argument list
            } else if (c == ':' && stack.empty()) {
                header_colon = true;
            }
            last_significant = c;
            ++i;
        }
        if (!stack.empty()) return false;
        return end_logical_line();
    }

private:
    const LanguageInfo& info_;
};

}  // namespace

std::unique_ptr<SyntaxAdapter> make_lexical_adapter(std::string_view language) {
    return std::make_unique<LexicalAdapter>(require_language(language));
}

SyntaxRegistry SyntaxRegistry::with_defaults() {
    SyntaxRegistry r;
    for (const char* tag : {"python", "c", "cpp", "java", "javascript", "typescript", "go", "rust"}) {
        r.add(tag, make_lexical_adapter(tag));
    }
    return r;
}

void SyntaxRegistry::add(std::string language, std::shared_ptr<const SyntaxAdapter> adapter) {
    const auto tag = canonical_language(language).value_or(language);
    adapters_[tag] = std::move(adapter);
}

const SyntaxAdapter* SyntaxRegistry::find(std::string_view language) const {
    const auto tag = canonical_language(language).value_or(std::string(language));
    auto it = adapters_.find(tag);
    return it == adapters_.end() ? nullptr : it->second.get();
}

SyntaxResult syntax_valid(std::string_view content, std::string_view language, const SyntaxRegistry& registry) {
    SyntaxResult result;
    if (const auto* adapter = registry.find(language)) {
        result.adapter_id = adapter->id();
        try {
            result.valid = adapter->parses(content) ? Tristate::yes : Tristate::no;
        } catch (const std::exception& e) {
            throw Error("syntax adapter '" + result.adapter_id + "' failed: " + e.what());
        }
        return result;
    }
    static const BracketBalanceAdapter fallback;
    result.adapter_id = fallback.id();
    result.from_fallback = true;
    result.heuristic = fallback.parses(content);
    result.valid = Tristate::unknown;
    return result;
}

CodeMetrics compute_code_metrics(std::string_view content, std::string_view language, const SyntaxRegistry& registry) {
    CodeMetrics m;
    const auto lines = classify_lines(content, language);
    m.total_lines = lines.total_lines;
    m.effective_loc = lines.code_lines;
    m.comment_ratio =
        lines.non_blank() == 0 ? 0.0 : static_cast<double>(lines.comment_lines) / static_cast<double>(lines.non_blank());
    m.syntax_valid = syntax_valid(content, language, registry).valid;
    return m;
}

// ---------------------------------------------------------------------------
// Scoring

double default_quality_score(const QualityFeatures& f) {
    const double syntax = f.syntax_valid == Tristate::yes ? 1.0 : f.syntax_valid == Tristate::unknown ? 0.5 : 0.0;
    const double z = -1.5 + 4.0 * std::min(f.comment_ratio, 0.5) +
                     0.5 * std::log1p(static_cast<double>(f.effective_loc)) + 1.5 * syntax - 2.0 * f.dup_line_ratio -
                     1.0 * f.dup_word_ratio;
    return 1.0 / (1.0 + std::exp(-z));
}

namespace {

std::optional<std::string> record_language(const CorpusRecord& r) {
    if (r.language) {
        if (auto tag = canonical_language(*r.language)) return tag;
    }
    if (r.path) {
        if (const auto* info = language_for_path(*r.path)) return info->tag;
    }
    return std::nullopt;
}

double default_record_score(const CorpusRecord& r) {
    static const SyntaxRegistry registry = SyntaxRegistry::with_defaults();
    QualityFeatures f;
    const auto stats = compute_content_stats(r.content);
    f.dup_line_ratio = stats.dup_line_ratio;
    f.dup_word_ratio = stats.dup_word_ratio;
    if (auto lang = record_language(r)) {
        const auto m = compute_code_metrics(r.content, *lang, registry);
        f.comment_ratio = m.comment_ratio;
        f.effective_loc = m.effective_loc;
        f.syntax_valid = m.syntax_valid;
    } else {
        // Unknown syntax: every non-blank line counts as code.
        std::size_t non_blank = 0;
        std::size_t start = 0;
        const std::string_view c = r.content;
        while (start < c.size()) {
            auto end = c.find('\n', start);
            if (end == std::string_view::npos) end = c.size();
            const auto line = c.substr(start, end - start);
            if (std::any_of(line.begin(), line.end(), [](char ch) { return !is_space(ch); })) ++non_blank;
            start = end + 1;
        }
        f.effective_loc = non_blank;
    }
    return default_quality_score(f);
}

}  // namespace

ScorerRegistry ScorerRegistry::with_defaults() {
    ScorerRegistry r;
    r.add("quality", {default_record_score, 0.0, 1.0});
    return r;
}

void ScorerRegistry::add(std::string id, ScorerEntry entry) { entries_[std::move(id)] = std::move(entry); }

const ScorerEntry* ScorerRegistry::find(std::string_view id) const {
    if (auto it = entries_.find(id); it != entries_.end()) return &it->second;
    if (id.starts_with("meta.") && id.size() > 5) {
        if (auto it = meta_entries_.find(id); it != meta_entries_.end()) return &it->second;
        const std::string key(id.substr(5));
        ScorerEntry entry{[key](const CorpusRecord& r) {
                              auto v = r.meta_number(key);
                              if (!v) throw std::runtime_error("missing numeric meta field '" + key + "'");
                              return *v;
                          },
                          -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        return &meta_entries_.emplace(std::string(id), std::move(entry)).first->second;
    }
    return nullptr;
}

double quality_score(const CorpusRecord& record, const ScorerEntry& scorer) {
    try {
        return scorer.score(record);
    } catch (const std::exception& e) {
        throw Error("scorer failed on record " + record.id + ": " + e.what());
    }
}

bool CascadeStage::accepts(double score) const {
    return predicate == StagePredicate::equals ? score == threshold : score >= threshold;
}

CascadeStage parse_cascade_stage(std::string_view text) {
    CascadeStage stage;
    std::size_t op = text.find(">=");
    std::size_t op_len = 2;
    if (op != std::string_view::npos) {
        stage.predicate = StagePredicate::at_least;
    } else if ((op = text.find("==")) != std::string_view::npos) {
        stage.predicate = StagePredicate::equals;
    } else {
        throw ValidationError("stage", "expected 'scorer>=t' or 'scorer==t', got '" + std::string(text) + "'");
    }
    stage.scorer_id = std::string(text.substr(0, op));
    const auto value = text.substr(op + op_len);
    double t = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), t);
    if (stage.scorer_id.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ValidationError("stage", "malformed stage '" + std::string(text) + "'");
    }
    stage.threshold = t;
    return stage;
}

std::string to_string(const CascadeStage& stage) {
    std::string t = std::to_string(stage.threshold);
    t.erase(t.find_last_not_of('0') + 1);
    if (!t.empty() && t.back() == '.') t.pop_back();
    return stage.scorer_id + (stage.predicate == StagePredicate::equals ? "==" : ">=") + t;
}

CascadeResult score_cascade(const std::vector<CorpusRecord>& records, const std::vector<CascadeStage>& stages,
                            const ScorerRegistry& scorers) {
    std::vector<const ScorerEntry*> entries;
    for (const auto& stage : stages) {
        const auto* entry = scorers.find(stage.scorer_id);
        if (!entry) throw ConfigError("cascade stage uses unregistered scorer '" + stage.scorer_id + "'");
        if (stage.threshold < entry->min_score || stage.threshold > entry->max_score) {
            throw ValidationError(stage.scorer_id, "threshold outside the scorer's range");
        }
        entries.push_back(entry);
    }

    std::vector<std::size_t> alive(records.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;

    CascadeResult result;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        StageCount count{to_string(stages[s]), alive.size(), 0, 0};
        std::vector<std::size_t> next;
        for (const auto i : alive) {
            if (stages[s].accepts(quality_score(records[i], *entries[s]))) next.push_back(i);
        }
        count.kept = next.size();
        count.removed = count.input - count.kept;
        result.stages.push_back(std::move(count));
        alive = std::move(next);
    }
    for (const auto i : alive) result.kept.push_back(records[i].id);
    return result;
}

std::vector<CascadeStage> web_recall_stages(std::string llm_scorer, std::string classifier_scorer) {
    return {{std::move(llm_scorer), StagePredicate::at_least, 3.0},
            {std::move(classifier_scorer), StagePredicate::equals, 5.0}};
}

}  // namespace corpuskit
