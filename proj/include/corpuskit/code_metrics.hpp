#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpuskit/record.hpp"

namespace corpuskit {

enum class Tristate { no, yes, unknown };

struct LineClassification {
    std::size_t total_lines = 0;
    std::size_t blank_lines = 0;
    std::size_t comment_lines = 0;
    std::size_t code_lines = 0;  // effective lines of code
    std::size_t non_blank() const noexcept { return comment_lines + code_lines; }
};

/// Splits a file into blank, comment-only and code lines using the language's
/// comment table. A line is a comment line when all of its non-whitespace text
/// lies inside comments. Throws UsageError for an unknown language.
LineClassification classify_lines(std::string_view content, std::string_view language);

/// Comment lines over non-blank lines; 0 for files without non-blank lines.
double comment_ratio(std::string_view content, std::string_view language);

/// Non-blank, non-comment lines.
std::size_t effective_loc(std::string_view content, std::string_view language);

/// Narrow parser interface: does this source parse without error nodes?
class SyntaxAdapter {
public:
    virtual ~SyntaxAdapter() = default;
    virtual std::string id() const = 0;
    /// Returns false when the parse produced error nodes.
    virtual bool parses(std::string_view content) const = 0;
};

/// Language-aware lexical checker: tokenizes strings and comments of the given
/// language and requires balanced (), [], {} plus terminated literals and block
/// comments. Python additionally requires `:` after a block header
/// (def/class/if/elif/else/for/while/try/except/finally/with) and rejects
/// tokens that cannot follow an opening bracket, such as `(:`.
std::unique_ptr<SyntaxAdapter> make_lexical_adapter(std::string_view language);

/// Bracket-balance heuristic with no language knowledge.
class BracketBalanceAdapter final : public SyntaxAdapter {
public:
    std::string id() const override { return "bracket-balance"; }
    bool parses(std::string_view content) const override;
};

struct SyntaxResult {
    Tristate valid = Tristate::unknown;
    /// Whether `valid` came from a registered adapter or the fallback heuristic.
    bool from_fallback = false;
    /// The fallback's own answer when `valid` is unknown.
    std::optional<bool> heuristic;
    std::string adapter_id;
};

/// Language tag → adapter. The default registry carries lexical adapters for
/// python, c, cpp, java, javascript, typescript, go and rust.
class SyntaxRegistry {
public:
    static SyntaxRegistry with_defaults();

    void add(std::string language, std::shared_ptr<const SyntaxAdapter> adapter);
    const SyntaxAdapter* find(std::string_view language) const;

private:
    std::map<std::string, std::shared_ptr<const SyntaxAdapter>, std::less<>> adapters_;
};

/// Parses with the language's adapter. Without one the result is `unknown`,
/// with the bracket-balance answer carried in `heuristic`.
/// An adapter that throws is reported as Error carrying the adapter id.
SyntaxResult syntax_valid(std::string_view content, std::string_view language,
                          const SyntaxRegistry& registry);

struct CodeMetrics {
    double comment_ratio = 0.0;
    std::size_t effective_loc = 0;
    std::size_t total_lines = 0;
    Tristate syntax_valid = Tristate::unknown;
    std::optional<double> quality_score;
};

CodeMetrics compute_code_metrics(std::string_view content, std::string_view language,
                                 const SyntaxRegistry& registry);

/// Inputs of the default closed-form quality scorer.
struct QualityFeatures {
    double comment_ratio = 0.0;
    std::size_t effective_loc = 0;
    Tristate syntax_valid = Tristate::unknown;
    double dup_line_ratio = 0.0;
    double dup_word_ratio = 0.0;
};

/// Logistic score in [0,1]:
///   z = -1.5 + 4*min(comment_ratio, 0.5) + 0.5*ln(1 + effective_loc)
///       + 1.5*s - 2*dup_line_ratio - 1*dup_word_ratio
/// with s = 1 for valid syntax, 0.5 for unknown and 0 for invalid.
double default_quality_score(const QualityFeatures& features);

/// Maps a record to a number. Throwing is allowed; callers attach the record id.
using Scorer = std::function<double(const CorpusRecord&)>;

struct ScorerEntry {
    Scorer score;
    double min_score = 0.0;
    double max_score = 1.0;
};

/// Scorer id → scorer. Ids of the form `meta.<key>` resolve to the numeric meta
/// field `<key>` (range unbounded) without registration; "quality" is the default
/// formula above.
class ScorerRegistry {
public:
    static ScorerRegistry with_defaults();

    void add(std::string id, ScorerEntry entry);
    const ScorerEntry* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

private:
    std::map<std::string, ScorerEntry, std::less<>> entries_;
    mutable std::map<std::string, ScorerEntry, std::less<>> meta_entries_;
};

/// Scores one record; failures surface as Error naming the record id.
double quality_score(const CorpusRecord& record, const ScorerEntry& scorer);

enum class StagePredicate { at_least, equals };

struct CascadeStage {
    std::string scorer_id;
    StagePredicate predicate = StagePredicate::at_least;
    double threshold = 0.0;

    bool accepts(double score) const;
};

/// Parses "scorer>=3" or "scorer==5".
CascadeStage parse_cascade_stage(std::string_view text);
std::string to_string(const CascadeStage& stage);

struct StageCount {
    std::string stage;
    std::size_t input = 0;
    std::size_t kept = 0;
    std::size_t removed = 0;
};

struct CascadeResult {
    /// Kept ids in input order.
    std::vector<std::string> kept;
    std::vector<StageCount> stages;
};

/// Runs stages in order, each over the previous stage's survivors. All scorer ids
/// are checked before any scoring (ConfigError), as are thresholds against the
/// scorer's range (ValidationError).
CascadeResult score_cascade(const std::vector<CorpusRecord>& records,
                            const std::vector<CascadeStage>& stages,
                            const ScorerRegistry& scorers);

/// The Common Crawl recall cascade: LLM score >= 3 then classifier score == 5.
std::vector<CascadeStage> web_recall_stages(std::string llm_scorer = "meta.llm_score",
                                            std::string classifier_scorer = "meta.classifier_score");

}  // namespace corpuskit
