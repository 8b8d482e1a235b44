#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "corpuskit/config.hpp"
#include "corpuskit/record.hpp"

namespace corpuskit {

/// Byte placed between code and comment when digesting a pair.
inline constexpr char kCocoDigestSeparator = '\0';

struct CocoPair {
    std::string id;
    std::string code;
    std::string comment;
    std::string language;

    /// content_digest(code + '\0' + comment).
    std::string digest() const;
};

/// content = code, meta["comment"] = comment. Throws UsageError for other kinds
/// or a missing comment.
CocoPair coco_from_record(const CorpusRecord& record);
CorpusRecord coco_to_record(const CocoPair& pair);

namespace coco_rule {
inline constexpr std::string_view duplicate = "i";
inline constexpr std::string_view code_chars = "ii";
inline constexpr std::string_view code_lines = "iii";
inline constexpr std::string_view comment_empty = "iv";
inline constexpr std::string_view comment_chars = "v";
inline constexpr std::string_view special_chars = "vi";
inline constexpr std::string_view annotation = "vii";
}  // namespace coco_rule

/// Ratio of code points in the trimmed comment that are neither letters, digits
/// nor whitespace. Non-ASCII code points count as letters.
double special_char_ratio(std::string_view comment);

/// Rules i..vii, first match wins. A kept pair's digest is appended to `seen`.
/// Comment lengths are measured after trimming surrounding whitespace.
FilterVerdict sanitize_rules(const CocoPair& pair, std::unordered_set<std::string>& seen,
                             const PipelineConfig& cfg = {});

/// Prompt asking a judge to (a) explain the code line by line, (b) summarize it in
/// one sentence, (c) compare the comment with that summary and (d) end with a
/// single `CONSISTENT: true` or `CONSISTENT: false` line.
std::string build_consistency_prompt(const CocoPair& pair);

enum class JudgmentSource { external_scorer, stub };

struct ConsistencyJudgment {
    bool consistent = false;
    std::string rationale;
    JudgmentSource source = JudgmentSource::external_scorer;
};

/// Uses the last line matching `CONSISTENT: true|false` (case-insensitive,
/// surrounding whitespace and markdown emphasis allowed). Throws ParseError when
/// no line matches.
ConsistencyJudgment parse_consistency_response(std::string_view text);

/// Transport-level failure from a scoring client.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sends a prompt to a judge and returns its raw completion.
class ScoringClient {
public:
    virtual ~ScoringClient() = default;
    /// Throws TransportError on failure. Must be safe to call concurrently.
    virtual std::string complete(const std::string& prompt) = 0;
    virtual JudgmentSource source() const { return JudgmentSource::external_scorer; }
};

/// Offline client answering from a function of the prompt.
class StubScoringClient final : public ScoringClient {
public:
    using Responder = std::function<std::string(const std::string& prompt)>;
    explicit StubScoringClient(Responder responder) : responder_(std::move(responder)) {}
    std::string complete(const std::string& prompt) override { return responder_(prompt); }
    JudgmentSource source() const override { return JudgmentSource::stub; }

private:
    Responder responder_;
};

struct ScoringClientConfig {
    std::string endpoint;  // http(s)://host[:port]/path
    std::string model;
    std::string api_key;   // sent as a bearer token when non-empty
    int timeout_seconds = 60;

    /// From the pipeline config, reading the key from its environment variable.
    static ScoringClientConfig from_pipeline(const PipelineConfig& cfg);
};

/// Chat-completions style HTTP client.
///
/// Request:  POST <path> {"model": m, "messages": [{"role": "user", "content": prompt}],
///                        "temperature": 0}
/// Response: {"choices": [{"message": {"content": "..."}}]}
/// Non-2xx statuses and malformed bodies raise TransportError.
std::unique_ptr<ScoringClient> make_http_scoring_client(const ScoringClientConfig& config);

enum class PairOutcome { kept, dropped_inconsistent, dropped_unparseable, deferred };
std::string_view to_string(PairOutcome outcome);

struct AuditEntry {
    std::string pair_id;
    std::size_t attempt = 0;
    std::string prompt;
    std::string response;  // empty on transport failure
    std::string verdict;   // "true", "false", "unparseable", "transport_error"
};

struct SemanticFilterOptions {
    std::size_t max_retries = 2;
    std::size_t concurrency = 4;
};

struct SemanticFilterResult {
    std::vector<CocoPair> kept;
    /// Outcome per input pair, in input order.
    std::vector<std::pair<std::string, PairOutcome>> outcomes;
    std::vector<AuditEntry> audit;  // input order, then attempt order
    std::size_t count(PairOutcome outcome) const;
};

/// Judges every pair. Unparseable answers and transport failures are retried up
/// to `max_retries` times; afterwards the pair is dropped as unparseable or marked
/// deferred. At most `concurrency` requests are in flight.
SemanticFilterResult semantic_filter(const std::vector<CocoPair>& pairs, ScoringClient& client,
                                     const SemanticFilterOptions& options = {});

void write_audit(const std::vector<AuditEntry>& audit, std::ostream& out);

}  // namespace corpuskit
