#include "corpuskit/coco.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include <boost/regex.hpp>
#include <json.hpp>

#include <httplib.h>

#include "corpuskit/dedup.hpp"
#include "corpuskit/errors.hpp"
#include "corpuskit/utf8.hpp"

namespace corpuskit {

namespace {

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::size_t count_lines(std::string_view s) {
    if (s.empty()) return 0;
    auto n = static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
    return s.back() == '\n' ? n : n + 1;
}

// Longest run of backticks, to pick a fence the code cannot close.
std::size_t longest_backtick_run(std::string_view s) {
    std::size_t best = 0, run = 0;
    for (char c : s) {
        run = c == '`' ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace

std::string CocoPair::digest() const {
    std::string joined;
    joined.reserve(code.size() + comment.size() + 1);
    joined += code;
    joined += kCocoDigestSeparator;
    joined += comment;
    return content_digest(joined);
}

CocoPair coco_from_record(const CorpusRecord& record) {
    if (record.kind != RecordKind::coco) {
        throw UsageError("record " + record.id + " is not a coco record (kind " + std::string(to_string(record.kind)) + ")");
    }
    auto comment = record.meta_string("comment");
    if (!comment) throw UsageError("coco record " + record.id + " has no string meta field 'comment'");
    return {record.id, record.content, *comment, record.language.value_or("")};
}

CorpusRecord coco_to_record(const CocoPair& pair) {
    CorpusRecord r;
    r.id = pair.id;
    r.kind = RecordKind::coco;
    r.content = pair.code;
    if (!pair.language.empty()) r.language = pair.language;
    r.meta["comment"] = pair.comment;
    return r;
}

double special_char_ratio(std::string_view comment) {
    const auto text = trim(comment);
    std::size_t total = 0, special = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t c = utf8::next(text, pos);
        ++total;
        if (c >= 0x80) continue;  // non-ASCII: letters of other scripts
        const bool plain = (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || is_space(c);
        if (!plain) ++special;
    }
    return total == 0 ? 0.0 : static_cast<double>(special) / static_cast<double>(total);
}

FilterVerdict sanitize_rules(const CocoPair& pair, std::unordered_set<std::string>& seen, const PipelineConfig& cfg) {
    const auto digest = pair.digest();
    if (seen.count(digest)) return FilterVerdict::reject(std::string(coco_rule::duplicate));

    const auto code_chars = utf8::length(pair.code);
    if (code_chars < cfg.coco_min_code_chars || code_chars > cfg.coco_max_code_chars) {
        return FilterVerdict::reject(std::string(coco_rule::code_chars), static_cast<double>(code_chars));
    }
    const auto lines = count_lines(pair.code);
    if (lines < cfg.coco_min_code_lines || lines > cfg.coco_max_code_lines) {
        return FilterVerdict::reject(std::string(coco_rule::code_lines), static_cast<double>(lines));
    }
    const auto comment = trim(pair.comment);
    if (comment.empty()) return FilterVerdict::reject(std::string(coco_rule::comment_empty), 0.0);
    const auto comment_chars = utf8::length(comment);
    if (comment_chars < cfg.coco_min_comment_chars || comment_chars > cfg.coco_max_comment_chars) {
        return FilterVerdict::reject(std::string(coco_rule::comment_chars), static_cast<double>(comment_chars));
    }
    const double ratio = special_char_ratio(comment);
    if (ratio >= cfg.coco_special_ratio) return FilterVerdict::reject(std::string(coco_rule::special_chars), ratio);

    const auto lowered = ascii_lower(comment);
    for (const auto& marker : cfg.coco_annotation_markers) {
        if (lowered.find(ascii_lower(marker)) != std::string::npos) {
            return FilterVerdict::reject(std::string(coco_rule::annotation));
        }
    }
    seen.insert(digest);
    return FilterVerdict::accept();
}

std::string build_consistency_prompt(const CocoPair& pair) {
    const std::string fence(std::max<std::size_t>(3, longest_backtick_run(pair.code) + 1), '`');
    std::string p;
    p += "You are checking whether a code comment is consistent with the code it describes.\n\n";
    p += "Code:\n";
    p += fence + pair.language + "\n" + pair.code;
    if (pair.code.empty() || pair.code.back() != '\n') p += '\n';
    p += fence + "\n\n";
    p += "Comment:\n<comment>\n" + pair.comment + "\n</comment>\n\n";
    p += "Answer in four steps.\n";
    p += "Step a: Break down the provided code line by line and explain what each line does.\n";
    p += "Step b: Summarize the purpose of the whole code in one sentence.\n";
    p += "Step c: Compare the comment with your summary and explain, with reasons, whether they agree.\n";
    p += "Step d: Give the overall consistency as the last line of your answer, written exactly as\n";
    p += "CONSISTENT: true\nor\nCONSISTENT: false\n";
    return p;
}

ConsistencyJudgment parse_consistency_response(std::string_view text) {
    static const boost::regex verdict(R"(^[\s*_`#>]*consistent[\s*_`]*:[\s*_`]*(true|false)[\s*_`.]*$)",
                                      boost::regex::perl | boost::regex::icase);
    std::optional<std::size_t> line_start;
    bool value = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        boost::cmatch m;
        if (boost::regex_match(line.data(), line.data() + line.size(), m, verdict)) {
            line_start = start;
            value = ascii_lower(m[1].str()) == "true";
        }
        start = end + 1;
    }
    if (!line_start) throw ParseError("no CONSISTENT: true|false line in scorer response");
    return {value, std::string(trim(text.substr(0, *line_start))), JudgmentSource::external_scorer};
}

ScoringClientConfig ScoringClientConfig::from_pipeline(const PipelineConfig& cfg) {
    ScoringClientConfig c;
    c.endpoint = cfg.scorer_endpoint;
    c.model = cfg.scorer_model;
    if (!cfg.scorer_api_key_env.empty()) {
        if (const char* key = std::getenv(cfg.scorer_api_key_env.c_str())) c.api_key = key;
    }
    return c;
}

namespace {

class HttpScoringClient final : public ScoringClient {
public:
    explicit HttpScoringClient(ScoringClientConfig cfg) : cfg_(std::move(cfg)) {
        static const boost::regex url(R"(^(https?://[^/\s]+)(/\S*)?$)");
        boost::smatch m;
        if (!boost::regex_match(cfg_.endpoint, m, url)) {
            throw ValidationError("scorer_endpoint", "expected http(s)://host[:port]/path, got '" + cfg_.endpoint + "'");
        }
        origin_ = m[1].str();
        path_ = m[2].matched ? m[2].str() : "/";
    }

    std::string complete(const std::string& prompt) override {
        nlohmann::json body = {{"model", cfg_.model},
                               {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                               {"temperature", 0}};
        httplib::Client client(origin_);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) throw TransportError("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300) {
            throw TransportError("scorer returned HTTP " + std::to_string(res->status));
        }
        try {
            const auto reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed scorer response: ") + e.what());
        }
    }

private:
    ScoringClientConfig cfg_;
    std::string origin_;
    std::string path_;
};

}  // namespace

std::unique_ptr<ScoringClient> make_http_scoring_client(const ScoringClientConfig& config) {
    return std::make_unique<HttpScoringClient>(config);
}

std::string_view to_string(PairOutcome outcome) {
    switch (outcome) {
        case PairOutcome::kept: return "kept";
        case PairOutcome::dropped_inconsistent: return "dropped_inconsistent";
        case PairOutcome::dropped_unparseable: return "dropped_unparseable";
        case PairOutcome::deferred: return "deferred";
    }
    return "unknown";
}

std::size_t SemanticFilterResult::count(PairOutcome outcome) const {
    return static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [&](const auto& o) { return o.second == outcome; }));
}

namespace {

struct PairRun {
    PairOutcome outcome = PairOutcome::deferred;
    std::vector<AuditEntry> audit;
};

PairRun judge_pair(const CocoPair& pair, ScoringClient& client, std::size_t max_retries) {
    PairRun run;
    const auto prompt = build_consistency_prompt(pair);
    for (std::size_t attempt = 1; attempt <= max_retries + 1; ++attempt) {
        AuditEntry entry{pair.id, attempt, prompt, "", ""};
        try {
            entry.response = client.complete(prompt);
        } catch (const TransportError&) {
            entry.verdict = "transport_error";
            run.audit.push_back(std::move(entry));
            run.outcome = PairOutcome::deferred;
            continue;
        }
        try {
            const auto judgment = parse_consistency_response(entry.response);
            entry.verdict = judgment.consistent ? "true" : "false";
            run.audit.push_back(std::move(entry));
            run.outcome = judgment.consistent ? PairOutcome::kept : PairOutcome::dropped_inconsistent;
            return run;
        } catch (const ParseError&) {
            entry.verdict = "unparseable";
            run.audit.push_back(std::move(entry));
            run.outcome = PairOutcome::dropped_unparseable;
        }
    }
    return run;
}

}  // namespace

SemanticFilterResult semantic_filter(const std::vector<CocoPair>& pairs, ScoringClient& client,
                                     const SemanticFilterOptions& options) {
    std::vector<PairRun> runs(pairs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
            runs[i] = judge_pair(pairs[i], client, options.max_retries);
        }
    };
    const auto n_workers = std::min(std::max<std::size_t>(options.concurrency, 1), pairs.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    SemanticFilterResult result;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        result.outcomes.emplace_back(pairs[i].id, runs[i].outcome);
        if (runs[i].outcome == PairOutcome::kept) result.kept.push_back(pairs[i]);
        for (auto& entry : runs[i].audit) result.audit.push_back(std::move(entry));
    }
    return result;
}

void write_audit(const std::vector<AuditEntry>& audit, std::ostream& out) {
    for (const auto& e : audit) {
        nlohmann::ordered_json j = {{"pair_id", e.pair_id},
                                    {"attempt", e.attempt},
                                    {"prompt", e.prompt},
                                    {"response", e.response},
                                    {"verdict", e.verdict}};
        out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

}  // namespace corpuskit
