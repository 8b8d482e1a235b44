#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "corpuskit/config.hpp"
#include "corpuskit/record.hpp"

namespace corpuskit {

/// Character-level statistics of one document. Counts are in Unicode code points.
struct ContentStats {
    std::size_t total_chars = 0;
    std::size_t total_lines = 0;
    std::size_t max_line_len = 0;
    double avg_line_len = 0.0;
    double url_ip_char_ratio = 0.0;
    double pii_char_ratio = 0.0;
    double dup_line_ratio = 0.0;
    double dup_word_ratio = 0.0;
    double garbled_ratio = 0.0;
    bool has_image_ref = false;
    bool has_placeholder = false;
    double link_line_ratio = 0.0;
};

/// Lines are split on '\n'; a trailing newline does not open an extra line.
/// `placeholder_tokens` are matched case-insensitively as substrings.
ContentStats compute_content_stats(std::string_view content,
                                   const std::vector<std::string>& placeholder_tokens = {});

namespace rule {
inline constexpr std::string_view url_ip_ratio = "url_ip_ratio";
inline constexpr std::string_view pii_ratio = "pii_ratio";
inline constexpr std::string_view garbled = "garbled";
inline constexpr std::string_view duplication = "duplication";
inline constexpr std::string_view max_line_len = "max_line_len";
inline constexpr std::string_view avg_line_len = "avg_line_len";
inline constexpr std::string_view image_reference = "image_reference";
inline constexpr std::string_view placeholder = "placeholder";
inline constexpr std::string_view link_density = "link_density";
inline constexpr std::string_view toxicity = "toxicity";
}  // namespace rule

/// Pluggable toxicity check. Returns true when the record must be dropped.
using ToxicityPredicate = std::function<bool(const CorpusRecord&)>;

/// Source-code rule set. Rules run in this fixed order and the first failure is
/// reported: url_ip_ratio, pii_ratio, garbled, duplication, max_line_len,
/// avg_line_len. Rules missing from cfg.source_rules are skipped.
/// Throws UsageError unless the record is source_code or repo_file.
FilterVerdict filter_source(const CorpusRecord& record, const PipelineConfig& cfg);

/// Text rule set: url_ip_ratio, pii_ratio, garbled, duplication, image_reference,
/// placeholder, link_density. Line-length limits never apply to text.
/// Throws UsageError unless the record is text.
FilterVerdict filter_text(const CorpusRecord& record, const PipelineConfig& cfg);

/// Same rules, evaluated on precomputed statistics.
FilterVerdict evaluate_source_rules(const ContentStats& stats, const PipelineConfig& cfg);
FilterVerdict evaluate_text_rules(const ContentStats& stats, const PipelineConfig& cfg);

/// Runs the toxicity predicate after the rule set; a null predicate passes everything.
FilterVerdict apply_toxicity(const CorpusRecord& record, FilterVerdict verdict,
                             const ToxicityPredicate& predicate);

/// Per-rule reject counters. Merging is commutative.
struct FilterReport {
    std::size_t input = 0;
    std::size_t kept = 0;
    std::map<std::string, std::size_t> rejected_by_rule;

    void add(const FilterVerdict& verdict);
    void merge(const FilterReport& other);
    std::size_t rejected() const;
};

}  // namespace corpuskit
