#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit {

/// Every tunable of the pipeline. Defaults are the published curation thresholds
/// where one exists and documented artifact choices otherwise.
struct PipelineConfig {
    // Rule filters (fractions of content unless noted).
    double url_ip_ratio = 0.60;
    double pii_ratio = 0.50;
    double garbled_ratio = 0.05;
    double duplication_ratio = 0.70;
    std::size_t max_line_len = 1000;  // characters, source code only
    double avg_line_len = 100.0;      // characters, source code only
    double link_line_ratio = 0.50;    // text only
    std::vector<std::string> placeholder_tokens = {
        "lorem ipsum", "[placeholder]", "{placeholder}", "<placeholder>",
        "[insert ",    "<insert ",      "your text here"};
    std::vector<std::string> source_rules = {"url_ip_ratio", "pii_ratio",    "garbled",
                                             "duplication",  "max_line_len", "avg_line_len"};
    std::vector<std::string> text_rules = {"url_ip_ratio",    "pii_ratio",   "garbled",
                                           "duplication",     "image_reference",
                                           "placeholder",     "link_density"};

    // Composite quality gate, 0..100.
    double quality_threshold = 85.0;

    // Near-dedup.
    double dedup_threshold = 0.70;
    std::size_t dedup_shingle_k = 5;
    std::size_t dedup_num_perm = 128;
    std::size_t dedup_bands = 16;
    std::size_t dedup_rows = 8;
    std::uint64_t dedup_seed = 0;

    // Repository-level gate.
    double repo_min_quality = 0.5;
    double repo_min_comment_ratio = 0.01;
    double repo_min_effective_loc = 5.0;
    /// "auto" picks a comment-syntax header per language; otherwise a template
    /// containing `{path}`.
    std::string separator_template = "auto";

    // Code-comment pair rules.
    std::size_t coco_min_code_chars = 30;
    std::size_t coco_max_code_chars = 100000;
    std::size_t coco_min_code_lines = 1;
    std::size_t coco_max_code_lines = 100;
    std::size_t coco_min_comment_chars = 30;
    std::size_t coco_max_comment_chars = 100000;
    double coco_special_ratio = 0.80;
    std::vector<std::string> coco_annotation_markers = {"TODO:", "BUG:", "FIXME:"};

    // Scoring client for the consistency judge.
    std::string scorer_endpoint;
    std::string scorer_model = "coco-judge";
    std::size_t scorer_max_retries = 2;
    std::size_t scorer_concurrency = 4;
    std::string scorer_api_key_env = "CORPUSKIT_SCORER_API_KEY";

    bool operator==(const PipelineConfig&) const = default;

    /// Canonical `key = value` rendering, sorted by key. Used for digests and `--dump-config`.
    std::string to_text() const;
};

/// Parses a flat `key = value` document. `#` starts a comment; list values are
/// comma separated. Unknown keys and out-of-domain values raise ValidationError
/// naming the key.
PipelineConfig load_config(std::string_view text);

/// Applies one `key=value` override on top of an existing config.
void apply_config_override(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Every key accepted by load_config, sorted.
std::vector<std::string> config_keys();

}  // namespace corpuskit
