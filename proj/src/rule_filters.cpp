#include "corpuskit/rule_filters.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>
#include <utility>

#include <boost/regex.hpp>

#include "corpuskit/errors.hpp"
#include "corpuskit/patterns.hpp"
#include "corpuskit/utf8.hpp"

namespace corpuskit {

namespace {

using Span = std::pair<std::size_t, std::size_t>;  // byte offsets within a line

const boost::regex& compiled(std::string_view pattern) {
    // One compiled object per pattern; boost::regex matching is const and thread-safe.
    static const boost::regex url(patterns::kUrl.data(), patterns::kUrl.data() + patterns::kUrl.size());
    static const boost::regex ipv4(patterns::kIpv4.data(), patterns::kIpv4.data() + patterns::kIpv4.size());
    static const boost::regex ipv6(patterns::kIpv6.data(), patterns::kIpv6.data() + patterns::kIpv6.size());
    static const boost::regex email(patterns::kEmail.data(), patterns::kEmail.data() + patterns::kEmail.size());
    static const boost::regex phone(patterns::kPhone.data(), patterns::kPhone.data() + patterns::kPhone.size());
    static const boost::regex datetime(patterns::kDateTime.data(), patterns::kDateTime.data() + patterns::kDateTime.size());
    static const boost::regex md_image(patterns::kMarkdownImage.data(), patterns::kMarkdownImage.data() + patterns::kMarkdownImage.size());
    static const boost::regex html_image(patterns::kHtmlImage.data(), patterns::kHtmlImage.data() + patterns::kHtmlImage.size());
    static const boost::regex md_link(patterns::kMarkdownLink.data(), patterns::kMarkdownLink.data() + patterns::kMarkdownLink.size());
    if (pattern == patterns::kUrl) return url;
    if (pattern == patterns::kIpv4) return ipv4;
    if (pattern == patterns::kIpv6) return ipv6;
    if (pattern == patterns::kEmail) return email;
    if (pattern == patterns::kPhone) return phone;
    if (pattern == patterns::kDateTime) return datetime;
    if (pattern == patterns::kMarkdownImage) return md_image;
    if (pattern == patterns::kHtmlImage) return html_image;
    return md_link;
}

void collect(std::string_view line, std::string_view pattern, std::vector<Span>& spans) {
    const auto& re = compiled(pattern);
    boost::cregex_iterator it(line.data(), line.data() + line.size(), re);
    for (boost::cregex_iterator end; it != end; ++it) {
        const auto& m = *it;
        if (m.length(0) == 0) continue;
        const auto begin = static_cast<std::size_t>(m[0].first - line.data());
        spans.emplace_back(begin, begin + static_cast<std::size_t>(m.length(0)));
    }
}

bool matches(std::string_view text, std::string_view pattern) {
    return boost::regex_search(text.data(), text.data() + text.size(), compiled(pattern));
}

// Code points covered by the union of spans.
std::size_t covered_chars(std::string_view line, std::vector<Span>& spans) {
    if (spans.empty()) return 0;
    std::sort(spans.begin(), spans.end());
    std::size_t total = 0;
    std::size_t cur_begin = spans.front().first, cur_end = spans.front().second;
    auto flush = [&] { total += utf8::length(line.substr(cur_begin, cur_end - cur_begin)); };
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first <= cur_end) {
            cur_end = std::max(cur_end, spans[i].second);
        } else {
            flush();
            cur_begin = spans[i].first;
            cur_end = spans[i].second;
        }
    }
    flush();
    return total;
}

bool has_digit(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\f\v");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\f\v");
    return s.substr(b, e - b + 1);
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_garbled(char32_t cp) {
    if (cp == 0xFFFD) return true;
    if (cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f') return false;
    return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp <= 0x9F);
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool enabled(const std::vector<std::string>& rules, std::string_view id) {
    return std::find(rules.begin(), rules.end(), id) != rules.end();
}

// Shared head of both rule sets; returns a reject verdict or nullopt.
std::optional<FilterVerdict> common_rules(const ContentStats& s, const PipelineConfig& cfg,
                                          const std::vector<std::string>& rules) {
    if (enabled(rules, rule::url_ip_ratio) && s.url_ip_char_ratio > cfg.url_ip_ratio) {
        return FilterVerdict::reject(std::string(rule::url_ip_ratio), s.url_ip_char_ratio);
    }
    if (enabled(rules, rule::pii_ratio) && s.pii_char_ratio > cfg.pii_ratio) {
        return FilterVerdict::reject(std::string(rule::pii_ratio), s.pii_char_ratio);
    }
    if (enabled(rules, rule::garbled) && s.garbled_ratio > cfg.garbled_ratio) {
        return FilterVerdict::reject(std::string(rule::garbled), s.garbled_ratio);
    }
    const double dup = std::max(s.dup_line_ratio, s.dup_word_ratio);
    if (enabled(rules, rule::duplication) && dup > cfg.duplication_ratio) {
        return FilterVerdict::reject(std::string(rule::duplication), dup);
    }
    return std::nullopt;
}

}  // namespace

ContentStats compute_content_stats(std::string_view content, const std::vector<std::string>& placeholder_tokens) {
    ContentStats s;
    if (content.empty()) return s;

    std::size_t garbled = 0;
    for (std::size_t pos = 0; pos < content.size();) {
        if (is_garbled(utf8::next(content, pos))) ++garbled;
        ++s.total_chars;
    }

    std::size_t url_chars = 0, pii_chars = 0;
    std::size_t line_len_sum = 0;
    std::size_t non_blank = 0, link_lines = 0;
    std::unordered_set<std::string_view> distinct_lines;
    std::size_t words = 0;
    std::unordered_set<std::string_view> distinct_words;
    std::vector<Span> spans;

    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        ++s.total_lines;
        const std::size_t len = utf8::length(line);
        line_len_sum += len;
        s.max_line_len = std::max(s.max_line_len, len);

        const auto trimmed = trim(line);
        if (!trimmed.empty()) {
            ++non_blank;
            distinct_lines.insert(trimmed);
        }

        for (std::size_t i = 0; i < line.size();) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            const std::size_t w = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > w) {
                ++words;
                distinct_words.insert(line.substr(w, i - w));
            }
        }

        spans.clear();
        const bool maybe_url = line.find("://") != std::string_view::npos || line.find("www.") != std::string_view::npos;
        if (maybe_url) collect(line, patterns::kUrl, spans);
        const bool digits = has_digit(line);
        if (digits && line.find('.') != std::string_view::npos) collect(line, patterns::kIpv4, spans);
        if (line.find(':') != std::string_view::npos) collect(line, patterns::kIpv6, spans);
        url_chars += covered_chars(line, spans);
        const bool url_in_line = maybe_url && !spans.empty();

        spans.clear();
        if (line.find('@') != std::string_view::npos) collect(line, patterns::kEmail, spans);
        if (digits) {
            collect(line, patterns::kPhone, spans);
            collect(line, patterns::kDateTime, spans);
        }
        pii_chars += covered_chars(line, spans);

        if (!trimmed.empty()) {
            bool link = false;
            if (url_in_line) {
                std::vector<Span> urls;
                collect(line, patterns::kUrl, urls);
                link = !urls.empty();
            }
            if (!link && line.find("](") != std::string_view::npos) link = matches(line, patterns::kMarkdownLink);
            if (link) ++link_lines;
        }
    }

    s.avg_line_len = ratio(line_len_sum, s.total_lines);
    s.url_ip_char_ratio = ratio(url_chars, s.total_chars);
    s.pii_char_ratio = ratio(pii_chars, s.total_chars);
    s.garbled_ratio = ratio(garbled, s.total_chars);
    s.dup_line_ratio = ratio(non_blank - distinct_lines.size(), non_blank);
    s.dup_word_ratio = ratio(words - distinct_words.size(), words);
    s.link_line_ratio = ratio(link_lines, non_blank);

    s.has_image_ref = (content.find("![") != std::string_view::npos && matches(content, patterns::kMarkdownImage)) ||
                      matches(content, patterns::kHtmlImage);
    if (!placeholder_tokens.empty()) {
        const std::string lowered = lower_ascii(content);
        for (const auto& token : placeholder_tokens) {
            if (!token.empty() && lowered.find(lower_ascii(token)) != std::string::npos) {
                s.has_placeholder = true;
                break;
            }
        }
    }
    return s;
}

FilterVerdict evaluate_source_rules(const ContentStats& s, const PipelineConfig& cfg) {
    const auto& rules = cfg.source_rules;
    if (auto v = common_rules(s, cfg, rules)) return *v;
    if (enabled(rules, rule::max_line_len) && s.max_line_len > cfg.max_line_len) {
        return FilterVerdict::reject(std::string(rule::max_line_len), static_cast<double>(s.max_line_len));
    }
    if (enabled(rules, rule::avg_line_len) && s.avg_line_len > cfg.avg_line_len) {
        return FilterVerdict::reject(std::string(rule::avg_line_len), s.avg_line_len);
    }
    return FilterVerdict::accept();
}

FilterVerdict evaluate_text_rules(const ContentStats& s, const PipelineConfig& cfg) {
    const auto& rules = cfg.text_rules;
    if (auto v = common_rules(s, cfg, rules)) return *v;
    if (enabled(rules, rule::image_reference) && s.has_image_ref) {
        return FilterVerdict::reject(std::string(rule::image_reference), 1.0);
    }
    if (enabled(rules, rule::placeholder) && s.has_placeholder) {
        return FilterVerdict::reject(std::string(rule::placeholder), 1.0);
    }
    if (enabled(rules, rule::link_density) && s.link_line_ratio > cfg.link_line_ratio) {
        return FilterVerdict::reject(std::string(rule::link_density), s.link_line_ratio);
    }
    return FilterVerdict::accept();
}

FilterVerdict filter_source(const CorpusRecord& record, const PipelineConfig& cfg) {
    if (record.kind != RecordKind::source_code && record.kind != RecordKind::repo_file) {
        throw UsageError("filter_source: record " + record.id + " has kind " + std::string(to_string(record.kind)));
    }
    return evaluate_source_rules(compute_content_stats(record.content), cfg);
}

FilterVerdict filter_text(const CorpusRecord& record, const PipelineConfig& cfg) {
    if (record.kind != RecordKind::text) {
        throw UsageError("filter_text: record " + record.id + " has kind " + std::string(to_string(record.kind)));
    }
    return evaluate_text_rules(compute_content_stats(record.content, cfg.placeholder_tokens), cfg);
}

FilterVerdict apply_toxicity(const CorpusRecord& record, FilterVerdict verdict, const ToxicityPredicate& predicate) {
    if (!verdict.keep || !predicate) return verdict;
    if (predicate(record)) return FilterVerdict::reject(std::string(rule::toxicity));
    return verdict;
}

void FilterReport::add(const FilterVerdict& verdict) {
    ++input;
    if (verdict.keep) {
        ++kept;
    } else {
        ++rejected_by_rule[verdict.rule_id.value_or("unknown")];
    }
}

void FilterReport::merge(const FilterReport& other) {
    input += other.input;
    kept += other.kept;
    for (const auto& [rule_id, n] : other.rejected_by_rule) rejected_by_rule[rule_id] += n;
}

std::size_t FilterReport::rejected() const {
    std::size_t n = 0;
    for (const auto& [rule_id, count] : rejected_by_rule) n += count;
    return n;
}

}  // namespace corpuskit
