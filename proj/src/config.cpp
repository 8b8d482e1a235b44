#include "corpuskit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "corpuskit/errors.hpp"

namespace corpuskit {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
        return std::string(v.substr(1, v.size() - 2));
    }
    return std::string(v);
}

double parse_double(const std::string& key, std::string_view text) {
    const std::string s(text);
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(key, "expected a number, got '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(value)) throw ValidationError(key, "expected a number, got '" + s + "'");
    return value;
}

std::uint64_t parse_count(const std::string& key, std::string_view text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> parse_list(std::string_view text) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        auto item = trim(text.substr(start, comma - start));
        if (!item.empty()) items.push_back(unquote(item));
        start = comma + 1;
    }
    return items;
}

// Shortest text that parses back to the same value.
std::string render_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string render_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        // Quote items with leading/trailing spaces so they survive trimming.
        const auto& item = items[i];
        if (!item.empty() && (item.front() == ' ' || item.back() == ' ')) {
            out += '"' + item + '"';
        } else {
            out += item;
        }
    }
    return out;
}

struct Field {
    std::string name;
    std::function<void(PipelineConfig&, std::string_view)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

Field ratio(std::string name, double PipelineConfig::*member, bool open_low = false) {
    return {name,
            [name, member, open_low](PipelineConfig& c, std::string_view v) {
                const double x = parse_double(name, v);
                if (x < 0.0 || x > 1.0 || (open_low && x == 0.0)) {
                    throw ValidationError(name, std::string("value ") + render_double(x) + " outside " +
                                                    (open_low ? "(0, 1]" : "[0, 1]"));
                }
                c.*member = x;
            },
            [member](const PipelineConfig& c) { return render_double(c.*member); }};
}

Field number(std::string name, double PipelineConfig::*member, double lo, double hi, bool open_low = false) {
    return {name,
            [=](PipelineConfig& c, std::string_view v) {
                const double x = parse_double(name, v);
                if (x < lo || x > hi || (open_low && x == lo)) {
                    throw ValidationError(name, "value " + render_double(x) + " outside its domain");
                }
                c.*member = x;
            },
            [member](const PipelineConfig& c) { return render_double(c.*member); }};
}

template <typename T>
Field count(std::string name, T PipelineConfig::*member, std::uint64_t min_value = 0) {
    return {name,
            [=](PipelineConfig& c, std::string_view v) {
                const auto x = parse_count(name, v);
                if (x < min_value) {
                    throw ValidationError(name, "must be at least " + std::to_string(min_value));
                }
                c.*member = static_cast<T>(x);
            },
            [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
}

Field text(std::string name, std::string PipelineConfig::*member,
           std::function<void(const std::string&)> check = {}) {
    return {name,
            [=](PipelineConfig& c, std::string_view v) {
                auto s = unquote(v);
                if (check) check(s);
                c.*member = std::move(s);
            },
            [member](const PipelineConfig& c) { return c.*member; }};
}

Field list(std::string name, std::vector<std::string> PipelineConfig::*member,
           std::set<std::string> allowed = {}) {
    return {name,
            [=](PipelineConfig& c, std::string_view v) {
                auto items = parse_list(v);
                for (const auto& item : items) {
                    if (!allowed.empty() && !allowed.count(item)) {
                        throw ValidationError(name, "unknown rule '" + item + "'");
                    }
                }
                c.*member = std::move(items);
            },
            [member](const PipelineConfig& c) { return render_list(c.*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        const std::set<std::string> source_rules = {"url_ip_ratio", "pii_ratio",    "garbled",
                                                    "duplication",  "max_line_len", "avg_line_len"};
        const std::set<std::string> text_rules = {"url_ip_ratio",    "pii_ratio",   "garbled",     "duplication",
                                                  "image_reference", "placeholder", "link_density"};
        std::vector<Field> f = {
            ratio("url_ip_ratio", &PipelineConfig::url_ip_ratio),
            ratio("pii_ratio", &PipelineConfig::pii_ratio),
            ratio("garbled_ratio", &PipelineConfig::garbled_ratio),
            ratio("duplication_ratio", &PipelineConfig::duplication_ratio),
            count("max_line_len", &PipelineConfig::max_line_len, 1),
            number("avg_line_len", &PipelineConfig::avg_line_len, 0.0, std::numeric_limits<double>::max(), true),
            ratio("link_line_ratio", &PipelineConfig::link_line_ratio),
            list("placeholder_tokens", &PipelineConfig::placeholder_tokens),
            list("source_rules", &PipelineConfig::source_rules, source_rules),
            list("text_rules", &PipelineConfig::text_rules, text_rules),
            number("quality_threshold", &PipelineConfig::quality_threshold, 0.0, 100.0),
            ratio("dedup_threshold", &PipelineConfig::dedup_threshold, true),
            count("dedup_shingle_k", &PipelineConfig::dedup_shingle_k, 1),
            count("dedup_num_perm", &PipelineConfig::dedup_num_perm, 1),
            count("dedup_bands", &PipelineConfig::dedup_bands, 1),
            count("dedup_rows", &PipelineConfig::dedup_rows, 1),
            count("dedup_seed", &PipelineConfig::dedup_seed),
            ratio("repo_min_quality", &PipelineConfig::repo_min_quality),
            ratio("repo_min_comment_ratio", &PipelineConfig::repo_min_comment_ratio),
            number("repo_min_effective_loc", &PipelineConfig::repo_min_effective_loc, 0.0,
                   std::numeric_limits<double>::max()),
            text("separator_template", &PipelineConfig::separator_template,
                 [](const std::string& s) {
                     if (s != "auto" && (s.find("{path}") == std::string::npos || s.find('\n') != std::string::npos)) {
                         throw ValidationError("separator_template",
                                               "must be 'auto' or a single line containing {path}");
                     }
                 }),
            count("coco_min_code_chars", &PipelineConfig::coco_min_code_chars),
            count("coco_max_code_chars", &PipelineConfig::coco_max_code_chars, 1),
            count("coco_min_code_lines", &PipelineConfig::coco_min_code_lines),
            count("coco_max_code_lines", &PipelineConfig::coco_max_code_lines, 1),
            count("coco_min_comment_chars", &PipelineConfig::coco_min_comment_chars),
            count("coco_max_comment_chars", &PipelineConfig::coco_max_comment_chars, 1),
            ratio("coco_special_ratio", &PipelineConfig::coco_special_ratio),
            list("coco_annotation_markers", &PipelineConfig::coco_annotation_markers),
            text("scorer_endpoint", &PipelineConfig::scorer_endpoint),
            text("scorer_model", &PipelineConfig::scorer_model),
            count("scorer_max_retries", &PipelineConfig::scorer_max_retries),
            count("scorer_concurrency", &PipelineConfig::scorer_concurrency, 1),
            text("scorer_api_key_env", &PipelineConfig::scorer_api_key_env),
        };
        std::sort(f.begin(), f.end(), [](const Field& a, const Field& b) { return a.name < b.name; });
        return f;
    }();
    return table;
}

const Field& field(std::string_view key) {
    const auto& table = fields();
    auto it = std::lower_bound(table.begin(), table.end(), key,
                               [](const Field& f, std::string_view k) { return f.name < k; });
    if (it == table.end() || it->name != key) throw ValidationError(std::string(key), "unknown configuration key");
    return *it;
}

void check_cross_field(const PipelineConfig& c) {
    if (c.dedup_bands * c.dedup_rows != c.dedup_num_perm) {
        throw ValidationError("dedup_bands", "dedup_bands * dedup_rows must equal dedup_num_perm");
    }
    if (c.coco_min_code_chars > c.coco_max_code_chars) {
        throw ValidationError("coco_min_code_chars", "exceeds coco_max_code_chars");
    }
    if (c.coco_min_code_lines > c.coco_max_code_lines) {
        throw ValidationError("coco_min_code_lines", "exceeds coco_max_code_lines");
    }
    if (c.coco_min_comment_chars > c.coco_max_comment_chars) {
        throw ValidationError("coco_min_comment_chars", "exceeds coco_max_comment_chars");
    }
}

}  // namespace

std::string PipelineConfig::to_text() const {
    std::string out;
    for (const auto& f : fields()) out += f.name + " = " + f.get(*this) + "\n";
    return out;
}

void apply_config_override(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    PipelineConfig next = cfg;
    field(trim(key)).set(next, trim(value));
    check_cross_field(next);
    cfg = std::move(next);
}

PipelineConfig load_config(std::string_view text) {
    PipelineConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        // A '#' starts a comment unless it sits inside a quoted value.
        bool in_quote = false;
        char quote = 0;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (in_quote) {
                if (c == quote) in_quote = false;
            } else if (c == '"' || c == '\'') {
                in_quote = true;
                quote = c;
            } else if (c == '#') {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& f = field(key);
        if (!seen.insert(std::string(key)).second) throw ValidationError(std::string(key), "key given twice");
        f.set(cfg, value);
    }
    check_cross_field(cfg);
    return cfg;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.name);
    return keys;
}

}  // namespace corpuskit
