#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace corpuskit {

enum class RecordKind { source_code, text, coco, repo_file };

std::string_view to_string(RecordKind kind);
std::optional<RecordKind> parse_record_kind(std::string_view name);

/// Scalar metadata value. Integers and floats are kept apart so they round-trip with their type.
using MetaValue = std::variant<std::int64_t, double, std::string>;
using Meta = std::map<std::string, MetaValue>;

/// Meta key written by the loader when invalid UTF-8 had to be repaired.
inline constexpr std::string_view kUtf8ReplacementsKey = "utf8_replacements";

struct CorpusRecord {
    std::string id;
    RecordKind kind = RecordKind::text;
    std::optional<std::string> language;
    std::string content;
    std::optional<std::string> path;
    std::optional<std::string> repo_id;
    Meta meta;

    std::optional<std::int64_t> meta_int(const std::string& key) const;
    std::optional<double> meta_number(const std::string& key) const;
    std::optional<std::string> meta_string(const std::string& key) const;

    bool operator==(const CorpusRecord&) const = default;
};

/// Outcome of a filter. `rule_id` is set exactly when the record is rejected.
struct FilterVerdict {
    bool keep = true;
    std::optional<std::string> rule_id;
    std::optional<double> measured;

    static FilterVerdict accept() { return {}; }
    static FilterVerdict reject(std::string rule, std::optional<double> measured = std::nullopt) {
        return {false, std::move(rule), measured};
    }

    bool operator==(const FilterVerdict&) const = default;
};

struct LoadResult {
    std::vector<CorpusRecord> records;
    std::size_t malformed_lines = 0;
    /// 1-based line numbers of skipped lines, for diagnostics.
    std::vector<std::size_t> malformed_line_numbers;
};

/// Parses one serialized record. Returns nullopt for a malformed line.
std::optional<CorpusRecord> parse_record_line(std::string_view line);

/// Serializes one record to a single line (no trailing newline).
std::string serialize_record(const CorpusRecord& record);

/// Reads newline-delimited records. Blank lines are ignored; malformed lines are
/// counted and skipped. Throws SchemaError on a duplicate id and IoError when the
/// stream goes bad.
LoadResult load_records(std::istream& in);

/// Incremental form of load_records for streaming consumers.
class RecordReader {
public:
    explicit RecordReader(std::istream& in) : in_(in) {}

    /// Next well-formed record, or nullopt at end of stream.
    std::optional<CorpusRecord> next();

    std::size_t malformed_lines() const noexcept { return malformed_; }
    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
    std::size_t malformed_ = 0;
    std::vector<std::size_t> malformed_numbers_;
    std::unordered_set<std::string> seen_ids_;

    friend LoadResult load_records(std::istream& in);
};

void save_records(const std::vector<CorpusRecord>& records, std::ostream& out);
void write_record(const CorpusRecord& record, std::ostream& out);

}  // namespace corpuskit
