#include "corpuskit/record.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "corpuskit/errors.hpp"
#include "corpuskit/utf8.hpp"

namespace corpuskit {

using nlohmann::json;

std::string_view to_string(RecordKind kind) {
    switch (kind) {
        case RecordKind::source_code: return "source_code";
        case RecordKind::text: return "text";
        case RecordKind::coco: return "coco";
        case RecordKind::repo_file: return "repo_file";
    }
    return "text";
}

std::optional<RecordKind> parse_record_kind(std::string_view name) {
    if (name == "source_code") return RecordKind::source_code;
    if (name == "text") return RecordKind::text;
    if (name == "coco") return RecordKind::coco;
    if (name == "repo_file") return RecordKind::repo_file;
    return std::nullopt;
}

std::optional<std::int64_t> CorpusRecord::meta_int(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    if (auto* d = std::get_if<double>(&it->second); d && std::trunc(*d) == *d) {
        return static_cast<std::int64_t>(*d);
    }
    return std::nullopt;
}

std::optional<double> CorpusRecord::meta_number(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*v);
    if (auto* d = std::get_if<double>(&it->second)) return *d;
    return std::nullopt;
}

std::optional<std::string> CorpusRecord::meta_string(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    if (auto* s = std::get_if<std::string>(&it->second)) return *s;
    return std::nullopt;
}

namespace {

// Optional string field: absent and null both mean "not set"; any other type is malformed.
bool read_optional_string(const json& obj, const char* key, std::optional<std::string>& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return true;
    if (!it->is_string()) return false;
    out = it->get<std::string>();
    return true;
}

std::optional<CorpusRecord> from_json(const json& obj) {
    if (!obj.is_object()) return std::nullopt;
    CorpusRecord r;

    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) return std::nullopt;
    r.id = id->get<std::string>();

    auto kind = obj.find("kind");
    if (kind == obj.end() || !kind->is_string()) return std::nullopt;
    auto parsed_kind = parse_record_kind(kind->get_ref<const std::string&>());
    if (!parsed_kind) return std::nullopt;
    r.kind = *parsed_kind;

    auto content = obj.find("content");
    if (content == obj.end() || !content->is_string()) return std::nullopt;
    r.content = content->get<std::string>();

    if (!read_optional_string(obj, "language", r.language) || !read_optional_string(obj, "path", r.path) ||
        !read_optional_string(obj, "repo_id", r.repo_id)) {
        return std::nullopt;
    }

    if (auto meta = obj.find("meta"); meta != obj.end() && !meta->is_null()) {
        if (!meta->is_object()) return std::nullopt;
        for (const auto& [key, value] : meta->items()) {
            if (value.is_number_integer()) {
                if (value.is_number_unsigned() &&
                    value.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                    return std::nullopt;
                }
                r.meta.emplace(key, value.get<std::int64_t>());
            } else if (value.is_number_float()) {
                r.meta.emplace(key, value.get<double>());
            } else if (value.is_string()) {
                r.meta.emplace(key, value.get<std::string>());
            } else {
                return std::nullopt;
            }
        }
    }
    return r;
}

}  // namespace

std::optional<CorpusRecord> parse_record_line(std::string_view line) {
    auto repaired = utf8::repair(line);
    json obj = json::parse(repaired.text, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) return std::nullopt;
    auto record = from_json(obj);
    if (record && repaired.replacements > 0) {
        record->meta[std::string(kUtf8ReplacementsKey)] = static_cast<std::int64_t>(repaired.replacements);
    }
    return record;
}

std::string serialize_record(const CorpusRecord& record) {
    json obj;
    obj["id"] = record.id;
    obj["kind"] = std::string(to_string(record.kind));
    obj["content"] = record.content;
    if (record.language) obj["language"] = *record.language;
    if (record.path) obj["path"] = *record.path;
    if (record.repo_id) obj["repo_id"] = *record.repo_id;
    if (!record.meta.empty()) {
        json meta = json::object();
        for (const auto& [key, value] : record.meta) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (!std::isfinite(v)) {
                            throw SerializationError("record " + record.id + ": meta." + key + " is not finite");
                        }
                    }
                    meta[key] = v;
                },
                value);
        }
        obj["meta"] = std::move(meta);
    }
    try {
        return obj.dump();
    } catch (const json::type_error& e) {
        throw SerializationError("record " + record.id + ": " + e.what());
    }
}

std::optional<CorpusRecord> RecordReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto record = parse_record_line(line);
        if (!record) {
            ++malformed_;
            malformed_numbers_.push_back(line_no_);
            continue;
        }
        if (!seen_ids_.insert(record->id).second) {
            throw SchemaError("duplicate record id '" + record->id + "' at line " + std::to_string(line_no_));
        }
        return record;
    }
    if (in_.bad()) throw IoError("record stream unreadable after line " + std::to_string(line_no_));
    return std::nullopt;
}

LoadResult load_records(std::istream& in) {
    if (!in.good() && !in.eof()) throw IoError("record stream unreadable");
    RecordReader reader(in);
    LoadResult result;
    while (auto record = reader.next()) result.records.push_back(std::move(*record));
    result.malformed_lines = reader.malformed_;
    result.malformed_line_numbers = std::move(reader.malformed_numbers_);
    return result;
}

void write_record(const CorpusRecord& record, std::ostream& out) {
    out << serialize_record(record) << '\n';
    if (!out) throw IoError("failed writing record " + record.id);
}

void save_records(const std::vector<CorpusRecord>& records, std::ostream& out) {
    for (const auto& r : records) write_record(r, out);
}

}  // namespace corpuskit
