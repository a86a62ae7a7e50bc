#include "hashspread/ingest.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "hashspread/csv.hpp"

namespace hashspread {

std::uint64_t ParseStats::total_skipped() const {
    std::uint64_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

std::uint64_t ParseStats::skipped_for(const std::string& reason) const {
    auto it = skipped.find(reason);
    return it == skipped.end() ? 0 : it->second;
}

namespace {

const char* kMalformedJson = "malformed_json";
const char* kMissingField = "missing_field";
const char* kBadFieldType = "bad_field_type";
const char* kBadTimestamp = "bad_timestamp";
const char* kOutsideWindow = "outside_window";
const char* kBadColumnCount = "bad_column_count";
const char* kBadHeader = "bad_header";

ParseStats parse_jsonl(std::istream& in, const RecordSink& sink,
                       const std::optional<TimeWindow>& window) {
    ParseStats stats;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            ++stats.skipped[kMalformedJson];
            continue;
        }
        PostRecord rec;
        bool missing = false;
        bool bad_type = false;
        auto take = [&](const char* key, std::string& out) {
            auto it = obj.find(key);
            if (it == obj.end()) {
                missing = true;
            } else if (!it->is_string()) {
                bad_type = true;
            } else {
                out = it->get<std::string>();
            }
        };
        std::string ts_text;
        take("post_id", rec.post_id);
        take("user_id", rec.user_id);
        take("location_id", rec.location_id);
        take("timestamp", ts_text);
        take("text", rec.text);
        if (missing) {
            ++stats.skipped[kMissingField];
            continue;
        }
        if (bad_type) {
            ++stats.skipped[kBadFieldType];
            continue;
        }
        if (auto cc = obj.find("comment_count"); cc != obj.end()) {
            if (cc->is_number_unsigned()) {
                rec.comment_count = cc->get<std::uint32_t>();
            } else {
                ++stats.skipped[kBadFieldType];
                continue;
            }
        }
        auto ts = parse_rfc3339(ts_text);
        if (!ts) {
            ++stats.skipped[kBadTimestamp];
            continue;
        }
        rec.timestamp = *ts;
        if (window && !window->contains(rec.timestamp)) {
            ++stats.skipped[kOutsideWindow];
            continue;
        }
        ++stats.parsed;
        sink(std::move(rec));
    }
    return stats;
}

ParseStats parse_csv(std::istream& in, const RecordSink& sink,
                     const std::optional<TimeWindow>& window) {
    ParseStats stats;
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return stats;

    // Header row gives column positions; the five required names must be present.
    int col_post = -1, col_user = -1, col_loc = -1, col_ts = -1, col_text = -1, col_comments = -1;
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        const std::string& h = fields[static_cast<std::size_t>(i)];
        if (h == "post_id") col_post = i;
        else if (h == "user_id") col_user = i;
        else if (h == "location_id") col_loc = i;
        else if (h == "timestamp") col_ts = i;
        else if (h == "text") col_text = i;
        else if (h == "comment_count") col_comments = i;
    }
    if (col_post < 0 || col_user < 0 || col_loc < 0 || col_ts < 0 || col_text < 0) {
        ++stats.skipped[kBadHeader];
        return stats;
    }
    int max_col = std::max({col_post, col_user, col_loc, col_ts, col_text, col_comments});

    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (static_cast<int>(fields.size()) <= max_col) {
            ++stats.skipped[kBadColumnCount];
            continue;
        }
        PostRecord rec;
        rec.post_id = fields[static_cast<std::size_t>(col_post)];
        rec.user_id = fields[static_cast<std::size_t>(col_user)];
        rec.location_id = fields[static_cast<std::size_t>(col_loc)];
        rec.text = fields[static_cast<std::size_t>(col_text)];
        if (col_comments >= 0) {
            const std::string& c = fields[static_cast<std::size_t>(col_comments)];
            if (!c.empty()) {
                try {
                    rec.comment_count = static_cast<std::uint32_t>(std::stoul(c));
                } catch (const std::exception&) {
                    ++stats.skipped[kBadFieldType];
                    continue;
                }
            }
        }
        auto ts = parse_rfc3339(fields[static_cast<std::size_t>(col_ts)]);
        if (!ts) {
            ++stats.skipped[kBadTimestamp];
            continue;
        }
        rec.timestamp = *ts;
        if (window && !window->contains(rec.timestamp)) {
            ++stats.skipped[kOutsideWindow];
            continue;
        }
        ++stats.parsed;
        sink(std::move(rec));
    }
    return stats;
}

}  // namespace

ParseStats parse_corpus(std::istream& in, CorpusFormat format, const RecordSink& sink,
                        const std::optional<TimeWindow>& window) {
    return format == CorpusFormat::jsonl ? parse_jsonl(in, sink, window)
                                         : parse_csv(in, sink, window);
}

ParseStats parse_corpus(const std::string& path, CorpusFormat format, const RecordSink& sink,
                        const std::optional<TimeWindow>& window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return parse_corpus(in, format, sink, window);
}

void write_jsonl_record(std::ostream& out, const PostRecord& record) {
    nlohmann::json obj;
    obj["post_id"] = record.post_id;
    obj["user_id"] = record.user_id;
    obj["location_id"] = record.location_id;
    obj["timestamp"] = format_rfc3339(record.timestamp);
    obj["text"] = record.text;
    if (record.comment_count != 0) obj["comment_count"] = record.comment_count;
    out << obj.dump() << '\n';
}

std::optional<CorpusFormat> parse_format_name(const std::string& name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "csv") return CorpusFormat::csv;
    return std::nullopt;
}

}  // namespace hashspread
