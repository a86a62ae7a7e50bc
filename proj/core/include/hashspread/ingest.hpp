#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "hashspread/timeutil.hpp"

namespace hashspread {

struct PostRecord {
    std::string post_id;
    std::string user_id;
    std::string location_id;
    Instant timestamp = 0;
    std::string text;
    std::uint32_t comment_count = 0;  // optional in the input; 0 when absent

    bool operator==(const PostRecord&) const = default;
};

enum class CorpusFormat { jsonl, csv };

// Inclusive bounds on record timestamps.
struct TimeWindow {
    Instant since = INT64_MIN;
    Instant until = INT64_MAX;

    bool contains(Instant t) const { return t >= since && t <= until; }
};

struct ParseStats {
    std::uint64_t parsed = 0;
    std::map<std::string, std::uint64_t> skipped;  // reason -> count

    std::uint64_t total_skipped() const;
    std::uint64_t skipped_for(const std::string& reason) const;
};

using RecordSink = std::function<void(PostRecord&&)>;

// Streams records from a JSONL or CSV corpus into `sink`. Malformed lines are
// counted per reason and skipped, never fatal; an unreadable file throws.
ParseStats parse_corpus(const std::string& path, CorpusFormat format, const RecordSink& sink,
                        const std::optional<TimeWindow>& window = std::nullopt);

ParseStats parse_corpus(std::istream& in, CorpusFormat format, const RecordSink& sink,
                        const std::optional<TimeWindow>& window = std::nullopt);

// One JSON object per line, matching what parse_corpus reads back.
void write_jsonl_record(std::ostream& out, const PostRecord& record);

std::optional<CorpusFormat> parse_format_name(const std::string& name);

}  // namespace hashspread
