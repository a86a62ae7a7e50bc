#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashspread/ingest.hpp"
#include "hashspread/location.hpp"
#include "hashspread/timeutil.hpp"

namespace hashspread {

using UserRef = std::uint32_t;
using PostRef = std::uint32_t;

// One hashtag use. Lists are sorted by timestamp, ties by post id.
struct Occurrence {
    Instant ts = 0;
    LocationRef location = 0;
    UserRef user = 0;
    PostRef post = 0;
};

// Text-derived facts about one post, kept so metric passes never re-read the corpus.
struct PostInfo {
    std::string id;
    std::uint32_t comment_count = 0;
    std::uint16_t hashtag_count = 0;
    bool has_exclamation = false;
    bool has_question = false;
};

struct HashtagInfo {
    std::string canonical;
    std::string display;  // first-seen raw spelling
    std::uint64_t begin = 0;
    std::uint64_t count = 0;
};

struct IndexTotals {
    std::uint64_t uses = 0;
    std::uint64_t distinct_hashtags = 0;
    std::uint64_t messages = 0;
    std::uint64_t users = 0;
    std::uint64_t locations = 0;

    bool operator==(const IndexTotals&) const = default;
};

struct BuildOptions {
    bool fold_case = true;
    int tz_offset_minutes = 0;
    // Optional location aliasing (e.g. merging city districts): occurrences in
    // key ids are attributed to the mapped id before lookup.
    std::unordered_map<std::string, std::string> location_aliases;
};

struct BuildCounters {
    std::uint64_t records_seen = 0;
    std::uint64_t unknown_location_records = 0;
    std::uint64_t unknown_location_occurrences = 0;
    std::uint64_t records_without_hashtags = 0;
};

// Per-location view used by the influence metrics: for every location, the
// hashtags used there with their timestamp runs.
struct LocalHashtagSpan {
    std::uint32_t hashtag = 0;  // index into the owning OccurrenceIndex
    std::uint64_t begin = 0;    // into the view's timestamp array
    std::uint64_t count = 0;
};

// Immutable after construction; all reads are concurrency-safe.
class OccurrenceIndex {
public:
    class Builder {
    public:
        explicit Builder(LocationTable locations, BuildOptions options = {});

        void add(const PostRecord& record);
        OccurrenceIndex finish();

        const BuildCounters& counters() const { return counters_; }

    private:
        struct RawOccurrence {
            Instant ts;
            std::uint32_t tag;
            LocationRef location;
            UserRef user;
            PostRef post;
        };

        LocationTable locations_;
        BuildOptions options_;
        BuildCounters counters_;
        std::vector<std::string> tag_canonical_;
        std::vector<std::string> tag_display_;
        std::unordered_map<std::string, std::uint32_t> tag_ids_;
        std::vector<std::string> users_;
        std::unordered_map<std::string, UserRef> user_ids_;
        std::vector<PostInfo> posts_;
        std::vector<RawOccurrence> raw_;
        std::vector<std::uint64_t> location_post_counts_;
        bool finished_ = false;
    };

    OccurrenceIndex() = default;

    static OccurrenceIndex build(const std::vector<PostRecord>& records, LocationTable locations,
                                 BuildOptions options = {}, BuildCounters* counters = nullptr);

    std::size_t hashtag_count() const { return hashtags_.size(); }
    const HashtagInfo& hashtag(std::size_t i) const { return hashtags_[i]; }
    std::optional<std::size_t> find(std::string_view canonical) const;

    // Index of the hashtag or throws std::out_of_range naming it.
    std::size_t require(std::string_view canonical) const;

    std::span<const Occurrence> occurrences(std::size_t i) const;
    Instant first_use(std::size_t i) const;
    DayNumber occurrence_day(const Occurrence& o) const;

    const IndexTotals& totals() const { return totals_; }
    const LocationTable& locations() const;
    const PostInfo& post(PostRef ref) const;
    std::string_view user_id(UserRef ref) const;
    std::size_t post_table_size() const;
    std::size_t user_table_size() const;

    bool folded() const;
    int tz_offset_minutes() const;

    // Retains hashtags whose earliest occurrence is at or after `cutoff`.
    // Shares occurrence storage with this index.
    OccurrenceIndex filter_first_use(Instant cutoff) const;

    // Location-major access (built lazily, thread-safe).
    std::span<const LocalHashtagSpan> location_hashtags(LocationRef loc) const;
    std::span<const Instant> local_timestamps(const LocalHashtagSpan& span) const;

    void save(const std::string& path) const;
    static OccurrenceIndex load(const std::string& path);
    void write_totals_json(const std::string& path) const;

private:
    struct Storage {
        LocationTable locations;
        std::vector<std::string> users;
        std::vector<PostInfo> posts;
        std::vector<Occurrence> pool;
        bool folded = true;
        int tz_offset_minutes = 0;
    };

    struct LocationView {
        std::vector<Instant> ts;
        std::vector<LocalHashtagSpan> spans;
        std::vector<std::uint64_t> span_begin;  // per location, size L+1
    };

    struct ViewCell {
        std::once_flag once;
        LocationView view;
    };

    OccurrenceIndex(std::shared_ptr<const Storage> storage, std::vector<HashtagInfo> hashtags);

    void recompute_totals();
    const LocationView& location_view() const;

    std::shared_ptr<const Storage> storage_;
    std::vector<HashtagInfo> hashtags_;  // sorted by canonical
    IndexTotals totals_;
    std::shared_ptr<ViewCell> view_cell_;

    friend class Builder;
};

// Histogram rows (x, number_of_hashtags) sorted by x ascending.
using HistogramRow = std::pair<std::uint64_t, std::uint64_t>;
std::vector<HistogramRow> occurrence_histogram(const OccurrenceIndex& index);
std::vector<HistogramRow> location_histogram(const OccurrenceIndex& index);

// Half-open occurrence buckets [e_i, e_i+1), last bucket unbounded. Hashtags
// below the first edge are excluded. Edges must be ascending with the first
// edge >= 2.
struct OccurrenceBuckets {
    std::vector<std::uint64_t> edges;
    std::vector<std::vector<std::uint32_t>> members;  // hashtag indices per bucket
};
OccurrenceBuckets partition_by_occurrences(const OccurrenceIndex& index,
                                           std::vector<std::uint64_t> edges);

}  // namespace hashspread
