#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hashspread/classify.hpp"
#include "hashspread/index.hpp"
#include "hashspread/ingest.hpp"
#include "hashspread/location.hpp"
#include "hashspread/timeutil.hpp"

namespace hashspread::synth {

using classify::HashtagClass;

struct ClassMix {
    std::uint32_t local_event = 0;
    std::uint32_t local_phenomenon = 0;
    std::uint32_t event = 0;
    std::uint32_t other_meme = 0;

    std::uint32_t total() const { return local_event + local_phenomenon + event + other_meme; }
};

struct WorldSpec {
    std::uint32_t cities = 200;
    std::uint32_t hashtags = 2000;
    std::uint64_t target_uses = 1'000'000;
    std::uint64_t seed = 7;
    std::optional<ClassMix> class_mix;  // default: as even a split as possible
    Instant window_start = 1451606400;  // 2016-01-01T00:00:00Z
    Instant window_end = 1501545600;    // 2017-08-01T00:00:00Z
    std::uint32_t min_uses_per_hashtag = 32;
    std::uint32_t users = 50'000;
    double zipf_exponent = 1.0;
    // coordinate box roughly covering Germany
    double lat_min = 47.0, lat_max = 55.0;
    double lon_min = 6.0, lon_max = 15.0;
};

struct World {
    struct City {
        std::string id;
        std::string name;
        double lat = 0.0;
        double lon = 0.0;
        double weight = 0.0;  // population share; city 0 is the largest
        std::uint64_t user_base = 0;
        std::uint32_t user_count = 0;
    };
    std::vector<City> cities;

    LocationTable location_table() const;
    void write_locations_csv(const std::string& path) const;
};

// Deterministic per seed: city coordinates, Zipf population weights, and the
// per-city user pools.
World make_world(const WorldSpec& spec);

struct LedgerEntry {
    std::string tag;
    HashtagClass hashtag_class = HashtagClass::LocalEvent;
    std::string seed_city;
    std::uint64_t uses = 0;
    std::uint64_t posts = 0;
    // exact occurrence counts per (city, day)
    std::map<std::string, std::map<DayNumber, std::uint64_t>> cells;
};

struct Ledger {
    std::uint64_t seed = 0;
    std::uint64_t uses = 0;
    std::uint64_t posts = 0;
    std::uint64_t hashtags = 0;
    std::uint64_t users = 0;
    std::uint64_t locations = 0;
    std::array<std::uint64_t, classify::kClassCount> class_counts{};
    std::vector<LedgerEntry> entries;  // empty when ledger disabled

    void save(const std::string& path) const;
    static Ledger load(const std::string& path);
};

// Streams the corpus into `sink` in deterministic hashtag order (each hashtag
// drawn from its own sub-seeded generator). Same spec => identical records.
Ledger generate(const WorldSpec& spec, const World& world, const RecordSink& sink,
                bool with_entries = true);

struct GeneratedFiles {
    Ledger ledger;
    std::uint64_t corpus_bytes = 0;
};
GeneratedFiles generate_to_files(const WorldSpec& spec, const std::string& corpus_path,
                                 const std::string& ledger_path = {},
                                 const std::string& locations_path = {},
                                 const std::string& labels_path = {});

void write_labels_csv(const Ledger& ledger, const std::string& path);

struct VerifyReport {
    std::uint64_t discrepancies = 0;  // L1 distance over (hashtag, city, day) cells
    bool totals_match = true;
    std::vector<std::string> notes;

    bool clean() const { return discrepancies == 0 && totals_match; }
};

// Recomputes per-(hashtag, city, day) counts and global totals from the index
// and diffs them against the ledger.
VerifyReport verify(const OccurrenceIndex& index, const Ledger& ledger);

}  // namespace hashspread::synth
