#pragma once

// Random mini corpora rendered twice from one ground truth: as PostRecords for
// the real pipeline and as flat oracle occurrences for the brute-force path.

#include <cstdint>
#include <string>
#include <vector>

#include "hashspread/index.hpp"
#include "hashspread/ingest.hpp"
#include "hashspread/location.hpp"

#include "oracle.hpp"

namespace testsupport {

struct MiniCorpus {
    std::vector<hashspread::PostRecord> records;
    hashspread::LocationTable locations;
    oracle::Corpus truth;
    std::vector<std::string> city_ids;
    std::vector<std::string> tags;
};

struct MiniCorpusOptions {
    std::uint32_t max_cities = 10;
    std::uint32_t max_posts = 120;
    std::uint64_t max_uses_per_hashtag = 50;
    double p_second_tag = 0.15;
    double p_duplicate_tag = 0.05;
    double p_repeat_timestamp = 0.10;
};

MiniCorpus make_mini_corpus(std::uint64_t seed, const MiniCorpusOptions& options = {});

hashspread::OccurrenceIndex build_index(const MiniCorpus& corpus);

}  // namespace testsupport
