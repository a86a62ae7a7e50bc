#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hashspread/index.hpp"

namespace hashspread {

struct ImpactScore {
    LocationRef source = 0;
    LocationRef target = 0;
    double score = 0.0;  // in [-1, 1]
    std::uint64_t hashtags_considered = 0;
};

struct SimilarityScore {
    LocationRef a = 0;
    LocationRef b = 0;
    double score = 0.0;  // |top-n(a) and top-n(b)| / n
    double distance_km = 0.0;
};

// Ordering score for one hashtag between two cities: +1 when every use in A
// precedes every use in B (or B never used it), -1 for the reverse, and the
// normalized pair-ordering statistic (#{t_a < t_b} - #{t_a > t_b}) / (nA*nB)
// in between; simultaneous uses count as neither. Undefined when the hashtag
// is absent from both cities. Only the order of timestamps matters.
std::optional<double> hashtag_impact(const OccurrenceIndex& index, std::size_t tag,
                                     LocationRef a, LocationRef b);
std::optional<double> hashtag_impact(const OccurrenceIndex& index, std::string_view hashtag,
                                     std::string_view a, std::string_view b);

// Mean hashtag impact over every hashtag occurring in at least one of the two
// cities. Nullopt when no hashtag qualifies. Throws when a == b.
std::optional<ImpactScore> spatial_impact(const OccurrenceIndex& index, LocationRef a,
                                          LocationRef b);
std::optional<ImpactScore> spatial_impact(const OccurrenceIndex& index, std::string_view a,
                                          std::string_view b);

// Histogram over [-1, 1] of spatial_impact(source -> t) for the top_k highest
// ranked locations t (source excluded). Pairs with no qualifying hashtag are
// not counted.
struct ImpactHistogram {
    std::uint32_t bins = 0;
    std::vector<std::uint64_t> counts;    // size bins, over [-1, 1]
    std::uint64_t undefined_targets = 0;  // pairs sharing no hashtag
};
ImpactHistogram impact_histogram(const OccurrenceIndex& index, LocationRef source,
                                 std::uint32_t top_k, std::uint32_t bins);

// The n most used hashtags in a location with their local use counts; ties by
// earlier first local use, then lexicographic.
std::vector<std::pair<std::uint32_t, std::uint64_t>> top_hashtags(const OccurrenceIndex& index,
                                                                  LocationRef location,
                                                                  std::size_t n = 50);
std::vector<std::pair<std::string, std::uint64_t>> top_hashtags(const OccurrenceIndex& index,
                                                                std::string_view location,
                                                                std::size_t n = 50);

// Intersection of the two top-n hashtag sets divided by n (fixed denominator).
SimilarityScore similarity(const OccurrenceIndex& index, LocationRef a, LocationRef b,
                           std::size_t n = 50);
SimilarityScore similarity(const OccurrenceIndex& index, std::string_view a, std::string_view b,
                           std::size_t n = 50);

// All other locations sorted by distance to the source, chunked into
// consecutive groups; each group reduced to (mean distance, mean similarity).
std::vector<std::pair<double, double>> similarity_by_distance(const OccurrenceIndex& index,
                                                              LocationRef source,
                                                              std::size_t group_size = 100,
                                                              std::size_t top_n = 50);

LocationRef require_location(const OccurrenceIndex& index, std::string_view id);

}  // namespace hashspread
