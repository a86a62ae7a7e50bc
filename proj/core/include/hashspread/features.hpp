#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hashspread/index.hpp"

namespace hashspread {

inline constexpr std::size_t kFeatureCount = 14;

// CSV column order; indices are stable and shared with the classifiers.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "focus",
    "entropy",
    "spread_km",
    "local_variation",
    "avg_hashtags_per_post",
    "avg_comments_per_post",
    "exclamation_fraction",
    "question_fraction",
    "temporal_focus",
    "temporal_entropy",
    "temporal_spread_days",
    "peak_increase",
    "peak_decline",
    "user_diversity",
};

inline constexpr std::size_t kFeatureLocalVariation = 3;

struct FeatureVector {
    std::string hashtag;
    std::array<double, kFeatureCount> values{};  // local_variation is NaN when undefined

    double operator[](std::size_t i) const { return values[i]; }
};

struct TextFeatures {
    double avg_hashtags_per_post = 0.0;
    double avg_comments_per_post = 0.0;
    double exclamation_fraction = 0.0;
    double question_fraction = 0.0;
};

// Averages and fractions over the distinct posts that contain the hashtag.
TextFeatures text_features(const OccurrenceIndex& index, std::size_t tag);
TextFeatures text_features(const OccurrenceIndex& index, std::string_view hashtag);

// All fourteen features; throws when the hashtag has fewer than
// min_occurrences uses (the message names the threshold).
FeatureVector assemble(const OccurrenceIndex& index, std::size_t tag,
                       std::size_t min_occurrences = 30);
FeatureVector assemble(const OccurrenceIndex& index, std::string_view hashtag,
                       std::size_t min_occurrences = 30);

// Feature vectors for every qualifying hashtag, in canonical hashtag order.
std::vector<FeatureVector> assemble_all(const OccurrenceIndex& index,
                                        std::size_t min_occurrences = 30);

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_features_csv(const std::string& path);

// One (spatial spread, temporal spread) point per qualifying hashtag plus a
// 2-D histogram over [0, max] x [0, max].
struct SpreadGridPoint {
    std::string hashtag;
    double spatial_spread_km = 0.0;
    double temporal_spread_days = 0.0;
};
struct SpreadGrid {
    std::vector<SpreadGridPoint> points;
    std::uint32_t bins = 50;
    double spatial_max = 0.0;
    double temporal_max = 0.0;
    std::vector<std::uint64_t> counts;  // bins x bins, row-major by spatial bin
};
SpreadGrid spread_grid(const OccurrenceIndex& index, std::size_t min_occurrences = 30,
                       std::uint32_t bins = 50);

void write_spread_grid_csv(const std::string& points_path, const std::string& histogram_path,
                           const SpreadGrid& grid);

}  // namespace hashspread
