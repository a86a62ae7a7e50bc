#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hashspread/index.hpp"
#include "hashspread/spatial.hpp"  // MetricCdf, write_cdf_csv

namespace hashspread {

struct TemporalMetrics {
    std::string hashtag;
    DayNumber peak_day = 0;
    double temporal_focus = 0.0;
    double temporal_entropy_bits = 0.0;
    double temporal_spread_days = 0.0;
    std::optional<double> local_variation;  // undefined below 3 occurrences
    double peak_increase = 0.0;
    double peak_decline = 0.0;
};

// Uses per calendar day, sorted by day. Counts sum to total uses.
std::vector<std::pair<DayNumber, std::uint64_t>> daily_counts(const OccurrenceIndex& index,
                                                              std::size_t tag);
std::vector<std::pair<DayNumber, std::uint64_t>> daily_counts(const OccurrenceIndex& index,
                                                              std::string_view hashtag);

// Most active day and the fraction of uses it holds; ties go to the earliest day.
std::pair<DayNumber, double> temporal_focus(const OccurrenceIndex& index, std::size_t tag);
std::pair<DayNumber, double> temporal_focus(const OccurrenceIndex& index, std::string_view hashtag);

double temporal_entropy_bits(const OccurrenceIndex& index, std::size_t tag);
double temporal_entropy_bits(const OccurrenceIndex& index, std::string_view hashtag);

// Mean absolute deviation from the mean timestamp, in days (continuous time).
double temporal_spread_days(const OccurrenceIndex& index, std::size_t tag);
double temporal_spread_days(const OccurrenceIndex& index, std::string_view hashtag);

// Regularity of the inter-occurrence interval sequence: 0 for periodic use,
// about 1 for Poisson arrivals, larger for bursts. Needs >= 3 occurrences.
std::optional<double> local_variation(const OccurrenceIndex& index, std::size_t tag);
std::optional<double> local_variation(const OccurrenceIndex& index, std::string_view hashtag);

// (7 days strictly before peak, 7 days strictly after peak), each divided by
// the peak-day count.
std::pair<double, double> peak_shape(const OccurrenceIndex& index, std::size_t tag);
std::pair<double, double> peak_shape(const OccurrenceIndex& index, std::string_view hashtag);

TemporalMetrics temporal_metrics(const OccurrenceIndex& index, std::size_t tag);

enum class TemporalMetricKind { focus, entropy, spread };
std::vector<MetricCdf> temporal_cdf(const OccurrenceIndex& index, TemporalMetricKind kind,
                                    const OccurrenceBuckets& buckets);

void write_temporal_metrics_csv(const std::string& path, const OccurrenceIndex& index,
                                std::size_t min_occurrences = 2);

}  // namespace hashspread
