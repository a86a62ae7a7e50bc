#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hashspread/geo.hpp"
#include "hashspread/index.hpp"

namespace hashspread {

struct SpatialMetrics {
    std::string hashtag;
    std::string focus_location;
    double focus = 0.0;
    double entropy_bits = 0.0;
    double spread_km = 0.0;
    GeoPoint midpoint;
};

// P(location | hashtag). Rows sorted by location ref; probabilities sum to 1.
std::vector<std::pair<LocationRef, double>> location_probabilities(const OccurrenceIndex& index,
                                                                   std::size_t tag);
std::vector<std::pair<LocationRef, double>> location_probabilities(const OccurrenceIndex& index,
                                                                   std::string_view hashtag);

// Argmax location with its probability; ties go to the smaller location id.
std::pair<LocationRef, double> focus(const OccurrenceIndex& index, std::size_t tag);
std::pair<LocationRef, double> focus(const OccurrenceIndex& index, std::string_view hashtag);

// Shannon entropy in bits over the location distribution (0 log 0 := 0).
double entropy_bits(const OccurrenceIndex& index, std::size_t tag);
double entropy_bits(const OccurrenceIndex& index, std::string_view hashtag);

// Occurrence-weighted mean of latitude and longitude.
GeoPoint geographic_midpoint(std::span<const Occurrence> occurrences, const LocationTable& locations);

// Mean great-circle distance (km) from each occurrence to the midpoint.
double spread_km(const OccurrenceIndex& index, std::size_t tag);
double spread_km(const OccurrenceIndex& index, std::string_view hashtag);

SpatialMetrics spatial_metrics(const OccurrenceIndex& index, std::size_t tag);

enum class SpatialMetricKind { focus, entropy, spread };

// Sorted metric values per occurrence bucket; a value's CDF position is its
// rank divided by the bucket size.
struct MetricCdf {
    std::uint64_t bucket_low = 0;
    std::vector<double> values;
};
std::vector<MetricCdf> spatial_cdf(const OccurrenceIndex& index, SpatialMetricKind kind,
                                   const OccurrenceBuckets& buckets);

void write_cdf_csv(const std::string& path, const std::vector<MetricCdf>& cdfs);
void write_spatial_metrics_csv(const std::string& path, const OccurrenceIndex& index,
                               std::size_t min_occurrences = 2);

}  // namespace hashspread
