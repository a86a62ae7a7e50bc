#pragma once

// Brute-force reference implementations, written directly from the metric
// definitions. Deliberately independent of the library: no hashspread headers,
// simple containers and double loops throughout.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Occ {
    std::string hashtag;
    std::string location;
    double lat = 0.0;
    double lon = 0.0;
    std::int64_t ts = 0;
    std::string user;
    std::string post;
};

using Corpus = std::vector<Occ>;

double haversine_km(double lat1, double lon1, double lat2, double lon2);

std::vector<Occ> occurrences_of(const Corpus& corpus, const std::string& tag);

// location metrics
std::map<std::string, std::uint64_t> location_counts(const Corpus& corpus,
                                                     const std::string& tag);
std::pair<std::string, double> focus(const Corpus& corpus, const std::string& tag);
double entropy_bits(const Corpus& corpus, const std::string& tag);
double spread_km(const Corpus& corpus, const std::string& tag);

// day metrics (UTC days, no zone offset)
std::int64_t day_of(std::int64_t ts);
std::map<std::int64_t, std::uint64_t> daily_counts(const Corpus& corpus, const std::string& tag);
std::pair<std::int64_t, double> temporal_focus(const Corpus& corpus, const std::string& tag);
double temporal_entropy_bits(const Corpus& corpus, const std::string& tag);
double temporal_spread_days(const Corpus& corpus, const std::string& tag);
std::optional<double> local_variation(const Corpus& corpus, const std::string& tag);
std::pair<double, double> peak_shape(const Corpus& corpus, const std::string& tag);

// impact and similarity
std::optional<double> hashtag_impact(const Corpus& corpus, const std::string& tag,
                                     const std::string& a, const std::string& b);
std::optional<double> spatial_impact(const Corpus& corpus, const std::string& a,
                                     const std::string& b);
std::vector<std::string> top_hashtags(const Corpus& corpus, const std::string& location,
                                      std::size_t n);
double similarity(const Corpus& corpus, const std::string& a, const std::string& b,
                  std::size_t n = 50);

std::set<std::string> hashtags(const Corpus& corpus);
std::set<std::string> locations(const Corpus& corpus);

double percentile(std::vector<double> values, double fraction);

}  // namespace oracle
