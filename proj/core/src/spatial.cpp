#include "hashspread/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hashspread/parallel.hpp"

namespace hashspread {

namespace {

// Occurrence counts per location for one hashtag. The scratch arrays stay
// warm across calls from the same thread; stale entries are cleared on entry.
struct LocationCounts {
    std::vector<LocationRef> touched;
    std::vector<std::uint64_t> count;

    void compute(const OccurrenceIndex& index, std::size_t tag) {
        std::size_t locs = index.locations().size();
        if (count.size() != locs) {
            count.assign(locs, 0);
        } else {
            for (LocationRef l : touched) count[l] = 0;
        }
        touched.clear();
        for (const auto& o : index.occurrences(tag)) {
            if (count[o.location] == 0) touched.push_back(o.location);
            ++count[o.location];
        }
        std::sort(touched.begin(), touched.end());
    }
};

thread_local LocationCounts tls_counts;

double kahan_entropy_bits(const LocationCounts& counts, double total) {
    double sum = 0.0;
    double carry = 0.0;
    for (LocationRef l : counts.touched) {
        double p = static_cast<double>(counts.count[l]) / total;
        if (p <= 0.0) continue;
        double term = -p * std::log2(p);
        double y = term - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum < 0.0 ? 0.0 : sum;
}

}  // namespace

std::vector<std::pair<LocationRef, double>> location_probabilities(const OccurrenceIndex& index,
                                                                   std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    auto& counts = tls_counts;
    counts.compute(index, tag);
    std::vector<std::pair<LocationRef, double>> out;
    out.reserve(counts.touched.size());
    double total = static_cast<double>(occ.size());
    for (LocationRef l : counts.touched) {
        out.emplace_back(l, static_cast<double>(counts.count[l]) / total);
    }
    return out;
}

std::vector<std::pair<LocationRef, double>> location_probabilities(const OccurrenceIndex& index,
                                                                   std::string_view hashtag) {
    return location_probabilities(index, index.require(hashtag));
}

std::pair<LocationRef, double> focus(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    auto& counts = tls_counts;
    counts.compute(index, tag);
    const auto& locations = index.locations();
    LocationRef best = counts.touched.front();
    std::uint64_t best_count = counts.count[best];
    for (LocationRef l : counts.touched) {
        std::uint64_t c = counts.count[l];
        if (c > best_count || (c == best_count && locations.at(l).id < locations.at(best).id)) {
            best = l;
            best_count = c;
        }
    }
    return {best, static_cast<double>(best_count) / static_cast<double>(occ.size())};
}

std::pair<LocationRef, double> focus(const OccurrenceIndex& index, std::string_view hashtag) {
    return focus(index, index.require(hashtag));
}

double entropy_bits(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    auto& counts = tls_counts;
    counts.compute(index, tag);
    return kahan_entropy_bits(counts, static_cast<double>(occ.size()));
}

double entropy_bits(const OccurrenceIndex& index, std::string_view hashtag) {
    return entropy_bits(index, index.require(hashtag));
}

GeoPoint geographic_midpoint(std::span<const Occurrence> occurrences,
                             const LocationTable& locations) {
    if (occurrences.empty()) throw std::invalid_argument("midpoint of zero occurrences");
    double lat = 0.0;
    double lon = 0.0;
    for (const auto& o : occurrences) {
        const auto& info = locations.at(o.location);
        lat += info.lat;
        lon += info.lon;
    }
    double n = static_cast<double>(occurrences.size());
    return {lat / n, lon / n};
}

double spread_km(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    const auto& locations = index.locations();
    auto& counts = tls_counts;
    counts.compute(index, tag);
    double n = static_cast<double>(occ.size());
    double lat = 0.0;
    double lon = 0.0;
    for (LocationRef l : counts.touched) {
        const auto& info = locations.at(l);
        double c = static_cast<double>(counts.count[l]);
        lat += c * info.lat;
        lon += c * info.lon;
    }
    GeoPoint mid{lat / n, lon / n};
    double sum = 0.0;
    for (LocationRef l : counts.touched) {
        const auto& info = locations.at(l);
        sum += static_cast<double>(counts.count[l]) * haversine_km(info.point(), mid);
    }
    return sum / n;
}

double spread_km(const OccurrenceIndex& index, std::string_view hashtag) {
    return spread_km(index, index.require(hashtag));
}

SpatialMetrics spatial_metrics(const OccurrenceIndex& index, std::size_t tag) {
    SpatialMetrics m;
    m.hashtag = index.hashtag(tag).canonical;
    auto [loc, prob] = focus(index, tag);
    m.focus_location = index.locations().at(loc).id;
    m.focus = prob;
    m.entropy_bits = entropy_bits(index, tag);
    m.spread_km = spread_km(index, tag);
    m.midpoint = geographic_midpoint(index.occurrences(tag), index.locations());
    return m;
}

std::vector<MetricCdf> spatial_cdf(const OccurrenceIndex& index, SpatialMetricKind kind,
                                   const OccurrenceBuckets& buckets) {
    std::vector<MetricCdf> out(buckets.edges.size());
    for (std::size_t b = 0; b < buckets.edges.size(); ++b) {
        out[b].bucket_low = buckets.edges[b];
        const auto& members = buckets.members[b];
        out[b].values.resize(members.size());
        parallel_for(members.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                double v = 0.0;
                switch (kind) {
                    case SpatialMetricKind::focus: v = focus(index, members[i]).second; break;
                    case SpatialMetricKind::entropy: v = entropy_bits(index, members[i]); break;
                    case SpatialMetricKind::spread: v = spread_km(index, members[i]); break;
                }
                out[b].values[i] = v;
            }
        });
        std::sort(out[b].values.begin(), out[b].values.end());
    }
    return out;
}

void write_cdf_csv(const std::string& path, const std::vector<MetricCdf>& cdfs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "bucket,value,cdf_fraction\n";
    char line[96];
    for (const auto& cdf : cdfs) {
        double n = static_cast<double>(cdf.values.size());
        for (std::size_t i = 0; i < cdf.values.size(); ++i) {
            std::snprintf(line, sizeof(line), "%llu,%.9g,%.9g\n",
                          static_cast<unsigned long long>(cdf.bucket_low), cdf.values[i],
                          (static_cast<double>(i) + 1.0) / n);
            out << line;
        }
    }
}

void write_spatial_metrics_csv(const std::string& path, const OccurrenceIndex& index,
                               std::size_t min_occurrences) {
    std::vector<std::uint32_t> tags;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (index.hashtag(i).count >= min_occurrences) tags.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<SpatialMetrics> rows(tags.size());
    parallel_for(tags.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) rows[i] = spatial_metrics(index, tags[i]);
    });
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "hashtag,occurrences,focus_location,focus,entropy_bits,spread_km,midpoint_lat,midpoint_lon\n";
    char line[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& m = rows[i];
        std::snprintf(line, sizeof(line), ",%llu,%s,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      static_cast<unsigned long long>(index.hashtag(tags[i]).count),
                      m.focus_location.c_str(), m.focus, m.entropy_bits, m.spread_km,
                      m.midpoint.lat, m.midpoint.lon);
        out << m.hashtag << line;
    }
}

}  // namespace hashspread
