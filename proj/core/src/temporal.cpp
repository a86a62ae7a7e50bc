#include "hashspread/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hashspread/parallel.hpp"

namespace hashspread {

namespace {

std::span<const Occurrence> require_occurrences(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    return occ;
}

}  // namespace

std::vector<std::pair<DayNumber, std::uint64_t>> daily_counts(const OccurrenceIndex& index,
                                                              std::size_t tag) {
    auto occ = require_occurrences(index, tag);
    std::vector<std::pair<DayNumber, std::uint64_t>> out;
    // occurrence lists are time-sorted, so days arrive in order
    for (const auto& o : occ) {
        DayNumber day = index.occurrence_day(o);
        if (!out.empty() && out.back().first == day) {
            ++out.back().second;
        } else {
            out.emplace_back(day, 1);
        }
    }
    return out;
}

std::vector<std::pair<DayNumber, std::uint64_t>> daily_counts(const OccurrenceIndex& index,
                                                              std::string_view hashtag) {
    return daily_counts(index, index.require(hashtag));
}

std::pair<DayNumber, double> temporal_focus(const OccurrenceIndex& index, std::size_t tag) {
    auto days = daily_counts(index, tag);
    DayNumber best_day = days.front().first;
    std::uint64_t best = days.front().second;
    std::uint64_t total = 0;
    for (const auto& [day, count] : days) {
        total += count;
        if (count > best) {  // strict: ties keep the earliest day
            best = count;
            best_day = day;
        }
    }
    return {best_day, static_cast<double>(best) / static_cast<double>(total)};
}

std::pair<DayNumber, double> temporal_focus(const OccurrenceIndex& index,
                                            std::string_view hashtag) {
    return temporal_focus(index, index.require(hashtag));
}

double temporal_entropy_bits(const OccurrenceIndex& index, std::size_t tag) {
    auto days = daily_counts(index, tag);
    double total = 0.0;
    for (const auto& [day, count] : days) total += static_cast<double>(count);
    double sum = 0.0;
    double carry = 0.0;
    for (const auto& [day, count] : days) {
        double p = static_cast<double>(count) / total;
        double term = -p * std::log2(p);
        double y = term - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum < 0.0 ? 0.0 : sum;
}

double temporal_entropy_bits(const OccurrenceIndex& index, std::string_view hashtag) {
    return temporal_entropy_bits(index, index.require(hashtag));
}

double temporal_spread_days(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = require_occurrences(index, tag);
    std::int64_t sum = 0;
    for (const auto& o : occ) sum += o.ts;
    double mean = static_cast<double>(sum) / static_cast<double>(occ.size());
    double acc = 0.0;
    for (const auto& o : occ) acc += std::abs(static_cast<double>(o.ts) - mean);
    return acc / static_cast<double>(occ.size()) / static_cast<double>(kSecondsPerDay);
}

double temporal_spread_days(const OccurrenceIndex& index, std::string_view hashtag) {
    return temporal_spread_days(index, index.require(hashtag));
}

std::optional<double> local_variation(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = require_occurrences(index, tag);
    std::size_t n = occ.size();
    if (n < 3) return std::nullopt;
    // n-1 intervals, n-2 consecutive interval pairs
    double sum = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        double a = static_cast<double>(occ[i + 1].ts - occ[i].ts);
        double b = static_cast<double>(occ[i + 2].ts - occ[i + 1].ts);
        double denom = a + b;
        if (denom == 0.0) continue;  // zero-length pair contributes nothing
        double r = (a - b) / denom;
        sum += r * r;
    }
    return 3.0 * sum / static_cast<double>(n - 2);
}

std::optional<double> local_variation(const OccurrenceIndex& index, std::string_view hashtag) {
    return local_variation(index, index.require(hashtag));
}

std::pair<double, double> peak_shape(const OccurrenceIndex& index, std::size_t tag) {
    auto days = daily_counts(index, tag);
    DayNumber peak_day = days.front().first;
    std::uint64_t peak = days.front().second;
    for (const auto& [day, count] : days) {
        if (count > peak) {
            peak = count;
            peak_day = day;
        }
    }
    std::uint64_t before = 0;
    std::uint64_t after = 0;
    for (const auto& [day, count] : days) {
        if (day >= peak_day - 7 && day < peak_day) before += count;
        if (day > peak_day && day <= peak_day + 7) after += count;
    }
    double h = static_cast<double>(peak);
    return {static_cast<double>(before) / h, static_cast<double>(after) / h};
}

std::pair<double, double> peak_shape(const OccurrenceIndex& index, std::string_view hashtag) {
    return peak_shape(index, index.require(hashtag));
}

TemporalMetrics temporal_metrics(const OccurrenceIndex& index, std::size_t tag) {
    TemporalMetrics m;
    m.hashtag = index.hashtag(tag).canonical;
    auto [day, prob] = temporal_focus(index, tag);
    m.peak_day = day;
    m.temporal_focus = prob;
    m.temporal_entropy_bits = temporal_entropy_bits(index, tag);
    m.temporal_spread_days = temporal_spread_days(index, tag);
    m.local_variation = local_variation(index, tag);
    auto [inc, dec] = peak_shape(index, tag);
    m.peak_increase = inc;
    m.peak_decline = dec;
    return m;
}

std::vector<MetricCdf> temporal_cdf(const OccurrenceIndex& index, TemporalMetricKind kind,
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
                    case TemporalMetricKind::focus:
                        v = temporal_focus(index, members[i]).second;
                        break;
                    case TemporalMetricKind::entropy:
                        v = temporal_entropy_bits(index, members[i]);
                        break;
                    case TemporalMetricKind::spread:
                        v = temporal_spread_days(index, members[i]);
                        break;
                }
                out[b].values[i] = v;
            }
        });
        std::sort(out[b].values.begin(), out[b].values.end());
    }
    return out;
}

void write_temporal_metrics_csv(const std::string& path, const OccurrenceIndex& index,
                                std::size_t min_occurrences) {
    std::vector<std::uint32_t> tags;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (index.hashtag(i).count >= min_occurrences) tags.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<TemporalMetrics> rows(tags.size());
    parallel_for(tags.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) rows[i] = temporal_metrics(index, tags[i]);
    });
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "hashtag,occurrences,peak_day,temporal_focus,temporal_entropy_bits,"
           "temporal_spread_days,local_variation,peak_increase,peak_decline\n";
    char line[192];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& m = rows[i];
        char lv[32];
        if (m.local_variation) {
            std::snprintf(lv, sizeof(lv), "%.9g", *m.local_variation);
        } else {
            std::snprintf(lv, sizeof(lv), "nan");
        }
        std::snprintf(line, sizeof(line), ",%llu,%s,%.9g,%.9g,%.9g,%s,%.9g,%.9g\n",
                      static_cast<unsigned long long>(index.hashtag(tags[i]).count),
                      format_day(m.peak_day).c_str(), m.temporal_focus, m.temporal_entropy_bits,
                      m.temporal_spread_days, lv, m.peak_increase, m.peak_decline);
        out << m.hashtag << line;
    }
}

}  // namespace hashspread
