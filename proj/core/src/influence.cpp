#include "hashspread/influence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hashspread/geo.hpp"
#include "hashspread/parallel.hpp"

namespace hashspread {

namespace {

// (#{t_a < t_b} - #{t_a > t_b}) / (nA*nB) over two time-sorted runs; a single
// merge instead of enumerating all pairs. Ties add to neither count.
double pair_ordering_score(std::span<const Instant> a, std::span<const Instant> b) {
    std::uint64_t less = 0;  // pairs with t_a < t_b
    std::uint64_t ties = 0;  // pairs with t_a == t_b
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ib < b.size()) {
        Instant tb = b[ib];
        while (ia < a.size() && a[ia] < tb) ++ia;
        // a[0..ia) < tb; count a-values equal to tb once per distinct b time
        std::size_t ia_eq = ia;
        while (ia_eq < a.size() && a[ia_eq] == tb) ++ia_eq;
        std::size_t b_run = ib;
        while (b_run < b.size() && b[b_run] == tb) ++b_run;
        std::uint64_t b_count = b_run - ib;
        less += static_cast<std::uint64_t>(ia) * b_count;
        ties += static_cast<std::uint64_t>(ia_eq - ia) * b_count;
        ib = b_run;
    }
    std::uint64_t total = static_cast<std::uint64_t>(a.size()) * b.size();
    std::uint64_t greater = total - less - ties;
    return (static_cast<double>(less) - static_cast<double>(greater)) /
           static_cast<double>(total);
}

const LocalHashtagSpan* find_span(std::span<const LocalHashtagSpan> spans, std::uint32_t tag) {
    auto it = std::lower_bound(spans.begin(), spans.end(), tag,
                               [](const LocalHashtagSpan& s, std::uint32_t t) {
                                   return s.hashtag < t;
                               });
    if (it == spans.end() || it->hashtag != tag) return nullptr;
    return &*it;
}

}  // namespace

LocationRef require_location(const OccurrenceIndex& index, std::string_view id) {
    auto ref = index.locations().find(id);
    if (!ref) throw std::out_of_range("unknown location: " + std::string(id));
    return *ref;
}

std::optional<double> hashtag_impact(const OccurrenceIndex& index, std::size_t tag,
                                     LocationRef a, LocationRef b) {
    const auto* sa = find_span(index.location_hashtags(a), static_cast<std::uint32_t>(tag));
    const auto* sb = find_span(index.location_hashtags(b), static_cast<std::uint32_t>(tag));
    if (!sa && !sb) return std::nullopt;
    if (!sb) return 1.0;
    if (!sa) return -1.0;
    return pair_ordering_score(index.local_timestamps(*sa), index.local_timestamps(*sb));
}

std::optional<double> hashtag_impact(const OccurrenceIndex& index, std::string_view hashtag,
                                     std::string_view a, std::string_view b) {
    return hashtag_impact(index, index.require(hashtag), require_location(index, a),
                          require_location(index, b));
}

std::optional<ImpactScore> spatial_impact(const OccurrenceIndex& index, LocationRef a,
                                          LocationRef b) {
    if (a == b) throw std::invalid_argument("spatial impact of a location with itself");
    auto spans_a = index.location_hashtags(a);
    auto spans_b = index.location_hashtags(b);
    double sum = 0.0;
    std::uint64_t considered = 0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < spans_a.size() || ib < spans_b.size()) {
        bool take_a = ib >= spans_b.size() ||
                      (ia < spans_a.size() && spans_a[ia].hashtag <= spans_b[ib].hashtag);
        bool take_b = ia >= spans_a.size() ||
                      (ib < spans_b.size() && spans_b[ib].hashtag <= spans_a[ia].hashtag);
        if (take_a && take_b) {
            sum += pair_ordering_score(index.local_timestamps(spans_a[ia]),
                                       index.local_timestamps(spans_b[ib]));
            ++ia;
            ++ib;
        } else if (take_a) {
            sum += 1.0;
            ++ia;
        } else {
            sum += -1.0;
            ++ib;
        }
        ++considered;
    }
    if (considered == 0) return std::nullopt;
    ImpactScore score;
    score.source = a;
    score.target = b;
    score.score = sum / static_cast<double>(considered);
    score.hashtags_considered = considered;
    return score;
}

std::optional<ImpactScore> spatial_impact(const OccurrenceIndex& index, std::string_view a,
                                          std::string_view b) {
    return spatial_impact(index, require_location(index, a), require_location(index, b));
}

ImpactHistogram impact_histogram(const OccurrenceIndex& index, LocationRef source,
                                 std::uint32_t top_k, std::uint32_t bins) {
    if (bins == 0) throw std::invalid_argument("impact histogram needs at least one bin");
    auto ranked = index.locations().by_rank();
    if (top_k > ranked.size()) {
        throw std::invalid_argument("top_k exceeds the number of ranked locations");
    }
    std::vector<LocationRef> targets;
    for (std::uint32_t i = 0; i < top_k; ++i) {
        if (ranked[i] != source) targets.push_back(ranked[i]);
    }
    ImpactHistogram hist;
    hist.bins = bins;
    hist.counts.assign(bins, 0);
    std::vector<double> scores(targets.size(), std::nan(""));
    parallel_for(
        targets.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                auto s = spatial_impact(index, source, targets[i]);
                if (s) scores[i] = s->score;
            }
        },
        1);
    for (double s : scores) {
        if (std::isnan(s)) {
            ++hist.undefined_targets;
            continue;
        }
        auto bin = static_cast<std::uint32_t>((s + 1.0) / 2.0 * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;  // s == +1 lands in the last bin
        ++hist.counts[bin];
    }
    return hist;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> top_hashtags(const OccurrenceIndex& index,
                                                                  LocationRef location,
                                                                  std::size_t n) {
    auto spans = index.location_hashtags(location);
    std::vector<const LocalHashtagSpan*> order;
    order.reserve(spans.size());
    for (const auto& s : spans) order.push_back(&s);
    auto better = [&](const LocalHashtagSpan* x, const LocalHashtagSpan* y) {
        if (x->count != y->count) return x->count > y->count;
        Instant fx = index.local_timestamps(*x).front();
        Instant fy = index.local_timestamps(*y).front();
        if (fx != fy) return fx < fy;
        return index.hashtag(x->hashtag).canonical < index.hashtag(y->hashtag).canonical;
    };
    if (order.size() > n) {
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                          order.end(), better);
        order.resize(n);
    } else {
        std::sort(order.begin(), order.end(), better);
    }
    std::vector<std::pair<std::uint32_t, std::uint64_t>> out;
    out.reserve(order.size());
    for (const auto* s : order) out.emplace_back(s->hashtag, s->count);
    return out;
}

std::vector<std::pair<std::string, std::uint64_t>> top_hashtags(const OccurrenceIndex& index,
                                                                std::string_view location,
                                                                std::size_t n) {
    auto refs = top_hashtags(index, require_location(index, location), n);
    std::vector<std::pair<std::string, std::uint64_t>> out;
    out.reserve(refs.size());
    for (const auto& [tag, count] : refs) {
        out.emplace_back(index.hashtag(tag).canonical, count);
    }
    return out;
}

SimilarityScore similarity(const OccurrenceIndex& index, LocationRef a, LocationRef b,
                           std::size_t n) {
    if (n == 0) throw std::invalid_argument("similarity needs n >= 1");
    auto top_a = top_hashtags(index, a, n);
    auto top_b = top_hashtags(index, b, n);
    std::vector<std::uint32_t> set_a;
    std::vector<std::uint32_t> set_b;
    for (const auto& [tag, count] : top_a) set_a.push_back(tag);
    for (const auto& [tag, count] : top_b) set_b.push_back(tag);
    std::sort(set_a.begin(), set_a.end());
    std::sort(set_b.begin(), set_b.end());
    std::vector<std::uint32_t> common;
    std::set_intersection(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(),
                          std::back_inserter(common));
    SimilarityScore s;
    s.a = a;
    s.b = b;
    s.score = static_cast<double>(common.size()) / static_cast<double>(n);
    const auto& la = index.locations().at(a);
    const auto& lb = index.locations().at(b);
    s.distance_km = haversine_km(la.point(), lb.point());
    return s;
}

SimilarityScore similarity(const OccurrenceIndex& index, std::string_view a, std::string_view b,
                           std::size_t n) {
    return similarity(index, require_location(index, a), require_location(index, b), n);
}

std::vector<std::pair<double, double>> similarity_by_distance(const OccurrenceIndex& index,
                                                              LocationRef source,
                                                              std::size_t group_size,
                                                              std::size_t top_n) {
    if (group_size == 0) throw std::invalid_argument("group size must be >= 1");
    const auto& locations = index.locations();
    const auto& src = locations.at(source);
    struct Other {
        LocationRef ref;
        double distance;
    };
    std::vector<Other> others;
    others.reserve(locations.size());
    for (LocationRef l = 0; l < locations.size(); ++l) {
        if (l == source) continue;
        others.push_back({l, haversine_km(src.point(), locations.at(l).point())});
    }
    std::sort(others.begin(), others.end(), [&](const Other& x, const Other& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        return locations.at(x.ref).id < locations.at(y.ref).id;
    });

    std::vector<double> sims(others.size());
    parallel_for(
        others.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                sims[i] = similarity(index, source, others[i].ref, top_n).score;
            }
        },
        8);

    std::vector<std::pair<double, double>> out;
    for (std::size_t start = 0; start < others.size(); start += group_size) {
        std::size_t end = std::min(others.size(), start + group_size);
        double dist_sum = 0.0;
        double sim_sum = 0.0;
        for (std::size_t i = start; i < end; ++i) {
            dist_sum += others[i].distance;
            sim_sum += sims[i];
        }
        double count = static_cast<double>(end - start);
        out.emplace_back(dist_sum / count, sim_sum / count);
    }
    return out;
}

}  // namespace hashspread
