#include "hashspread/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hashspread/csv.hpp"
#include "hashspread/parallel.hpp"
#include "hashspread/spatial.hpp"
#include "hashspread/temporal.hpp"

namespace hashspread {

TextFeatures text_features(const OccurrenceIndex& index, std::size_t tag) {
    auto occ = index.occurrences(tag);
    if (occ.empty()) throw std::out_of_range("hashtag has no occurrences");
    std::vector<PostRef> posts;
    posts.reserve(occ.size());
    for (const auto& o : occ) posts.push_back(o.post);
    std::sort(posts.begin(), posts.end());
    posts.erase(std::unique(posts.begin(), posts.end()), posts.end());

    TextFeatures f;
    double n = static_cast<double>(posts.size());
    for (PostRef p : posts) {
        const auto& info = index.post(p);
        f.avg_hashtags_per_post += static_cast<double>(info.hashtag_count);
        f.avg_comments_per_post += static_cast<double>(info.comment_count);
        if (info.has_exclamation) f.exclamation_fraction += 1.0;
        if (info.has_question) f.question_fraction += 1.0;
    }
    f.avg_hashtags_per_post /= n;
    f.avg_comments_per_post /= n;
    f.exclamation_fraction /= n;
    f.question_fraction /= n;
    return f;
}

TextFeatures text_features(const OccurrenceIndex& index, std::string_view hashtag) {
    return text_features(index, index.require(hashtag));
}

FeatureVector assemble(const OccurrenceIndex& index, std::size_t tag,
                       std::size_t min_occurrences) {
    auto occ = index.occurrences(tag);
    if (occ.size() < min_occurrences) {
        throw std::invalid_argument("hashtag '" + index.hashtag(tag).canonical + "' has " +
                                    std::to_string(occ.size()) +
                                    " occurrences, below the minimum of " +
                                    std::to_string(min_occurrences));
    }
    FeatureVector v;
    v.hashtag = index.hashtag(tag).canonical;

    v.values[0] = focus(index, tag).second;
    v.values[1] = entropy_bits(index, tag);
    v.values[2] = spread_km(index, tag);

    auto lv = local_variation(index, tag);
    v.values[kFeatureLocalVariation] =
        lv ? *lv : std::numeric_limits<double>::quiet_NaN();

    TextFeatures text = text_features(index, tag);
    v.values[4] = text.avg_hashtags_per_post;
    v.values[5] = text.avg_comments_per_post;
    v.values[6] = text.exclamation_fraction;
    v.values[7] = text.question_fraction;

    v.values[8] = temporal_focus(index, tag).second;
    v.values[9] = temporal_entropy_bits(index, tag);
    v.values[10] = temporal_spread_days(index, tag);
    auto [inc, dec] = peak_shape(index, tag);
    v.values[11] = inc;
    v.values[12] = dec;

    std::vector<UserRef> users;
    users.reserve(occ.size());
    for (const auto& o : occ) users.push_back(o.user);
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    v.values[13] = static_cast<double>(users.size()) / static_cast<double>(occ.size());
    return v;
}

FeatureVector assemble(const OccurrenceIndex& index, std::string_view hashtag,
                       std::size_t min_occurrences) {
    return assemble(index, index.require(hashtag), min_occurrences);
}

std::vector<FeatureVector> assemble_all(const OccurrenceIndex& index,
                                        std::size_t min_occurrences) {
    std::vector<std::uint32_t> tags;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (index.hashtag(i).count >= min_occurrences) tags.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<FeatureVector> rows(tags.size());
    parallel_for(tags.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            rows[i] = assemble(index, tags[i], min_occurrences);
        }
    });
    return rows;
}

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "hashtag";
    for (auto name : kFeatureNames) out << ',' << name;
    out << '\n';
    char num[32];
    for (const auto& row : rows) {
        out << csv_escape(row.hashtag);
        for (double v : row.values) {
            if (std::isnan(v)) {
                out << ",nan";
            } else {
                std::snprintf(num, sizeof(num), ",%.12g", v);
                out << num;
            }
        }
        out << '\n';
    }
}

std::vector<FeatureVector> read_features_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open features file: " + path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error("features CSV is empty");
    if (fields.size() != kFeatureCount + 1 || fields[0] != "hashtag") {
        throw std::runtime_error("unexpected features CSV header");
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (fields[i + 1] != kFeatureNames[i]) {
            throw std::runtime_error("unexpected features CSV column: " + fields[i + 1]);
        }
    }
    std::vector<FeatureVector> rows;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != kFeatureCount + 1) {
            throw std::runtime_error("features CSV: wrong column count at line " +
                                     std::to_string(reader.line()));
        }
        FeatureVector v;
        v.hashtag = fields[0];
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const std::string& cell = fields[i + 1];
            if (cell == "nan" || cell.empty()) {
                v.values[i] = std::numeric_limits<double>::quiet_NaN();
            } else {
                try {
                    v.values[i] = std::stod(cell);
                } catch (const std::exception&) {
                    throw std::runtime_error("features CSV: bad number at line " +
                                             std::to_string(reader.line()));
                }
            }
        }
        rows.push_back(std::move(v));
    }
    return rows;
}

SpreadGrid spread_grid(const OccurrenceIndex& index, std::size_t min_occurrences,
                       std::uint32_t bins) {
    if (bins == 0) throw std::invalid_argument("spread grid needs at least one bin");
    std::vector<std::uint32_t> tags;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (index.hashtag(i).count >= min_occurrences) tags.push_back(static_cast<std::uint32_t>(i));
    }
    SpreadGrid grid;
    grid.bins = bins;
    grid.points.resize(tags.size());
    parallel_for(tags.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            grid.points[i].hashtag = index.hashtag(tags[i]).canonical;
            grid.points[i].spatial_spread_km = spread_km(index, tags[i]);
            grid.points[i].temporal_spread_days = temporal_spread_days(index, tags[i]);
        }
    });
    for (const auto& p : grid.points) {
        grid.spatial_max = std::max(grid.spatial_max, p.spatial_spread_km);
        grid.temporal_max = std::max(grid.temporal_max, p.temporal_spread_days);
    }
    grid.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
    auto bin_of = [bins](double v, double max) -> std::uint32_t {
        if (max <= 0.0) return 0;
        auto b = static_cast<std::uint32_t>(v / max * static_cast<double>(bins));
        return b >= bins ? bins - 1 : b;
    };
    for (const auto& p : grid.points) {
        std::uint32_t x = bin_of(p.spatial_spread_km, grid.spatial_max);
        std::uint32_t y = bin_of(p.temporal_spread_days, grid.temporal_max);
        ++grid.counts[static_cast<std::size_t>(x) * bins + y];
    }
    return grid;
}

void write_spread_grid_csv(const std::string& points_path, const std::string& histogram_path,
                           const SpreadGrid& grid) {
    {
        std::ofstream out(points_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + points_path);
        out << "hashtag,spatial_spread_km,temporal_spread_days\n";
        char line[80];
        for (const auto& p : grid.points) {
            std::snprintf(line, sizeof(line), ",%.9g,%.9g\n", p.spatial_spread_km,
                          p.temporal_spread_days);
            out << csv_escape(p.hashtag) << line;
        }
    }
    {
        std::ofstream out(histogram_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + histogram_path);
        out << "spatial_bin_low_km,spatial_bin_high_km,temporal_bin_low_days,"
               "temporal_bin_high_days,hashtags\n";
        double sx = grid.spatial_max / static_cast<double>(grid.bins);
        double sy = grid.temporal_max / static_cast<double>(grid.bins);
        char line[128];
        for (std::uint32_t x = 0; x < grid.bins; ++x) {
            for (std::uint32_t y = 0; y < grid.bins; ++y) {
                std::uint64_t c = grid.counts[static_cast<std::size_t>(x) * grid.bins + y];
                if (c == 0) continue;
                std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%llu\n", x * sx,
                              (x + 1) * sx, y * sy, (y + 1) * sy,
                              static_cast<unsigned long long>(c));
                out << line;
            }
        }
    }
}

}  // namespace hashspread
