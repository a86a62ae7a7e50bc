#include "hashspread/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "hashspread/csv.hpp"
#include "hashspread/geo.hpp"
#include "hashspread/rng.hpp"

namespace hashspread::synth {

namespace {

// Class-conditional knobs. Text features are deliberately identical across
// classes so separability comes from the spatio-temporal regimes; local
// phenomena draw from a narrowed user pool (regulars posting repeatedly).
struct ClassProfile {
    double p_second_tag;
    double p_exclamation;
    double p_question;
    double comment_lambda;
    std::uint32_t user_pool_divisor;
};

constexpr ClassProfile kProfiles[classify::kClassCount] = {
    {0.05, 0.2, 0.1, 1.5, 1},  // local_event
    {0.05, 0.2, 0.1, 1.5, 8},  // local_phenomenon
    {0.05, 0.2, 0.1, 1.5, 1},  // event
    {0.05, 0.2, 0.1, 1.5, 1},  // other_meme
};

constexpr double kDiffusionKmPerDay = 15.0;

struct PendingPost {
    Instant ts;
    std::uint32_t city;
    std::uint64_t user;
    std::uint32_t comments;
    bool second_tag;
    bool exclamation;
    bool question;
};

std::string city_id(std::uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "c%04u", i + 1);
    return buf;
}

ClassMix default_mix(std::uint32_t hashtags) {
    ClassMix mix;
    mix.local_event = hashtags / 4;
    mix.local_phenomenon = hashtags / 4;
    mix.event = hashtags / 4;
    mix.other_meme = hashtags - 3 * (hashtags / 4);
    return mix;
}

void validate(const WorldSpec& spec, const ClassMix& mix) {
    if (spec.cities < 2) throw std::invalid_argument("world needs at least 2 cities");
    if (spec.window_end <= spec.window_start) {
        throw std::invalid_argument("simulation window must have positive length");
    }
    if (mix.total() != spec.hashtags) {
        throw std::invalid_argument("class mix does not sum to the hashtag count");
    }
    if ((mix.event > 0 || mix.other_meme > 0) && spec.cities < 20) {
        throw std::invalid_argument(
            "countrywide classes need at least 20 cities; reduce the mix or add cities");
    }
    std::int64_t window_days = day_of(spec.window_end - 1) - day_of(spec.window_start) + 1;
    if ((mix.local_phenomenon > 0 || mix.other_meme > 0) && window_days < 61) {
        throw std::invalid_argument("long-lived classes need a window of at least 61 days");
    }
    if (spec.target_uses <
        static_cast<std::uint64_t>(spec.hashtags) * spec.min_uses_per_hashtag) {
        throw std::invalid_argument("target uses below hashtags * min uses");
    }
}

// Draw k distinct city indices, probability proportional to weight: repeated
// draws against the cumulative weights, redrawing duplicates.
std::vector<std::uint32_t> weighted_sample(Rng& rng, const std::vector<double>& cumulative,
                                           std::uint32_t k,
                                           std::optional<std::uint32_t> always_include) {
    std::vector<std::uint32_t> chosen;
    chosen.reserve(k);
    std::vector<bool> taken(cumulative.size(), false);
    if (always_include) {
        chosen.push_back(*always_include);
        taken[*always_include] = true;
    }
    std::size_t guard = 0;
    const std::size_t guard_limit = 1000ull * k + 1000;
    while (chosen.size() < k && guard++ < guard_limit) {
        double r = rng.uniform() * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        auto pick = static_cast<std::uint32_t>(it - cumulative.begin());
        if (pick >= cumulative.size()) pick = static_cast<std::uint32_t>(cumulative.size() - 1);
        if (taken[pick]) continue;
        taken[pick] = true;
        chosen.push_back(pick);
    }
    return chosen;
}

std::size_t pick_weighted(Rng& rng, const std::vector<double>& cumulative) {
    double r = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    return i >= cumulative.size() ? cumulative.size() - 1 : i;
}

std::vector<double> cumulate(const std::vector<double>& weights) {
    std::vector<double> c(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        c[i] = acc;
    }
    return c;
}

std::uint64_t draw_user(Rng& rng, const World::City& city, std::uint32_t divisor) {
    std::uint32_t pool = std::max<std::uint32_t>(2, city.user_count / divisor);
    return city.user_base + rng.below(pool);
}

// Escapes nothing: generated text stays within [#a-z0-9 !?].
void append_record_json(std::string& buf, const PostRecord& rec) {
    buf += "{\"post_id\":\"";
    buf += rec.post_id;
    buf += "\",\"user_id\":\"";
    buf += rec.user_id;
    buf += "\",\"location_id\":\"";
    buf += rec.location_id;
    buf += "\",\"timestamp\":\"";
    buf += format_rfc3339(rec.timestamp);
    buf += "\",\"text\":\"";
    buf += rec.text;
    buf += "\",\"comment_count\":";
    buf += std::to_string(rec.comment_count);
    buf += "}\n";
}

}  // namespace

World make_world(const WorldSpec& spec) {
    World world;
    world.cities.resize(spec.cities);
    Rng rng(mix_seed(spec.seed) ^ 0x5eedc111e5ULL);
    double weight_norm = 0.0;
    for (std::uint32_t i = 0; i < spec.cities; ++i) {
        weight_norm += 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf_exponent);
    }
    for (std::uint32_t i = 0; i < spec.cities; ++i) {
        auto& city = world.cities[i];
        city.id = city_id(i);
        city.name = "city " + std::to_string(i + 1);
        city.lat = rng.uniform(spec.lat_min, spec.lat_max);
        city.lon = rng.uniform(spec.lon_min, spec.lon_max);
        city.weight = 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf_exponent) / weight_norm;
    }
    std::uint64_t user_base = 0;
    for (auto& city : world.cities) {
        city.user_base = user_base;
        city.user_count = std::max<std::uint32_t>(
            2, static_cast<std::uint32_t>(city.weight * static_cast<double>(spec.users) + 0.5));
        user_base += city.user_count;
    }
    return world;
}

LocationTable World::location_table() const {
    LocationTable table;
    for (const auto& c : cities) {
        LocationInfo info;
        info.id = c.id;
        info.name = c.name;
        info.lat = c.lat;
        info.lon = c.lon;
        table.add(std::move(info));
    }
    return table;
}

void World::write_locations_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open locations file for writing: " + path);
    out << "location_id,name,lat,lon\n";
    char line[96];
    for (const auto& c : cities) {
        std::snprintf(line, sizeof(line), ",%.8f,%.8f\n", c.lat, c.lon);
        out << c.id << ',' << csv_escape(c.name) << line;
    }
}

Ledger generate(const WorldSpec& spec, const World& world, const RecordSink& sink,
                bool with_entries) {
    ClassMix mix = spec.class_mix.value_or(default_mix(spec.hashtags));
    validate(spec, mix);

    const DayNumber first_day = day_of(spec.window_start);
    const DayNumber last_day = day_of(spec.window_end - 1);
    const std::int64_t window_days = last_day - first_day + 1;
    const std::int64_t window_secs = spec.window_end - spec.window_start;

    // per-hashtag class assignment, then per-hashtag use budgets from a
    // capped Pareto tail rescaled onto the requested total
    std::vector<HashtagClass> classes;
    classes.reserve(spec.hashtags);
    for (std::uint32_t i = 0; i < mix.local_event; ++i) classes.push_back(HashtagClass::LocalEvent);
    for (std::uint32_t i = 0; i < mix.local_phenomenon; ++i) {
        classes.push_back(HashtagClass::LocalPhenomenon);
    }
    for (std::uint32_t i = 0; i < mix.event; ++i) classes.push_back(HashtagClass::Event);
    for (std::uint32_t i = 0; i < mix.other_meme; ++i) classes.push_back(HashtagClass::OtherMeme);

    std::vector<double> raw_extra(spec.hashtags, 0.0);
    {
        Rng rng(mix_seed(spec.seed) ^ 0xbadc0ffeeULL);
        double total_raw = 0.0;
        for (auto& r : raw_extra) {
            double u = rng.uniform();
            r = std::min(std::pow(1.0 - u, -1.0 / 1.2) - 1.0, 200.0);
            total_raw += r;
        }
        double extra_budget = static_cast<double>(spec.target_uses) -
                              static_cast<double>(spec.hashtags) * spec.min_uses_per_hashtag;
        double scale = total_raw > 0.0 ? extra_budget / total_raw : 0.0;
        for (auto& r : raw_extra) r = std::floor(r * scale + 0.5);
    }

    // nearest neighbours for the local-phenomenon city triples
    std::vector<std::array<std::uint32_t, 2>> nearest(world.cities.size());
    for (std::size_t a = 0; a < world.cities.size(); ++a) {
        std::uint32_t n1 = UINT32_MAX, n2 = UINT32_MAX;
        double d1 = 1e18, d2 = 1e18;
        for (std::size_t b = 0; b < world.cities.size(); ++b) {
            if (a == b) continue;
            double d = haversine_km(world.cities[a].lat, world.cities[a].lon,
                                    world.cities[b].lat, world.cities[b].lon);
            if (d < d1) {
                d2 = d1;
                n2 = n1;
                d1 = d;
                n1 = static_cast<std::uint32_t>(b);
            } else if (d < d2) {
                d2 = d;
                n2 = static_cast<std::uint32_t>(b);
            }
        }
        nearest[a] = {n1, n2};
    }

    std::vector<double> population_cum;
    {
        std::vector<double> w(world.cities.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = world.cities[i].weight;
        population_cum = cumulate(w);
    }

    Ledger ledger;
    ledger.seed = spec.seed;
    ledger.hashtags = spec.hashtags;
    std::vector<bool> user_seen(world.cities.empty() ? 0 : world.cities.back().user_base +
                                                             world.cities.back().user_count);
    std::vector<bool> city_seen(world.cities.size(), false);

    std::uint64_t post_seq = 0;
    std::vector<PendingPost> posts;
    char tag_buf[24];
    for (std::uint32_t tag_index = 0; tag_index < spec.hashtags; ++tag_index) {
        std::snprintf(tag_buf, sizeof(tag_buf), "h%05u", tag_index);
        HashtagClass cls = classes[tag_index];
        const ClassProfile& profile = kProfiles[static_cast<std::size_t>(cls)];
        Rng rng(mix_seed(spec.seed ^ mix_seed(0x7a6000ULL + tag_index)));
        std::uint64_t uses =
            spec.min_uses_per_hashtag + static_cast<std::uint64_t>(raw_extra[tag_index]);

        // class regime: participating cities with weights, and a time law
        std::vector<std::uint32_t> cities;
        std::vector<double> city_weights;
        std::uint32_t seed_city = 0;
        std::int64_t start_ts = 0;
        std::int64_t duration = 0;             // seconds
        std::vector<double> day_weights;       // burst classes only
        std::vector<std::int64_t> city_lag;    // other memes only

        switch (cls) {
            case HashtagClass::LocalEvent: {
                seed_city = static_cast<std::uint32_t>(pick_weighted(rng, population_cum));
                cities = {seed_city};
                city_weights = {1.0};
                std::int64_t burst_days =
                    std::min<std::int64_t>(1 + static_cast<std::int64_t>(rng.below(3)),
                                           window_days);
                std::int64_t start_day = static_cast<std::int64_t>(
                    rng.below(static_cast<std::uint64_t>(window_days - burst_days + 1)));
                start_ts = spec.window_start + start_day * kSecondsPerDay;
                duration = burst_days * kSecondsPerDay;
                static const double decay[3] = {0.55, 0.30, 0.15};
                day_weights.assign(decay, decay + burst_days);
                break;
            }
            case HashtagClass::Event: {
                std::uint32_t k = 20 + static_cast<std::uint32_t>(rng.below(
                                           std::min<std::uint32_t>(60, spec.cities) - 20 + 1));
                cities = weighted_sample(rng, population_cum, k, std::nullopt);
                seed_city = cities.front();
                // flattened within-hashtag allocation keeps the focus low even
                // when only 20 cities participate; selection stays Zipf-weighted
                for (auto c : cities) city_weights.push_back(std::sqrt(world.cities[c].weight));
                std::int64_t burst_days =
                    std::min<std::int64_t>(1 + static_cast<std::int64_t>(rng.below(5)),
                                           window_days);
                std::int64_t start_day = static_cast<std::int64_t>(
                    rng.below(static_cast<std::uint64_t>(window_days - burst_days + 1)));
                start_ts = spec.window_start + start_day * kSecondsPerDay;
                duration = burst_days * kSecondsPerDay;
                double w = 1.0;
                for (std::int64_t d = 0; d < burst_days; ++d) {
                    day_weights.push_back(w);
                    w *= 0.45;
                }
                break;
            }
            case HashtagClass::LocalPhenomenon: {
                seed_city = static_cast<std::uint32_t>(rng.below(world.cities.size()));
                cities = {seed_city};
                city_weights = {0.70};
                if (nearest[seed_city][0] != UINT32_MAX) {
                    cities.push_back(nearest[seed_city][0]);
                    city_weights.push_back(0.15);
                }
                if (nearest[seed_city][1] != UINT32_MAX) {
                    cities.push_back(nearest[seed_city][1]);
                    city_weights.push_back(0.15);
                }
                std::int64_t max_days = std::min<std::int64_t>(300, window_days);
                std::int64_t span_days =
                    60 + static_cast<std::int64_t>(rng.below(
                             static_cast<std::uint64_t>(max_days - 60 + 1)));
                duration = std::min(span_days * kSecondsPerDay, window_secs);
                start_ts = spec.window_start +
                           static_cast<std::int64_t>(rng.below(
                               static_cast<std::uint64_t>(window_secs - duration + 1)));
                break;
            }
            case HashtagClass::OtherMeme: {
                seed_city = 0;  // top-rank city seeds every countrywide meme
                std::uint32_t k = 20 + static_cast<std::uint32_t>(rng.below(
                                           std::min<std::uint32_t>(80, spec.cities) - 20 + 1));
                cities = weighted_sample(rng, population_cum, k, seed_city);
                for (auto c : cities) city_weights.push_back(std::sqrt(world.cities[c].weight));
                std::int64_t max_days = std::min<std::int64_t>(400, window_days);
                std::int64_t span_days =
                    60 + static_cast<std::int64_t>(rng.below(
                             static_cast<std::uint64_t>(max_days - 60 + 1)));
                duration = std::min(span_days * kSecondsPerDay, window_secs);
                start_ts = spec.window_start +
                           static_cast<std::int64_t>(rng.below(
                               static_cast<std::uint64_t>(window_secs - duration + 1)));
                city_lag.resize(cities.size(), 0);
                for (std::size_t i = 0; i < cities.size(); ++i) {
                    if (cities[i] == seed_city) continue;
                    double km = haversine_km(world.cities[seed_city].lat,
                                             world.cities[seed_city].lon,
                                             world.cities[cities[i]].lat,
                                             world.cities[cities[i]].lon);
                    double lag_days = rng.exponential(km / kDiffusionKmPerDay);
                    auto lag = static_cast<std::int64_t>(lag_days * kSecondsPerDay);
                    city_lag[i] = std::min<std::int64_t>(
                        lag, static_cast<std::int64_t>(0.8 * static_cast<double>(duration)));
                }
                break;
            }
        }

        auto city_cum = cumulate(city_weights);
        auto day_cum = day_weights.empty() ? std::vector<double>{} : cumulate(day_weights);

        posts.clear();
        std::uint64_t remaining = uses;
        while (remaining > 0) {
            PendingPost post{};
            std::size_t which = pick_weighted(rng, city_cum);
            post.city = cities[which];
            if (!day_cum.empty()) {
                auto day_offset = static_cast<std::int64_t>(pick_weighted(rng, day_cum));
                post.ts = start_ts + day_offset * kSecondsPerDay +
                          static_cast<std::int64_t>(rng.below(kSecondsPerDay));
            } else if (!city_lag.empty()) {
                std::int64_t lag = city_lag[which];
                post.ts = start_ts + lag +
                          static_cast<std::int64_t>(rng.below(
                              static_cast<std::uint64_t>(duration - lag)));
            } else {
                post.ts = start_ts +
                          static_cast<std::int64_t>(rng.below(
                              static_cast<std::uint64_t>(duration)));
            }
            if (post.ts >= spec.window_end) post.ts = spec.window_end - 1;
            if (post.ts < spec.window_start) post.ts = spec.window_start;
            post.user = draw_user(rng, world.cities[post.city], profile.user_pool_divisor);
            post.comments = static_cast<std::uint32_t>(rng.poisson(profile.comment_lambda));
            post.second_tag = remaining >= 2 && rng.uniform() < profile.p_second_tag;
            post.exclamation = rng.uniform() < profile.p_exclamation;
            post.question = rng.uniform() < profile.p_question;
            remaining -= post.second_tag ? 2 : 1;
            posts.push_back(post);
        }
        std::stable_sort(posts.begin(), posts.end(),
                         [](const PendingPost& a, const PendingPost& b) { return a.ts < b.ts; });

        LedgerEntry entry;
        entry.tag = tag_buf;
        entry.hashtag_class = cls;
        entry.seed_city = world.cities[seed_city].id;
        ++ledger.class_counts[static_cast<std::size_t>(cls)];

        PostRecord rec;
        for (const auto& post : posts) {
            char idbuf[24];
            std::snprintf(idbuf, sizeof(idbuf), "p%09llu",
                          static_cast<unsigned long long>(post_seq++));
            rec.post_id = idbuf;
            std::snprintf(idbuf, sizeof(idbuf), "u%07llu",
                          static_cast<unsigned long long>(post.user));
            rec.user_id = idbuf;
            rec.location_id = world.cities[post.city].id;
            rec.timestamp = post.ts;
            rec.comment_count = post.comments;
            rec.text = "#";
            rec.text += tag_buf;
            if (post.second_tag) {
                rec.text += " and #";
                rec.text += tag_buf;
            }
            if (post.exclamation) rec.text += "!";
            if (post.question) rec.text += "?";

            std::uint64_t occurrences = post.second_tag ? 2 : 1;
            entry.uses += occurrences;
            ++entry.posts;
            entry.cells[rec.location_id][day_of(post.ts)] += occurrences;
            user_seen[post.user] = true;
            city_seen[post.city] = true;

            sink(std::move(rec));
            rec = PostRecord{};
        }
        ledger.uses += entry.uses;
        ledger.posts += entry.posts;
        if (with_entries) ledger.entries.push_back(std::move(entry));
    }

    ledger.users = static_cast<std::uint64_t>(
        std::count(user_seen.begin(), user_seen.end(), true));
    ledger.locations = static_cast<std::uint64_t>(
        std::count(city_seen.begin(), city_seen.end(), true));
    return ledger;
}

GeneratedFiles generate_to_files(const WorldSpec& spec, const std::string& corpus_path,
                                 const std::string& ledger_path,
                                 const std::string& locations_path,
                                 const std::string& labels_path) {
    World world = make_world(spec);
    std::ofstream out(corpus_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open corpus file for writing: " + corpus_path);
    std::string buf;
    buf.reserve(1 << 20);
    std::uint64_t bytes = 0;
    auto sink = [&](PostRecord&& rec) {
        append_record_json(buf, rec);
        if (buf.size() > (1 << 20) - 512) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            bytes += buf.size();
            buf.clear();
        }
    };
    GeneratedFiles result;
    result.ledger = generate(spec, world, sink, !ledger_path.empty() || !labels_path.empty());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    bytes += buf.size();
    if (!out) throw std::runtime_error("write failure on corpus file: " + corpus_path);
    out.close();
    result.corpus_bytes = bytes;
    if (!ledger_path.empty()) result.ledger.save(ledger_path);
    if (!locations_path.empty()) world.write_locations_csv(locations_path);
    if (!labels_path.empty()) write_labels_csv(result.ledger, labels_path);
    return result;
}

void write_labels_csv(const Ledger& ledger, const std::string& path) {
    if (ledger.entries.empty() && ledger.hashtags > 0) {
        throw std::runtime_error("ledger has no per-hashtag entries; cannot emit labels");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open labels file for writing: " + path);
    out << "hashtag,class\n";
    for (const auto& e : ledger.entries) {
        out << e.tag << ',' << classify::class_name(e.hashtag_class) << '\n';
    }
}

void Ledger::save(const std::string& path) const {
    nlohmann::json obj;
    obj["seed"] = seed;
    obj["totals"] = {{"uses", uses},           {"posts", posts},
                     {"hashtags", hashtags},   {"users", users},
                     {"locations", locations}};
    nlohmann::json class_counts_json;
    for (std::size_t c = 0; c < classify::kClassCount; ++c) {
        class_counts_json[std::string(classify::class_name(HashtagClass(c)))] = class_counts[c];
    }
    obj["class_counts"] = class_counts_json;
    nlohmann::json entries_json = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json cells;
        for (const auto& [city, days] : e.cells) {
            nlohmann::json day_map;
            for (const auto& [day, count] : days) day_map[format_day(day)] = count;
            cells[city] = std::move(day_map);
        }
        entries_json.push_back({{"tag", e.tag},
                                {"class", std::string(classify::class_name(e.hashtag_class))},
                                {"seed_city", e.seed_city},
                                {"uses", e.uses},
                                {"posts", e.posts},
                                {"cells", std::move(cells)}});
    }
    obj["entries"] = std::move(entries_json);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open ledger file for writing: " + path);
    out << obj.dump() << '\n';
    if (!out) throw std::runtime_error("write failure on ledger file: " + path);
}

Ledger Ledger::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ledger file: " + path);
    nlohmann::json obj = nlohmann::json::parse(in);
    Ledger ledger;
    ledger.seed = obj.at("seed").get<std::uint64_t>();
    const auto& totals = obj.at("totals");
    ledger.uses = totals.at("uses").get<std::uint64_t>();
    ledger.posts = totals.at("posts").get<std::uint64_t>();
    ledger.hashtags = totals.at("hashtags").get<std::uint64_t>();
    ledger.users = totals.at("users").get<std::uint64_t>();
    ledger.locations = totals.at("locations").get<std::uint64_t>();
    for (std::size_t c = 0; c < classify::kClassCount; ++c) {
        ledger.class_counts[c] = obj.at("class_counts")
                                     .at(std::string(classify::class_name(HashtagClass(c))))
                                     .get<std::uint64_t>();
    }
    for (const auto& entry_json : obj.at("entries")) {
        LedgerEntry e;
        e.tag = entry_json.at("tag").get<std::string>();
        auto cls = classify::parse_class(entry_json.at("class").get<std::string>());
        if (!cls) throw std::runtime_error("ledger has an unknown class name");
        e.hashtag_class = *cls;
        e.seed_city = entry_json.at("seed_city").get<std::string>();
        e.uses = entry_json.at("uses").get<std::uint64_t>();
        e.posts = entry_json.at("posts").get<std::uint64_t>();
        for (const auto& [city, days] : entry_json.at("cells").items()) {
            auto& day_map = e.cells[city];
            for (const auto& [day_text, count] : days.items()) {
                auto day = parse_day(day_text);
                if (!day) throw std::runtime_error("ledger has a bad day key: " + day_text);
                day_map[*day] = count.get<std::uint64_t>();
            }
        }
        ledger.entries.push_back(std::move(e));
    }
    return ledger;
}

VerifyReport verify(const OccurrenceIndex& index, const Ledger& ledger) {
    VerifyReport report;
    auto note = [&report](std::string text) {
        if (report.notes.size() < 50) report.notes.push_back(std::move(text));
    };

    const auto& totals = index.totals();
    if (totals.uses != ledger.uses || totals.messages != ledger.posts ||
        totals.distinct_hashtags != ledger.hashtags || totals.users != ledger.users ||
        totals.locations != ledger.locations) {
        report.totals_match = false;
        note("global totals disagree with the ledger");
    }

    std::vector<bool> seen(index.hashtag_count(), false);
    for (const auto& entry : ledger.entries) {
        auto tag = index.find(entry.tag);
        if (!tag) {
            std::uint64_t missing = 0;
            for (const auto& [city, days] : entry.cells) {
                for (const auto& [day, count] : days) missing += count;
            }
            report.discrepancies += missing;
            note("hashtag " + entry.tag + " missing from the index");
            continue;
        }
        seen[*tag] = true;
        std::map<std::string, std::map<DayNumber, std::uint64_t>> actual;
        for (const auto& o : index.occurrences(*tag)) {
            ++actual[index.locations().at(o.location).id][index.occurrence_day(o)];
        }
        // L1 distance over the union of cells
        for (const auto& [city, days] : entry.cells) {
            auto a_city = actual.find(city);
            for (const auto& [day, count] : days) {
                std::uint64_t have = 0;
                if (a_city != actual.end()) {
                    auto a_day = a_city->second.find(day);
                    if (a_day != a_city->second.end()) have = a_day->second;
                }
                if (have != count) {
                    report.discrepancies += have > count ? have - count : count - have;
                    note("hashtag " + entry.tag + " at " + city + " on " + format_day(day) +
                         ": ledger " + std::to_string(count) + ", index " + std::to_string(have));
                }
            }
        }
        for (const auto& [city, days] : actual) {
            auto l_city = entry.cells.find(city);
            for (const auto& [day, count] : days) {
                bool in_ledger = false;
                if (l_city != entry.cells.end()) in_ledger = l_city->second.count(day) > 0;
                if (!in_ledger) {
                    report.discrepancies += count;
                    note("hashtag " + entry.tag + " at " + city + " on " + format_day(day) +
                         ": ledger 0, index " + std::to_string(count));
                }
            }
        }
    }
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        if (!seen[i]) {
            report.discrepancies += index.hashtag(i).count;
            note("hashtag " + index.hashtag(i).canonical + " not in the ledger");
        }
    }
    return report;
}

}  // namespace hashspread::synth
