#include "hashspread/index.hpp"

#include <algorithm>
#include <stdexcept>

#include "hashspread/hashtag.hpp"

namespace hashspread {

OccurrenceIndex::Builder::Builder(LocationTable locations, BuildOptions options)
    : locations_(std::move(locations)), options_(std::move(options)) {
    location_post_counts_.assign(locations_.size(), 0);
}

void OccurrenceIndex::Builder::add(const PostRecord& record) {
    if (finished_) throw std::logic_error("Builder::add after finish");
    ++counters_.records_seen;

    std::string_view loc_id = record.location_id;
    if (!options_.location_aliases.empty()) {
        auto alias = options_.location_aliases.find(record.location_id);
        if (alias != options_.location_aliases.end()) loc_id = alias->second;
    }
    auto tokens = extract_hashtags(record.text);
    auto loc = locations_.find(loc_id);
    if (!loc) {
        ++counters_.unknown_location_records;
        counters_.unknown_location_occurrences += tokens.size();
        return;
    }
    ++location_post_counts_[*loc];
    if (tokens.empty()) {
        ++counters_.records_without_hashtags;
        return;
    }

    UserRef user;
    if (auto it = user_ids_.find(record.user_id); it != user_ids_.end()) {
        user = it->second;
    } else {
        user = static_cast<UserRef>(users_.size());
        users_.push_back(record.user_id);
        user_ids_.emplace(record.user_id, user);
    }

    PostRef post = static_cast<PostRef>(posts_.size());
    PostInfo info;
    info.id = record.post_id;
    info.comment_count = record.comment_count;
    info.hashtag_count = static_cast<std::uint16_t>(std::min<std::size_t>(tokens.size(), 65535));
    info.has_exclamation = record.text.find('!') != std::string::npos;
    info.has_question = record.text.find('?') != std::string::npos;
    posts_.push_back(std::move(info));

    for (auto& token : tokens) {
        const std::string& key = options_.fold_case ? token.canonical : token.raw;
        std::uint32_t tag;
        if (auto it = tag_ids_.find(key); it != tag_ids_.end()) {
            tag = it->second;
        } else {
            tag = static_cast<std::uint32_t>(tag_canonical_.size());
            tag_canonical_.push_back(key);
            tag_display_.push_back(token.raw);
            tag_ids_.emplace(key, tag);
        }
        raw_.push_back({record.timestamp, tag, *loc, user, post});
    }
}

OccurrenceIndex OccurrenceIndex::Builder::finish() {
    if (finished_) throw std::logic_error("Builder::finish called twice");
    finished_ = true;
    tag_ids_.clear();
    user_ids_.clear();

    const std::uint32_t tag_count = static_cast<std::uint32_t>(tag_canonical_.size());
    std::vector<std::uint32_t> order(tag_count);
    for (std::uint32_t i = 0; i < tag_count; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [this](std::uint32_t a, std::uint32_t b) {
        return tag_canonical_[a] < tag_canonical_[b];
    });
    std::vector<std::uint32_t> rank(tag_count);
    for (std::uint32_t i = 0; i < tag_count; ++i) rank[order[i]] = i;

    for (auto& r : raw_) r.tag = rank[r.tag];
    std::sort(raw_.begin(), raw_.end(), [this](const RawOccurrence& a, const RawOccurrence& b) {
        if (a.tag != b.tag) return a.tag < b.tag;
        if (a.ts != b.ts) return a.ts < b.ts;
        if (a.post != b.post) return posts_[a.post].id < posts_[b.post].id;
        return false;
    });

    std::vector<HashtagInfo> hashtags(tag_count);
    for (std::uint32_t i = 0; i < tag_count; ++i) {
        hashtags[i].canonical = std::move(tag_canonical_[order[i]]);
        hashtags[i].display = std::move(tag_display_[order[i]]);
    }
    for (const auto& r : raw_) ++hashtags[r.tag].count;
    std::uint64_t begin = 0;
    for (auto& h : hashtags) {
        h.begin = begin;
        begin += h.count;
    }

    auto storage = std::make_shared<Storage>();
    storage->folded = options_.fold_case;
    storage->tz_offset_minutes = options_.tz_offset_minutes;
    storage->users = std::move(users_);
    storage->posts = std::move(posts_);
    storage->pool.resize(raw_.size());
    for (std::size_t i = 0; i < raw_.size(); ++i) {
        const auto& r = raw_[i];
        storage->pool[i] = Occurrence{r.ts, r.location, r.user, r.post};
    }
    raw_.clear();
    raw_.shrink_to_fit();

    locations_.assign_counts(location_post_counts_);
    storage->locations = std::move(locations_);

    return OccurrenceIndex(std::move(storage), std::move(hashtags));
}

OccurrenceIndex OccurrenceIndex::build(const std::vector<PostRecord>& records,
                                       LocationTable locations, BuildOptions options,
                                       BuildCounters* counters) {
    Builder builder(std::move(locations), std::move(options));
    for (const auto& r : records) builder.add(r);
    if (counters) *counters = builder.counters();
    return builder.finish();
}

OccurrenceIndex::OccurrenceIndex(std::shared_ptr<const Storage> storage,
                                 std::vector<HashtagInfo> hashtags)
    : storage_(std::move(storage)),
      hashtags_(std::move(hashtags)),
      view_cell_(std::make_shared<ViewCell>()) {
    recompute_totals();
}

void OccurrenceIndex::recompute_totals() {
    totals_ = {};
    totals_.distinct_hashtags = hashtags_.size();
    std::vector<bool> post_seen(storage_->posts.size(), false);
    std::vector<bool> user_seen(storage_->users.size(), false);
    std::vector<bool> loc_seen(storage_->locations.size(), false);
    for (const auto& h : hashtags_) {
        totals_.uses += h.count;
        for (std::uint64_t i = h.begin; i < h.begin + h.count; ++i) {
            const auto& o = storage_->pool[i];
            post_seen[o.post] = true;
            user_seen[o.user] = true;
            loc_seen[o.location] = true;
        }
    }
    totals_.messages = static_cast<std::uint64_t>(std::count(post_seen.begin(), post_seen.end(), true));
    totals_.users = static_cast<std::uint64_t>(std::count(user_seen.begin(), user_seen.end(), true));
    totals_.locations = static_cast<std::uint64_t>(std::count(loc_seen.begin(), loc_seen.end(), true));
}

std::optional<std::size_t> OccurrenceIndex::find(std::string_view canonical) const {
    auto it = std::lower_bound(hashtags_.begin(), hashtags_.end(), canonical,
                               [](const HashtagInfo& h, std::string_view key) {
                                   return std::string_view(h.canonical) < key;
                               });
    if (it == hashtags_.end() || it->canonical != canonical) return std::nullopt;
    return static_cast<std::size_t>(it - hashtags_.begin());
}

std::size_t OccurrenceIndex::require(std::string_view canonical) const {
    auto i = find(canonical);
    if (!i) throw std::out_of_range("unknown hashtag: " + std::string(canonical));
    return *i;
}

std::span<const Occurrence> OccurrenceIndex::occurrences(std::size_t i) const {
    const auto& h = hashtags_.at(i);
    return {storage_->pool.data() + h.begin, h.count};
}

Instant OccurrenceIndex::first_use(std::size_t i) const {
    const auto& h = hashtags_.at(i);
    if (h.count == 0) throw std::logic_error("empty hashtag span");
    return storage_->pool[h.begin].ts;
}

DayNumber OccurrenceIndex::occurrence_day(const Occurrence& o) const {
    return day_of(o.ts, storage_->tz_offset_minutes);
}

const LocationTable& OccurrenceIndex::locations() const { return storage_->locations; }
const PostInfo& OccurrenceIndex::post(PostRef ref) const { return storage_->posts.at(ref); }
std::string_view OccurrenceIndex::user_id(UserRef ref) const { return storage_->users.at(ref); }
std::size_t OccurrenceIndex::post_table_size() const { return storage_->posts.size(); }
std::size_t OccurrenceIndex::user_table_size() const { return storage_->users.size(); }
bool OccurrenceIndex::folded() const { return storage_->folded; }
int OccurrenceIndex::tz_offset_minutes() const { return storage_->tz_offset_minutes; }

OccurrenceIndex OccurrenceIndex::filter_first_use(Instant cutoff) const {
    std::vector<HashtagInfo> kept;
    for (std::size_t i = 0; i < hashtags_.size(); ++i) {
        if (hashtags_[i].count > 0 && first_use(i) >= cutoff) kept.push_back(hashtags_[i]);
    }
    return OccurrenceIndex(storage_, std::move(kept));
}

const OccurrenceIndex::LocationView& OccurrenceIndex::location_view() const {
    std::call_once(view_cell_->once, [this] {
        LocationView& v = view_cell_->view;
        const std::uint32_t loc_count = storage_->locations.size();
        std::vector<std::uint64_t> counts(loc_count, 0);
        std::uint64_t total = 0;
        for (const auto& h : hashtags_) {
            for (std::uint64_t i = h.begin; i < h.begin + h.count; ++i) {
                ++counts[storage_->pool[i].location];
                ++total;
            }
        }
        std::vector<std::uint64_t> cursor(loc_count, 0);
        std::uint64_t acc = 0;
        for (std::uint32_t l = 0; l < loc_count; ++l) {
            cursor[l] = acc;
            acc += counts[l];
        }
        v.ts.resize(total);
        std::vector<std::vector<LocalHashtagSpan>> per_loc(loc_count);
        for (std::uint32_t h = 0; h < hashtags_.size(); ++h) {
            const auto& info = hashtags_[h];
            for (std::uint64_t i = info.begin; i < info.begin + info.count; ++i) {
                const auto& o = storage_->pool[i];
                std::uint64_t pos = cursor[o.location]++;
                v.ts[pos] = o.ts;
                auto& list = per_loc[o.location];
                if (list.empty() || list.back().hashtag != h) {
                    list.push_back({h, pos, 1});
                } else {
                    ++list.back().count;
                }
            }
        }
        v.span_begin.assign(loc_count + 1, 0);
        std::uint64_t span_total = 0;
        for (std::uint32_t l = 0; l < loc_count; ++l) {
            v.span_begin[l] = span_total;
            span_total += per_loc[l].size();
        }
        v.span_begin[loc_count] = span_total;
        v.spans.reserve(span_total);
        for (auto& list : per_loc) {
            v.spans.insert(v.spans.end(), list.begin(), list.end());
            list.clear();
        }
    });
    return view_cell_->view;
}

std::span<const LocalHashtagSpan> OccurrenceIndex::location_hashtags(LocationRef loc) const {
    const auto& v = location_view();
    if (loc >= storage_->locations.size()) throw std::out_of_range("bad location ref");
    return {v.spans.data() + v.span_begin[loc], v.span_begin[loc + 1] - v.span_begin[loc]};
}

std::span<const Instant> OccurrenceIndex::local_timestamps(const LocalHashtagSpan& span) const {
    const auto& v = location_view();
    return {v.ts.data() + span.begin, span.count};
}

std::vector<HistogramRow> occurrence_histogram(const OccurrenceIndex& index) {
    std::map<std::uint64_t, std::uint64_t> bins;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        ++bins[index.hashtag(i).count];
    }
    return {bins.begin(), bins.end()};
}

std::vector<HistogramRow> location_histogram(const OccurrenceIndex& index) {
    std::map<std::uint64_t, std::uint64_t> bins;
    // epoch-marking scratch avoids clearing a per-hashtag set
    std::vector<std::uint32_t> mark(index.locations().size(), 0);
    std::uint32_t epoch = 0;
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        ++epoch;
        std::uint64_t distinct = 0;
        for (const auto& o : index.occurrences(i)) {
            if (mark[o.location] != epoch) {
                mark[o.location] = epoch;
                ++distinct;
            }
        }
        ++bins[distinct];
    }
    return {bins.begin(), bins.end()};
}

OccurrenceBuckets partition_by_occurrences(const OccurrenceIndex& index,
                                           std::vector<std::uint64_t> edges) {
    if (edges.empty()) throw std::invalid_argument("bucket edges must be nonempty");
    if (edges.front() < 2) throw std::invalid_argument("first bucket edge must be >= 2");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) throw std::invalid_argument("bucket edges must be ascending");
    }
    OccurrenceBuckets out;
    out.members.resize(edges.size());
    for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
        std::uint64_t n = index.hashtag(i).count;
        if (n < edges.front()) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), n);
        std::size_t bucket = static_cast<std::size_t>(it - edges.begin()) - 1;
        out.members[bucket].push_back(static_cast<std::uint32_t>(i));
    }
    out.edges = std::move(edges);
    return out;
}

}  // namespace hashspread
