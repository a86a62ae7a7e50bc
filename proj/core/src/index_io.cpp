#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "hashspread/index.hpp"

namespace hashspread {

namespace {

constexpr char kMagic[4] = {'H', 'S', 'I', 'X'};
constexpr std::uint8_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) { buf_.reserve(1 << 20); }

    ~Writer() { flush(); }

    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) { bytes(&v, 2); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void i32(std::int32_t v) { bytes(&v, 4); }
    void i64(std::int64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }

    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    void bytes(const void* data, std::size_t n) {
        const char* p = static_cast<const char*>(data);
        if (buf_.size() + n > (1 << 20)) flush();
        if (n > (1 << 20)) {
            out_.write(p, static_cast<std::streamsize>(n));
        } else {
            buf_.insert(buf_.end(), p, p + n);
        }
    }

    void flush() {
        if (!buf_.empty()) {
            out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
            buf_.clear();
        }
    }

private:
    std::ostream& out_;
    std::vector<char> buf_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint8_t u8() { return get<std::uint8_t>(); }
    std::uint16_t u16() { return get<std::uint16_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    std::int32_t i32() { return get<std::int32_t>(); }
    std::int64_t i64() { return get<std::int64_t>(); }
    double f64() { return get<double>(); }

    std::string str() {
        std::uint32_t n = u32();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw std::runtime_error("index file truncated");
        }
    }

private:
    template <typename T>
    T get() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }

    std::istream& in_;
};

}  // namespace

void OccurrenceIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open index file for writing: " + path);
    Writer w(out);
    w.bytes(kMagic, 4);
    w.u8(kVersion);
    w.u8(storage_->folded ? 1 : 0);
    w.i32(storage_->tz_offset_minutes);
    w.u64(totals_.uses);
    w.u64(totals_.distinct_hashtags);
    w.u64(totals_.messages);
    w.u64(totals_.users);
    w.u64(totals_.locations);

    const auto& locs = storage_->locations.rows();
    w.u32(static_cast<std::uint32_t>(locs.size()));
    for (const auto& l : locs) {
        w.str(l.id);
        w.str(l.name);
        w.f64(l.lat);
        w.f64(l.lon);
        w.u64(l.post_count);
        w.u32(l.rank);
    }

    w.u32(static_cast<std::uint32_t>(storage_->users.size()));
    for (const auto& u : storage_->users) w.str(u);

    w.u32(static_cast<std::uint32_t>(storage_->posts.size()));
    for (const auto& p : storage_->posts) {
        w.str(p.id);
        w.u32(p.comment_count);
        w.u16(p.hashtag_count);
        w.u8(static_cast<std::uint8_t>((p.has_exclamation ? 1 : 0) | (p.has_question ? 2 : 0)));
    }

    w.u32(static_cast<std::uint32_t>(hashtags_.size()));
    for (const auto& h : hashtags_) {
        w.str(h.canonical);
        w.str(h.display);
        w.u64(h.count);
    }

    // occurrences are written compacted in span order
    w.u64(totals_.uses);
    for (const auto& h : hashtags_) {
        for (std::uint64_t i = h.begin; i < h.begin + h.count; ++i) {
            const auto& o = storage_->pool[i];
            w.i64(o.ts);
            w.u32(o.location);
            w.u32(o.user);
            w.u32(o.post);
        }
    }
    w.flush();
    if (!out) throw std::runtime_error("write failure on index file: " + path);
}

OccurrenceIndex OccurrenceIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index file: " + path);
    Reader r(in);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not an index file: " + path);
    if (r.u8() != kVersion) throw std::runtime_error("unsupported index version in " + path);

    auto storage = std::make_shared<Storage>();
    storage->folded = r.u8() != 0;
    storage->tz_offset_minutes = r.i32();
    IndexTotals stored;
    stored.uses = r.u64();
    stored.distinct_hashtags = r.u64();
    stored.messages = r.u64();
    stored.users = r.u64();
    stored.locations = r.u64();

    std::uint32_t loc_count = r.u32();
    for (std::uint32_t i = 0; i < loc_count; ++i) {
        LocationInfo info;
        info.id = r.str();
        info.name = r.str();
        info.lat = r.f64();
        info.lon = r.f64();
        info.post_count = r.u64();
        info.rank = r.u32();
        storage->locations.add(std::move(info));
    }

    std::uint32_t user_count = r.u32();
    storage->users.resize(user_count);
    for (auto& u : storage->users) u = r.str();

    std::uint32_t post_count = r.u32();
    storage->posts.resize(post_count);
    for (auto& p : storage->posts) {
        p.id = r.str();
        p.comment_count = r.u32();
        p.hashtag_count = r.u16();
        std::uint8_t flags = r.u8();
        p.has_exclamation = flags & 1;
        p.has_question = flags & 2;
    }

    std::uint32_t tag_count = r.u32();
    std::vector<HashtagInfo> hashtags(tag_count);
    std::uint64_t begin = 0;
    for (auto& h : hashtags) {
        h.canonical = r.str();
        h.display = r.str();
        h.count = r.u64();
        h.begin = begin;
        begin += h.count;
    }

    std::uint64_t pool_size = r.u64();
    if (pool_size != begin) throw std::runtime_error("index file spans disagree with pool size");
    storage->pool.resize(pool_size);
    for (auto& o : storage->pool) {
        o.ts = r.i64();
        o.location = r.u32();
        o.user = r.u32();
        o.post = r.u32();
    }

    OccurrenceIndex index(std::move(storage), std::move(hashtags));
    if (!(index.totals_ == stored)) {
        throw std::runtime_error("index file totals disagree with contents: " + path);
    }
    return index;
}

void OccurrenceIndex::write_totals_json(const std::string& path) const {
    nlohmann::json obj;
    obj["uses"] = totals_.uses;
    obj["distinct_hashtags"] = totals_.distinct_hashtags;
    obj["messages"] = totals_.messages;
    obj["users"] = totals_.users;
    obj["locations"] = totals_.locations;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open totals file for writing: " + path);
    out << obj.dump(2) << '\n';
}

}  // namespace hashspread
