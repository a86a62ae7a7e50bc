#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hashspread/features.hpp"
#include "hashspread/spatial.hpp"
#include "hashspread/temporal.hpp"

#include "minicorpus.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace hashspread;
using testsupport::make_mini_corpus;
using testsupport::rel_close;

namespace {

LocationTable one_city() {
    LocationTable t;
    t.add({"X", "X", 50.0, 6.0, 0, 0});
    return t;
}

PostRecord rec(std::string id, std::string user, Instant ts, std::string text,
               std::uint32_t comments = 0) {
    PostRecord r;
    r.post_id = std::move(id);
    r.user_id = std::move(user);
    r.location_id = "X";
    r.timestamp = ts;
    r.text = std::move(text);
    r.comment_count = comments;
    return r;
}

}  // namespace

TEST_CASE("text features: single post") {
    auto index = OccurrenceIndex::build({rec("p1", "u1", 100, "just #a!")}, one_city());
    auto f = text_features(index, std::string_view("a"));
    CHECK(f.avg_hashtags_per_post == 1.0);
    CHECK(f.avg_comments_per_post == 0.0);
    CHECK(f.exclamation_fraction == 1.0);
    CHECK(f.question_fraction == 0.0);
}

TEST_CASE("text features: two posts") {
    auto index = OccurrenceIndex::build(
        {rec("p1", "u1", 100, "#a #b"), rec("p2", "u2", 200, "#a?")}, one_city());
    auto f = text_features(index, std::string_view("a"));
    CHECK(f.avg_hashtags_per_post == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(f.question_fraction == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.exclamation_fraction == 0.0);
}

TEST_CASE("text features: duplicate tags count once per post") {
    auto index = OccurrenceIndex::build({rec("p1", "u1", 100, "#a twice #a", 4)}, one_city());
    auto f = text_features(index, std::string_view("a"));
    // one distinct post with two hashtag tokens
    CHECK(f.avg_hashtags_per_post == 2.0);
    CHECK(f.avg_comments_per_post == 4.0);
}

TEST_CASE("text features match a direct scan on random corpora") {
    for (std::uint64_t seed = 400; seed < 420; ++seed) {
        auto corpus = make_mini_corpus(seed);
        auto index = testsupport::build_index(corpus);
        for (const auto& tag : corpus.tags) {
            if (!index.find(tag)) continue;
            // scan: distinct posts whose text contains the tag occurrence
            std::map<std::string, const PostRecord*> posts;
            for (const auto& o : corpus.truth) {
                if (o.hashtag != tag) continue;
                for (const auto& r : corpus.records) {
                    if (r.post_id == o.post) posts.emplace(r.post_id, &r);
                }
            }
            double hashtags = 0, comments = 0, excl = 0, quest = 0;
            for (const auto& [id, r] : posts) {
                std::size_t count = 0;
                for (std::size_t i = 0; i + 1 < r->text.size(); ++i) {
                    if (r->text[i] == '#') ++count;
                }
                hashtags += static_cast<double>(count);
                comments += r->comment_count;
                excl += r->text.find('!') != std::string::npos ? 1 : 0;
                quest += r->text.find('?') != std::string::npos ? 1 : 0;
            }
            double n = static_cast<double>(posts.size());
            auto f = text_features(index, std::string_view(tag));
            CHECK(rel_close(f.avg_hashtags_per_post, hashtags / n));
            CHECK(rel_close(f.avg_comments_per_post, comments / n));
            CHECK(rel_close(f.exclamation_fraction, excl / n));
            CHECK(rel_close(f.question_fraction, quest / n));
        }
    }
}

TEST_CASE("assemble enforces the occurrence threshold") {
    auto index = OccurrenceIndex::build({rec("p1", "u1", 100, "#rare")}, one_city());
    CHECK_THROWS_WITH_AS(assemble(index, std::string_view("rare"), 30),
                         doctest::Contains("30"), std::invalid_argument);
}

TEST_CASE("assemble composes the module operations exactly") {
    for (std::uint64_t seed = 430; seed < 445; ++seed) {
        auto corpus = make_mini_corpus(seed);
        auto index = testsupport::build_index(corpus);
        for (std::size_t i = 0; i < index.hashtag_count(); ++i) {
            if (index.hashtag(i).count < 5) continue;
            auto v = assemble(index, i, 5);
            CHECK(v.values[0] == focus(index, i).second);
            CHECK(v.values[1] == entropy_bits(index, i));
            CHECK(v.values[2] == spread_km(index, i));
            auto lv = local_variation(index, i);
            if (lv) {
                CHECK(v.values[3] == *lv);
            } else {
                CHECK(std::isnan(v.values[3]));
            }
            auto text = text_features(index, i);
            CHECK(v.values[4] == text.avg_hashtags_per_post);
            CHECK(v.values[5] == text.avg_comments_per_post);
            CHECK(v.values[6] == text.exclamation_fraction);
            CHECK(v.values[7] == text.question_fraction);
            CHECK(v.values[8] == temporal_focus(index, i).second);
            CHECK(v.values[9] == temporal_entropy_bits(index, i));
            CHECK(v.values[10] == temporal_spread_days(index, i));
            auto [inc, dec] = peak_shape(index, i);
            CHECK(v.values[11] == inc);
            CHECK(v.values[12] == dec);

            // documented ranges
            CHECK(v.values[0] > 0.0);
            CHECK(v.values[0] <= 1.0);
            CHECK(v.values[1] >= 0.0);
            CHECK(v.values[2] >= 0.0);
            CHECK(v.values[4] >= 1.0);  // the post contains the hashtag itself
            CHECK(v.values[6] >= 0.0);
            CHECK(v.values[6] <= 1.0);
            CHECK(v.values[7] >= 0.0);
            CHECK(v.values[7] <= 1.0);
            CHECK(v.values[13] > 0.0);
            CHECK(v.values[13] <= 1.0);
        }
    }
}

TEST_CASE("user diversity") {
    auto index = OccurrenceIndex::build(
        {rec("p1", "alice", 100, "#h"), rec("p2", "alice", 200, "#h"),
         rec("p3", "bob", 300, "#h"), rec("p4", "carol", 400, "#h")},
        one_city());
    auto v = assemble(index, std::string_view("h"), 2);
    CHECK(v.values[13] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("dropping the comments column only changes avg_comments") {
    auto with = OccurrenceIndex::build(
        {rec("p1", "u1", 100, "#h!", 3), rec("p2", "u2", 200, "#h", 5)}, one_city());
    auto without = OccurrenceIndex::build(
        {rec("p1", "u1", 100, "#h!", 0), rec("p2", "u2", 200, "#h", 0)}, one_city());
    auto a = assemble(with, std::string_view("h"), 2);
    auto b = assemble(without, std::string_view("h"), 2);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (i == 5) continue;
        if (std::isnan(a.values[i])) {
            CHECK(std::isnan(b.values[i]));
        } else {
            CHECK(a.values[i] == b.values[i]);
        }
    }
    CHECK(a.values[5] == 4.0);
    CHECK(b.values[5] == 0.0);
}

TEST_CASE("features csv round trip") {
    testsupport::TempDir dir("features");
    auto corpus = make_mini_corpus(460);
    auto index = testsupport::build_index(corpus);
    auto rows = assemble_all(index, 2);
    REQUIRE(!rows.empty());
    auto path = dir.file("features.csv");
    write_features_csv(path, rows);
    auto reread = read_features_csv(path);
    REQUIRE(reread.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(reread[i].hashtag == rows[i].hashtag);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            if (std::isnan(rows[i].values[j])) {
                CHECK(std::isnan(reread[i].values[j]));
            } else {
                CHECK(rel_close(reread[i].values[j], rows[i].values[j], 1e-9));
            }
        }
    }
}

TEST_CASE("spread grid") {
    // single-city single-day corpus: every point at (0, ~0)
    std::vector<PostRecord> records;
    for (int i = 0; i < 40; ++i) {
        records.push_back(rec("p" + std::to_string(i), "u" + std::to_string(i % 5),
                              1000 + i, "#only"));
    }
    auto index = OccurrenceIndex::build(records, one_city());
    auto grid = spread_grid(index, 30, 10);
    REQUIRE(grid.points.size() == 1);
    CHECK(grid.points[0].spatial_spread_km == 0.0);
    CHECK(grid.points[0].temporal_spread_days < 0.5);

    auto corpus = make_mini_corpus(470);
    auto idx2 = testsupport::build_index(corpus);
    auto grid2 = spread_grid(idx2, 2, 10);
    std::size_t qualifying = 0;
    for (std::size_t i = 0; i < idx2.hashtag_count(); ++i) {
        if (idx2.hashtag(i).count >= 2) ++qualifying;
    }
    CHECK(grid2.points.size() == qualifying);
    std::uint64_t binned = 0;
    for (auto c : grid2.counts) binned += c;
    CHECK(binned == qualifying);

    testsupport::TempDir dir("grid");
    write_spread_grid_csv(dir.file("grid.csv"), dir.file("grid_hist.csv"), grid2);
    std::ifstream in(dir.file("grid.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "hashtag,spatial_spread_km,temporal_spread_days");
}
