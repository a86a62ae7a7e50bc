#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hashspread/hashtag.hpp"
#include "hashspread/ingest.hpp"
#include "hashspread/rng.hpp"

#include "testutil.hpp"

using namespace hashspread;

namespace {

std::vector<std::string> raw_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& tok : extract_hashtags(text)) out.push_back(tok.raw);
    return out;
}

}  // namespace

TEST_CASE("extraction basics") {
    CHECK(raw_tokens("late for #Frühstück again #abi-2016") ==
          std::vector<std::string>{"Frühstück", "abi-2016"});
    CHECK(raw_tokens("price is #1 #1") == std::vector<std::string>{"1", "1"});
    CHECK(raw_tokens("no tags here # ").empty());
    CHECK(raw_tokens("").empty());
}

TEST_CASE("extraction golden file, 50 cases, bit-exact") {
    std::ifstream in(std::string(HASHSPREAD_TEST_DATA_DIR) + "/extraction_golden.jsonl");
    REQUIRE(in.good());
    std::string line;
    std::size_t cases = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto obj = nlohmann::json::parse(line);
        auto text = obj.at("text").get<std::string>();
        auto expect = obj.at("expect").get<std::vector<std::string>>();
        CAPTURE(text);
        CHECK(raw_tokens(text) == expect);
        ++cases;
    }
    CHECK(cases == 50);
}

TEST_CASE("extraction self-reproduction property") {
    // every extracted token must re-extract from "#"+token alone
    Rng rng(2024);
    const std::string alphabet = "abzAZ09._-äöüÄÖÜß#!? 漢é";
    std::vector<std::string> chars;
    {
        std::string_view sv = alphabet;
        std::size_t i = 0;
        while (i < sv.size()) {
            unsigned char c = static_cast<unsigned char>(sv[i]);
            std::size_t len = c < 0x80 ? 1 : (c < 0xE0 ? 2 : (c < 0xF0 ? 3 : 4));
            chars.push_back(std::string(sv.substr(i, len)));
            i += len;
        }
    }
    for (int iter = 0; iter < 3000; ++iter) {
        std::string text;
        std::size_t pieces = rng.below(12);
        for (std::size_t i = 0; i < pieces; ++i) text += chars[rng.below(chars.size())];
        for (const auto& tok : extract_hashtags(text)) {
            auto again = extract_hashtags("#" + tok.raw);
            REQUIRE(again.size() == 1);
            CHECK(again[0].raw == tok.raw);
            CHECK(again[0].canonical == tok.canonical);
        }
    }
}

TEST_CASE("canonicalize") {
    CHECK(canonicalize("Abi2016") == "abi2016");
    CHECK(canonicalize("FRÜH") == "früh");
    CHECK(canonicalize("a.b-c_1") == "a.b-c_1");
    CHECK(canonicalize("ÄÖÜ") == "äöü");
    CHECK(canonicalize("straße") == "straße");
    CHECK(canonicalize("ß") == "ß");
}

TEST_CASE("jsonl parsing with skip counters") {
    std::istringstream in(
        "{\"post_id\":\"p1\",\"user_id\":\"u1\",\"location_id\":\"l1\","
        "\"timestamp\":\"2016-05-01T10:00:00Z\",\"text\":\"#a\"}\n"
        "this is not json\n"
        "{\"post_id\":\"p2\",\"user_id\":\"u2\",\"location_id\":\"l1\","
        "\"timestamp\":\"2016-05-02T10:00:00Z\",\"text\":\"#b\",\"comment_count\":3}\n"
        "{\"post_id\":\"p3\",\"user_id\":\"u3\",\"location_id\":\"l1\","
        "\"timestamp\":\"not a time\",\"text\":\"#c\"}\n"
        "{\"post_id\":\"p4\",\"user_id\":\"u4\",\"location_id\":\"l1\","
        "\"text\":\"#d\"}\n");
    std::vector<PostRecord> records;
    auto stats = parse_corpus(in, CorpusFormat::jsonl,
                              [&](PostRecord&& r) { records.push_back(std::move(r)); });
    CHECK(stats.parsed == 2);
    CHECK(records.size() == 2);
    CHECK(stats.skipped_for("malformed_json") == 1);
    CHECK(stats.skipped_for("bad_timestamp") == 1);
    CHECK(stats.skipped_for("missing_field") == 1);
    CHECK(records[1].comment_count == 3);
}

TEST_CASE("time window keeps inclusive bounds") {
    std::ostringstream corpus;
    for (int day = 1; day <= 5; ++day) {
        PostRecord rec;
        rec.post_id = "p" + std::to_string(day);
        rec.user_id = "u";
        rec.location_id = "l";
        rec.timestamp = *parse_rfc3339("2016-03-0" + std::to_string(day) + "T00:00:00Z");
        rec.text = "#x";
        write_jsonl_record(corpus, rec);
    }
    TimeWindow window{*parse_rfc3339("2016-03-02T00:00:00Z"),
                      *parse_rfc3339("2016-03-04T00:00:00Z")};
    std::istringstream in(corpus.str());
    std::vector<PostRecord> records;
    auto stats = parse_corpus(in, CorpusFormat::jsonl,
                              [&](PostRecord&& r) { records.push_back(std::move(r)); }, window);
    CHECK(stats.parsed == 3);
    CHECK(stats.skipped_for("outside_window") == 2);
    CHECK(records.front().post_id == "p2");
    CHECK(records.back().post_id == "p4");
}

TEST_CASE("csv corpus parsing") {
    std::istringstream in(
        "post_id,user_id,location_id,timestamp,text,comment_count\n"
        "p1,u1,l1,2016-05-01T10:00:00Z,\"hello #a, friend\",2\n"
        "p2,u2,l2,2016-05-01T11:00:00Z,#b,\n"
        "p3,u3,l3,bad-time,#c,0\n"
        "short,row\n");
    std::vector<PostRecord> records;
    auto stats = parse_corpus(in, CorpusFormat::csv,
                              [&](PostRecord&& r) { records.push_back(std::move(r)); });
    CHECK(stats.parsed == 2);
    CHECK(stats.skipped_for("bad_timestamp") == 1);
    CHECK(stats.skipped_for("bad_column_count") == 1);
    CHECK(records[0].text == "hello #a, friend");
    CHECK(records[0].comment_count == 2);
    CHECK(records[1].comment_count == 0);
}

TEST_CASE("jsonl write/parse round trip") {
    Rng rng(5);
    std::vector<PostRecord> original;
    std::ostringstream out;
    for (int i = 0; i < 500; ++i) {
        PostRecord rec;
        rec.post_id = "p" + std::to_string(i);
        rec.user_id = "user_" + std::to_string(rng.below(40));
        rec.location_id = "loc" + std::to_string(rng.below(8));
        rec.timestamp = 1451606400 + static_cast<Instant>(rng.below(86400ull * 500));
        rec.text = "text with \"quotes\" and #täg" + std::to_string(rng.below(10)) +
                   (rng.uniform() < 0.5 ? "!" : " \\ done");
        rec.comment_count = static_cast<std::uint32_t>(rng.below(6));
        write_jsonl_record(out, rec);
        original.push_back(std::move(rec));
    }
    std::istringstream in(out.str());
    std::vector<PostRecord> reparsed;
    auto stats = parse_corpus(in, CorpusFormat::jsonl,
                              [&](PostRecord&& r) { reparsed.push_back(std::move(r)); });
    CHECK(stats.total_skipped() == 0);
    CHECK(reparsed == original);
}

TEST_CASE("unreadable file is fatal") {
    CHECK_THROWS_AS(parse_corpus("/nonexistent/corpus.jsonl", CorpusFormat::jsonl,
                                 [](PostRecord&&) {}),
                    std::runtime_error);
}
