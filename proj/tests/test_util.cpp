#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hashspread/csv.hpp"
#include "hashspread/geo.hpp"
#include "hashspread/parallel.hpp"
#include "hashspread/rng.hpp"
#include "hashspread/timeutil.hpp"

using namespace hashspread;

TEST_CASE("rfc3339 parsing") {
    CHECK(*parse_rfc3339("1970-01-01T00:00:00Z") == 0);
    CHECK(*parse_rfc3339("2016-01-01T00:00:00Z") == 1451606400);
    CHECK(*parse_rfc3339("2016-01-01t00:00:00z") == 1451606400);
    CHECK(*parse_rfc3339("2016-01-01 00:00:00Z") == 1451606400);
    CHECK(*parse_rfc3339("2016-01-01T01:00:00+01:00") == 1451606400);
    CHECK(*parse_rfc3339("2015-12-31T23:00:00-01:00") == 1451606400);
    CHECK(*parse_rfc3339("2016-01-01T00:00:00.5Z") == 1451606400);  // fraction truncated
    CHECK(*parse_rfc3339("2016-02-29T12:00:00Z") == *parse_rfc3339("2016-02-29T12:00:00Z"));

    CHECK_FALSE(parse_rfc3339("2015-02-29T00:00:00Z"));  // not a leap year
    CHECK_FALSE(parse_rfc3339("2016-13-01T00:00:00Z"));
    CHECK_FALSE(parse_rfc3339("2016-01-01T24:00:00Z"));
    CHECK_FALSE(parse_rfc3339("2016-01-01T00:00:00"));   // zone required
    CHECK_FALSE(parse_rfc3339("2016-01-01"));
    CHECK_FALSE(parse_rfc3339("garbage"));
    CHECK_FALSE(parse_rfc3339("2016-01-01T00:00:00Zjunk"));
    CHECK_FALSE(parse_rfc3339("2016-01-01T00:00:00.Z"));
}

TEST_CASE("rfc3339 round trip") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        Instant t = static_cast<Instant>(rng.below(4102444800ull));  // through 2099
        CHECK(*parse_rfc3339(format_rfc3339(t)) == t);
    }
}

TEST_CASE("day helpers") {
    CHECK(*parse_day("1970-01-01") == 0);
    CHECK(*parse_day("2016-01-01") == 16801);
    CHECK(format_day(16801) == "2016-01-01");
    CHECK(day_of(1451606400) == 16801);
    CHECK(day_of(1451606400 - 1) == 16800);
    CHECK(day_of(-1) == -1);
    // a +60 min zone offset moves 23:30 UTC into the next civil day
    CHECK(day_of(1451606400 - 1800, 60) == 16801);
    CHECK_FALSE(parse_day("2016-1-1"));
    CHECK_FALSE(parse_day("2016-02-30"));
}

TEST_CASE("haversine") {
    CHECK(haversine_km(50.0, 6.0, 50.0, 6.0) == 0.0);
    // Berlin <-> Munich, against an independently computed value
    double d = haversine_km(52.520008, 13.404954, 48.137154, 11.576124);
    CHECK(d == doctest::Approx(504.2).epsilon(0.01));
    // symmetric
    CHECK(haversine_km(47.0, 6.0, 55.0, 15.0) ==
          doctest::Approx(haversine_km(55.0, 15.0, 47.0, 6.0)).epsilon(1e-12));
    // antipodal-ish stays finite and positive
    CHECK(haversine_km(-89.9, 0.0, 89.9, 0.0) > 19000.0);
}

TEST_CASE("csv round trip with quoting") {
    std::ostringstream out;
    write_csv_row(out, {"plain", "with,comma", "with\"quote", "multi\nline", ""});
    std::istringstream in(out.str());
    CsvReader reader(in);
    std::vector<std::string> fields;
    REQUIRE(reader.next(fields));
    CHECK(fields == std::vector<std::string>{"plain", "with,comma", "with\"quote", "multi\nline",
                                             ""});
    CHECK_FALSE(reader.next(fields));
}

TEST_CASE("csv crlf and embedded rows") {
    std::istringstream in("a,b\r\n1,\"x\r\ny\"\r\n2,z");
    CsvReader reader(in);
    std::vector<std::string> fields;
    REQUIRE(reader.next(fields));
    CHECK(fields == std::vector<std::string>{"a", "b"});
    REQUIRE(reader.next(fields));
    CHECK(fields == std::vector<std::string>{"1", "x\r\ny"});
    REQUIRE(reader.next(fields));
    CHECK(fields == std::vector<std::string>{"2", "z"});
    CHECK_FALSE(reader.next(fields));
}

TEST_CASE("rng determinism and ranges") {
    Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_differs = false;
    for (int i = 0; i < 1000; ++i) {
        auto x = a.next_u64();
        all_equal &= x == b.next_u64();
        any_differs |= x != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_differs);

    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        CHECK(r.below(7) < 7);
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("rng exponential mean") {
    Rng r(99);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += r.exponential(3.0);
    CHECK(sum / n == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("parallel_for covers the range once") {
    std::vector<int> hits(10000, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
    }, 16);
    for (int h : hits) CHECK(h == 1);
}
