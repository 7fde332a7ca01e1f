#include <catch2/catch_amalgamated.hpp>

#include "rollcast/datetime.hpp"

using namespace rollcast;

TEST_CASE("iso-8601 parsing accepts the documented shapes") {
    REQUIRE(parse_iso8601("2024-01-01T00:00:00Z") == UnixSeconds{1704067200});
    REQUIRE(parse_iso8601("2024-01-01T00:00:00") == UnixSeconds{1704067200});
    REQUIRE(parse_iso8601("2024-01-01 00:00:00") == UnixSeconds{1704067200});
    REQUIRE(parse_iso8601("1970-01-01T00:00:00Z") == UnixSeconds{0});
    REQUIRE(parse_iso8601("1969-12-31T23:59:59Z") == UnixSeconds{-1});
    REQUIRE(parse_iso8601("2024-02-29T12:30:45Z") ==
            UnixSeconds{1709209845});  // leap day, checked against a day-count table
}

TEST_CASE("iso-8601 parsing rejects malformed input") {
    REQUIRE_FALSE(parse_iso8601("").has_value());
    REQUIRE_FALSE(parse_iso8601("not-a-date").has_value());
    REQUIRE_FALSE(parse_iso8601("2024-13-01T00:00:00Z").has_value());
    REQUIRE_FALSE(parse_iso8601("2024-02-30T00:00:00Z").has_value());
    REQUIRE_FALSE(parse_iso8601("2023-02-29T00:00:00Z").has_value());  // not a leap year
    REQUIRE_FALSE(parse_iso8601("2024-01-01T25:00:00Z").has_value());
    REQUIRE_FALSE(parse_iso8601("2024-01-01T00:61:00Z").has_value());
    REQUIRE_FALSE(parse_iso8601("2024-01-01X00:00:00Z").has_value());
    REQUIRE_FALSE(parse_iso8601("2024-01-01T00:00:00+01").has_value());
}

TEST_CASE("format and parse round-trip") {
    const UnixSeconds instants[] = {0, 1704067200, 1709209845, -1, 951782400};
    for (const UnixSeconds t : instants) {
        const std::string text = format_iso8601(t);
        REQUIRE(parse_iso8601(text) == t);
    }
    REQUIRE(format_iso8601(1704067200) == "2024-01-01T00:00:00Z");
}

TEST_CASE("day arithmetic works before and after the epoch") {
    REQUIRE(second_of_day(0) == 0);
    REQUIRE(second_of_day(-1) == 86399);
    REQUIRE(second_of_day(1704067200 + 3 * 3600 + 61) == 3 * 3600 + 61);
    REQUIRE(hour_of_day(1704067200 + 10 * 3600) == 10);
    REQUIRE(hour_of_day(-1) == 23);
}

TEST_CASE("day of week matches the civil calendar") {
    REQUIRE(day_of_week(0) == 4);                    // 1970-01-01 was a Thursday
    REQUIRE(day_of_week(1704067200) == 1);           // 2024-01-01 was a Monday
    REQUIRE(day_of_week(1704499200) == 6);           // 2024-01-06, Saturday
    REQUIRE(day_of_week(1704585600) == 0);           // 2024-01-07, Sunday
    REQUIRE_FALSE(is_weekend(1704067200));           // Monday
    REQUIRE(is_weekend(1704499200));                 // Saturday
    REQUIRE(is_weekend(1704585600 + 86399));         // last second of Sunday
    REQUIRE_FALSE(is_weekend(1704585600 + 86400));   // first second of Monday
}
