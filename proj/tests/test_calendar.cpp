#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "rollcast/calendar.hpp"

using namespace rollcast;

namespace {

constexpr UnixSeconds kJan1 = 1704067200;  // 2024-01-01T00:00:00Z, a Monday

Eigen::RowVectorXd row_for(UnixSeconds t) {
    return extract_features({t}).rows.row(0);
}

}  // namespace

TEST_CASE("feature columns are named and ordered as documented") {
    const ExogMatrix exog = extract_features({});
    REQUIRE(exog.column_names ==
            std::vector<std::string>{"late_night", "early_morning", "morning", "afternoon",
                                     "late_afternoon", "evening", "night", "weekend"});
    REQUIRE(exog.size() == 0);
    REQUIRE(exog.empty());
}

TEST_CASE("day parts one-hot with the midnight bucket as reference") {
    SECTION("Tuesday 10:00 lands in morning on a weekday") {
        const auto row = row_for(kJan1 + 86400 + 10 * 3600);  // 2024-01-02T10:00:00Z
        REQUIRE(row[2] == 1.0);  // morning
        REQUIRE(row.sum() == 1.0);
    }
    SECTION("Saturday 01:30 hits the dropped reference bucket") {
        const auto row = row_for(kJan1 + 5 * 86400 + 5400);  // 2024-01-06T01:30:00Z
        for (int j = 0; j < 7; ++j) REQUIRE(row[j] == 0.0);
        REQUIRE(row[7] == 1.0);  // weekend
    }
    SECTION("exactly 03:00 belongs to late_night (left-closed buckets)") {
        const auto row = row_for(kJan1 + 3 * 3600);
        REQUIRE(row[0] == 1.0);
        REQUIRE(row.sum() == 1.0);
    }
    SECTION("boundary sweep: one row per bucket start") {
        for (int h = 0; h < 24; h += 3) {
            const auto row = row_for(kJan1 + h * 3600);
            double day_part_sum = 0.0;
            for (int j = 0; j < 7; ++j) day_part_sum += row[j];
            if (h == 0) {
                REQUIRE(day_part_sum == 0.0);
            } else {
                REQUIRE(day_part_sum == 1.0);
                REQUIRE(row[h / 3 - 1] == 1.0);
            }
        }
    }
}

TEST_CASE("identical timestamps give identical rows") {
    const UnixSeconds t = kJan1 + 11 * 3600 + 1234;
    const ExogMatrix exog = extract_features({t, t});
    REQUIRE(exog.rows.row(0) == exog.rows.row(1));
}

TEST_CASE("two sevenths of whole weeks are weekend") {
    std::vector<UnixSeconds> timestamps;
    for (int day = 0; day < 14; ++day) {
        for (int h = 0; h < 24; ++h) {
            timestamps.push_back(kJan1 + day * kSecondsPerDay + h * 3600);
        }
    }
    const ExogMatrix exog = extract_features(timestamps);
    double weekend_rows = exog.rows.col(7).sum();
    REQUIRE(weekend_rows == 4 * 24);  // 4 weekend days out of 14
}

TEST_CASE("exog csv has a header and 0/1 cells") {
    const std::vector<UnixSeconds> timestamps = {kJan1 + 10 * 3600};
    const ExogMatrix exog = extract_features(timestamps);
    std::ostringstream out;
    write_exog_csv(out, exog, timestamps);
    REQUIRE(out.str() ==
            "timestamp,late_night,early_morning,morning,afternoon,late_afternoon,evening,night,"
            "weekend\n"
            "2024-01-01T10:00:00Z,0,0,1,0,0,0,0,0\n");
}
