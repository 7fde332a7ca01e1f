#pragma once

#include <array>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/datetime.hpp"

namespace rollcast {

/// Exogenous regressor matrix: one row per time step, one named column per
/// feature. Indicator features hold only 0/1 entries.
struct ExogMatrix {
    std::vector<std::string> column_names;
    Eigen::MatrixXd rows;  // n_steps x n_features

    std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
    std::size_t n_features() const { return static_cast<std::size_t>(rows.cols()); }
    bool empty() const { return rows.rows() == 0; }
};

/// Day-part and weekend indicators for each timestamp.
///
/// A day is carved into eight contiguous 3-hour buckets, left-closed:
/// midnight [00,03), late_night [03,06), early_morning [06,09),
/// morning [09,12), afternoon [12,15), late_afternoon [15,18),
/// evening [18,21), night [21,24). The midnight bucket is the dropped
/// reference category (keeping all eight would make the indicators sum to a
/// constant and collide with the intercept), so seven day-part columns are
/// emitted, plus a weekend flag for Saturday/Sunday. All in GMT.
inline ExogMatrix extract_features(const std::vector<UnixSeconds>& timestamps) {
    static const std::array<const char*, 7> day_parts = {
        "late_night",     // [03:00, 06:00)
        "early_morning",  // [06:00, 09:00)
        "morning",        // [09:00, 12:00)
        "afternoon",      // [12:00, 15:00)
        "late_afternoon", // [15:00, 18:00)
        "evening",        // [18:00, 21:00)
        "night",          // [21:00, 24:00)
    };

    ExogMatrix out;
    out.column_names.assign(day_parts.begin(), day_parts.end());
    out.column_names.push_back("weekend");
    out.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(timestamps.size()), 8);

    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        const UnixSeconds t = timestamps[i];
        const int bucket = hour_of_day(t) / 3;  // 0 = midnight reference, 1..7 emitted
        if (bucket > 0) out.rows(static_cast<Eigen::Index>(i), bucket - 1) = 1.0;
        if (is_weekend(t)) out.rows(static_cast<Eigen::Index>(i), 7) = 1.0;
    }
    return out;
}

/// Writes the matrix as CSV with the column names as header, one row per step.
inline void write_exog_csv(std::ostream& out, const ExogMatrix& exog,
                           const std::vector<UnixSeconds>& timestamps) {
    if (timestamps.size() != exog.size()) {
        throw std::invalid_argument("exog csv: timestamp count does not match row count");
    }
    out << "timestamp";
    for (const auto& name : exog.column_names) out << ',' << name;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < exog.size(); ++i) {
        out << format_iso8601(timestamps[i]);
        for (std::size_t j = 0; j < exog.n_features(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.9g",
                          exog.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace rollcast
