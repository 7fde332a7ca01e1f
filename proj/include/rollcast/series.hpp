#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rollcast/datetime.hpp"

namespace rollcast {

/// One raw telemetry sample: a UTC timestamp and a traffic rate in bits per
/// second. A NaN value marks a missing measurement.
struct RawRecord {
    UnixSeconds timestamp = 0;
    double value = std::numeric_limits<double>::quiet_NaN();
};

inline bool is_missing(double v) { return std::isnan(v); }

/// Telemetry snapped onto a uniform grid. Grid gaps are NaN entries.
struct RawSeries {
    UnixSeconds start = 0;
    int interval_seconds = 300;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    UnixSeconds timestamp_at(std::size_t i) const {
        return start + static_cast<UnixSeconds>(i) * interval_seconds;
    }
    int samples_per_day() const { return static_cast<int>(kSecondsPerDay) / interval_seconds; }
};

/// A clean, gap-free series in Gbps. This is the y_t every model consumes.
struct TimeSeries {
    UnixSeconds start = 0;
    int interval_seconds = 300;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    UnixSeconds timestamp_at(std::size_t i) const {
        return start + static_cast<UnixSeconds>(i) * interval_seconds;
    }
    UnixSeconds end_timestamp() const { return timestamp_at(values.size()); }
    int samples_per_day() const { return static_cast<int>(kSecondsPerDay) / interval_seconds; }

    std::vector<UnixSeconds> timestamps() const {
        std::vector<UnixSeconds> out(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = timestamp_at(i);
        return out;
    }
};

struct SplitSpec {
    std::size_t train_len = 0;
    std::size_t test_len = 0;
};

namespace detail {

inline void check_interval(int interval_seconds) {
    if (interval_seconds <= 0 || kSecondsPerDay % interval_seconds != 0) {
        throw std::invalid_argument("interval_seconds must be positive and divide 86400, got " +
                                    std::to_string(interval_seconds));
    }
}

}  // namespace detail

/// Projects raw records onto the declared uniform grid. Timestamps are snapped
/// to the grid; anything off-grid by more than one second is rejected rather
/// than rounded. Gaps between records become NaN entries.
inline RawSeries ingest_raw(const std::vector<RawRecord>& records, int interval_seconds = 300) {
    detail::check_interval(interval_seconds);
    if (records.empty()) throw std::invalid_argument("ingest_raw: no records");

    const std::int64_t iv = interval_seconds;
    std::vector<std::int64_t> slots;
    slots.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const UnixSeconds t = records[i].timestamp;
        std::int64_t slot = detail::floor_div(t + iv / 2, iv);
        const std::int64_t offset = t - slot * iv;
        if (offset > 1 || offset < -1) {
            throw std::invalid_argument("ingest_raw: record at " + format_iso8601(t) +
                                        " is off the " + std::to_string(interval_seconds) +
                                        "-second grid by " + std::to_string(offset) + " seconds");
        }
        if (!slots.empty()) {
            if (slot == slots.back()) {
                throw std::invalid_argument("ingest_raw: duplicate timestamp " + format_iso8601(t));
            }
            if (slot < slots.back()) {
                throw std::invalid_argument("ingest_raw: timestamps not increasing at " +
                                            format_iso8601(t));
            }
        }
        const double v = records[i].value;
        if (!is_missing(v)) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("ingest_raw: non-finite value at " + format_iso8601(t));
            }
            if (v < 0.0) {
                throw std::invalid_argument("ingest_raw: negative traffic value at " +
                                            format_iso8601(t));
            }
        }
        slots.push_back(slot);
    }

    RawSeries out;
    out.interval_seconds = interval_seconds;
    out.start = slots.front() * iv;
    out.values.assign(static_cast<std::size_t>(slots.back() - slots.front() + 1),
                      std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < records.size(); ++i) {
        out.values[static_cast<std::size_t>(slots[i] - slots.front())] = records[i].value;
    }
    return out;
}

/// Drops a trailing partial day. The series must start on a UTC midnight.
inline RawSeries trim_incomplete_days(const RawSeries& series) {
    if (detail::floor_mod(series.start, kSecondsPerDay) != 0) {
        throw std::invalid_argument("trim_incomplete_days: series does not start at a UTC midnight (" +
                                    format_iso8601(series.start) + ")");
    }
    const std::size_t spd = static_cast<std::size_t>(series.samples_per_day());
    if (series.size() < spd) {
        throw std::invalid_argument("trim_incomplete_days: series is shorter than one day");
    }
    RawSeries out = series;
    out.values.resize(series.size() - series.size() % spd);
    return out;
}

struct ImputeResult {
    RawSeries series;
    std::size_t n_imputed = 0;
    double mean = 0.0;
};

/// Replaces every missing entry with the mean of the observed ones.
inline ImputeResult impute_mean(const RawSeries& series) {
    double sum = 0.0;
    std::size_t observed = 0;
    for (double v : series.values) {
        if (!is_missing(v)) {
            sum += v;
            ++observed;
        }
    }
    if (observed == 0) throw std::invalid_argument("impute_mean: all entries are missing");

    ImputeResult result;
    result.mean = sum / static_cast<double>(observed);
    result.series = series;
    for (double& v : result.series.values) {
        if (is_missing(v)) {
            v = result.mean;
            ++result.n_imputed;
        }
    }
    return result;
}

/// bps -> Gbps. Requires a fully imputed series.
inline TimeSeries rescale_to_gbps(const RawSeries& series) {
    TimeSeries out;
    out.start = series.start;
    out.interval_seconds = series.interval_seconds;
    out.values.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = series.values[i];
        if (is_missing(v)) {
            throw std::invalid_argument("rescale_to_gbps: missing value at " +
                                        format_iso8601(series.timestamp_at(i)) +
                                        "; impute before rescaling");
        }
        out.values.push_back(v * 1e-9);
    }
    return out;
}

inline std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec) {
    if (spec.test_len < 1) throw std::invalid_argument("split: test_len must be >= 1");
    if (spec.train_len < 1) throw std::invalid_argument("split: train_len must be >= 1");
    if (spec.train_len + spec.test_len > series.size()) {
        throw std::invalid_argument("split: train_len + test_len = " +
                                    std::to_string(spec.train_len + spec.test_len) +
                                    " exceeds series length " + std::to_string(series.size()));
    }
    TimeSeries train;
    train.start = series.start;
    train.interval_seconds = series.interval_seconds;
    train.values.assign(series.values.begin(),
                        series.values.begin() + static_cast<std::ptrdiff_t>(spec.train_len));
    TimeSeries test;
    test.start = series.timestamp_at(spec.train_len);
    test.interval_seconds = series.interval_seconds;
    test.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(spec.train_len),
                       series.values.begin() +
                           static_cast<std::ptrdiff_t>(spec.train_len + spec.test_len));
    return {std::move(train), std::move(test)};
}

}  // namespace rollcast
