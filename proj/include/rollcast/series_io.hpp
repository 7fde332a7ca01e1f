#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rollcast/series.hpp"

namespace rollcast {

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline RawRecord parse_record_json(const nlohmann::json& obj, const std::string& where) {
    if (!obj.is_object() || !obj.contains("timestamp")) {
        throw std::invalid_argument(where + ": expected an object with a \"timestamp\" field");
    }
    RawRecord rec;
    const auto& ts = obj.at("timestamp");
    if (!ts.is_string()) throw std::invalid_argument(where + ": \"timestamp\" must be a string");
    const auto parsed = parse_iso8601(ts.get<std::string>());
    if (!parsed) {
        throw std::invalid_argument(where + ": bad timestamp \"" + ts.get<std::string>() + "\"");
    }
    rec.timestamp = *parsed;
    if (obj.contains("value") && !obj.at("value").is_null()) {
        if (!obj.at("value").is_number()) {
            throw std::invalid_argument(where + ": \"value\" must be a number or null");
        }
        rec.value = obj.at("value").get<double>();
    }
    return rec;
}

}  // namespace detail

/// Reads telemetry records from JSON: either a top-level array of
/// {"timestamp", "value"} objects or one such object per line (NDJSON).
/// A null or absent value marks a missing measurement.
inline std::vector<RawRecord> read_records_json(std::istream& in) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t first = 0;
    while (first < content.size() && std::isspace(static_cast<unsigned char>(content[first]))) ++first;
    if (first == content.size()) throw std::invalid_argument("json input: empty document");

    std::vector<RawRecord> records;
    if (content[first] == '[') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(content);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument(std::string("json input: ") + e.what());
        }
        for (std::size_t i = 0; i < doc.size(); ++i) {
            records.push_back(detail::parse_record_json(doc[i], "json record " + std::to_string(i)));
        }
    } else {
        std::istringstream lines(content);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            line = detail::strip(line);
            if (line.empty()) continue;
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
            }
            records.push_back(detail::parse_record_json(obj, "line " + std::to_string(line_no)));
        }
    }
    return records;
}

/// Reads a two-column "timestamp,value" CSV with a header row. An empty value
/// field marks a missing measurement.
inline std::vector<RawRecord> read_records_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::invalid_argument("csv input: empty file");
    ++line_no;

    std::vector<RawRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::strip(line);
        if (trimmed.empty()) continue;
        const std::size_t comma = trimmed.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected timestamp,value");
        }
        RawRecord rec;
        const std::string ts = detail::strip(trimmed.substr(0, comma));
        const auto parsed = parse_iso8601(ts);
        if (!parsed) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad timestamp \"" + ts +
                                        "\"");
        }
        rec.timestamp = *parsed;
        const std::string val = detail::strip(trimmed.substr(comma + 1));
        if (!val.empty()) {
            try {
                std::size_t pos = 0;
                rec.value = std::stod(val, &pos);
                if (pos != val.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": bad value \"" + val +
                                            "\"");
            }
        }
        records.push_back(rec);
    }
    if (records.empty()) throw std::invalid_argument("csv input: no data rows");
    return records;
}

/// Canonical output format: "timestamp,value_gbps", values at 9 significant digits.
inline void write_canonical_csv(std::ostream& out, const TimeSeries& series) {
    out << "timestamp,value_gbps\n";
    char buf[40];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", series.values[i]);
        out << format_iso8601(series.timestamp_at(i)) << ',' << buf << '\n';
    }
}

/// Reads a canonical CSV back into a TimeSeries, checking the grid is uniform
/// and gap-free.
inline TimeSeries read_canonical_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::invalid_argument("csv input: empty file");
    ++line_no;

    TimeSeries series;
    std::vector<UnixSeconds> stamps;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::strip(line);
        if (trimmed.empty()) continue;
        const std::size_t comma = trimmed.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected timestamp,value_gbps");
        }
        const auto parsed = parse_iso8601(detail::strip(trimmed.substr(0, comma)));
        if (!parsed) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad timestamp");
        }
        const std::string val = detail::strip(trimmed.substr(comma + 1));
        double v = 0.0;
        try {
            std::size_t pos = 0;
            v = std::stod(val, &pos);
            if (pos != val.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad value \"" + val +
                                        "\"");
        }
        if (!std::isfinite(v)) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": non-finite value");
        }
        stamps.push_back(*parsed);
        series.values.push_back(v);
    }
    if (series.values.empty()) throw std::invalid_argument("csv input: no data rows");
    series.start = stamps.front();
    if (stamps.size() > 1) {
        const std::int64_t step = stamps[1] - stamps[0];
        if (step <= 0) throw std::invalid_argument("csv input: timestamps not increasing");
        detail::check_interval(static_cast<int>(step));
        series.interval_seconds = static_cast<int>(step);
        for (std::size_t i = 1; i < stamps.size(); ++i) {
            if (stamps[i] - stamps[i - 1] != step) {
                throw std::invalid_argument("csv input: grid gap before " + format_iso8601(stamps[i]));
            }
        }
    }
    return series;
}

inline TimeSeries read_canonical_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    try {
        return read_canonical_csv(in);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

}  // namespace rollcast
