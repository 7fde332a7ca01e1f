// Batch front end: wires ingestion, diagnostics, order selection, fitting,
// forecasting, and the standard-vs-rolling comparison into subcommands with
// JSON configs and reproducible file outputs.
//
// Exit codes: 0 success, 2 validation error, 3 partial failure (some items
// failed; outputs and per-item statuses were still written).
//
// Determinism: for a fixed config and seed every data output is byte-identical
// across runs. The exceptions, by nature, are wall-clock fields: manifest.json
// records timing, and grid.csv has a per-candidate seconds column.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rollcast/rollcast.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config: one JSON document per run. Flags override config keys; every key
// must be known — typos fail loudly with the full dotted path.
// ---------------------------------------------------------------------------

void check_allowed(const json& obj, const std::string& path, const std::set<std::string>& allowed,
                   std::vector<std::string>& unknown) {
    if (!obj.is_object()) {
        throw std::invalid_argument("config: " + (path.empty() ? "document root" : path) +
                                    " must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            unknown.push_back(path.empty() ? item.key() : path + "." + item.key());
        }
    }
}

void check_order_keys(const json& j, const std::string& path, std::vector<std::string>& unknown) {
    check_allowed(j, path, {"p", "d", "q"}, unknown);
}

void check_seasonal_keys(const json& j, const std::string& path, std::vector<std::string>& unknown) {
    check_allowed(j, path, {"P", "D", "Q", "S"}, unknown);
}

void check_model_keys(const json& j, const std::string& path, std::vector<std::string>& unknown) {
    check_allowed(j, path,
                  {"type", "label", "order", "seasonal", "exog", "hw_season_length",
                   "refit_interval", "filter_only"},
                  unknown);
    if (j.contains("order") && j.at("order").is_object()) {
        check_order_keys(j.at("order"), path + ".order", unknown);
    }
    if (j.contains("seasonal") && j.at("seasonal").is_object()) {
        check_seasonal_keys(j.at("seasonal"), path + ".seasonal", unknown);
    }
}

void check_config_keys(const json& cfg) {
    std::vector<std::string> unknown;
    check_allowed(cfg, "",
                  {"input", "out", "seed", "jobs", "top", "interval_seconds", "split", "grid",
                   "model", "models", "model_file", "horizon", "refit_interval", "filter_only",
                   "synth", "diagnostics"},
                  unknown);
    if (cfg.contains("split") && cfg.at("split").is_object()) {
        check_allowed(cfg.at("split"), "split", {"train_days", "test_days", "train_len", "test_len"},
                      unknown);
    }
    if (cfg.contains("grid") && cfg.at("grid").is_object()) {
        const json& g = cfg.at("grid");
        check_allowed(g, "grid",
                      {"p_values", "p_max", "q_values", "q_max", "d", "seasonal", "exog",
                       "timeout_seconds"},
                      unknown);
        if (g.contains("seasonal") && g.at("seasonal").is_object()) {
            check_seasonal_keys(g.at("seasonal"), "grid.seasonal", unknown);
        }
    }
    if (cfg.contains("model") && cfg.at("model").is_object()) {
        check_model_keys(cfg.at("model"), "model", unknown);
    }
    if (cfg.contains("models") && cfg.at("models").is_array()) {
        for (std::size_t i = 0; i < cfg.at("models").size(); ++i) {
            const json& m = cfg.at("models")[i];
            if (m.is_object()) check_model_keys(m, "models[" + std::to_string(i) + "]", unknown);
        }
    }
    if (cfg.contains("synth") && cfg.at("synth").is_object()) {
        check_allowed(cfg.at("synth"), "synth",
                      {"n", "start", "interval_seconds", "phi", "theta", "seasonal_phi",
                       "seasonal_theta", "season_length", "d", "D", "sigma", "base_level",
                       "daily_amplitude", "level_shift_factor", "level_shift_index", "burn_in"},
                      unknown);
    }
    if (cfg.contains("diagnostics") && cfg.at("diagnostics").is_object()) {
        check_allowed(cfg.at("diagnostics"), "diagnostics",
                      {"adf_max_lag", "acf_lags", "decomposition_period"}, unknown);
    }
    if (!unknown.empty()) {
        std::string msg = "config: unknown key";
        if (unknown.size() > 1) msg += 's';
        for (std::size_t i = 0; i < unknown.size(); ++i) {
            msg += (i == 0 ? ": " : ", ") + unknown[i];
        }
        throw std::invalid_argument(msg);
    }
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(path + ": invalid JSON: " + e.what());
    }
    check_config_keys(cfg);
    return cfg;
}

const json* find(const json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

[[noreturn]] void bad_key(const std::string& path, const std::string& expected) {
    throw std::invalid_argument("config: " + path + " must be " + expected);
}

int cfg_int(const json& j, const std::string& path, const std::string& key, int fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) bad_key(path + key, "an integer");
    return v->get<int>();
}

std::uint64_t cfg_u64(const json& j, const std::string& path, const std::string& key,
                      std::uint64_t fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!(v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0))) {
        bad_key(path + key, "a nonnegative integer");
    }
    return v->get<std::uint64_t>();
}

double cfg_double(const json& j, const std::string& path, const std::string& key, double fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number()) bad_key(path + key, "a number");
    return v->get<double>();
}

bool cfg_bool(const json& j, const std::string& path, const std::string& key, bool fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad_key(path + key, "a boolean");
    return v->get<bool>();
}

std::string cfg_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) bad_key(path + key, "a string");
    return v->get<std::string>();
}

std::vector<int> cfg_int_array(const json& j, const std::string& path, const std::string& key) {
    const json* v = find(j, key);
    if (!v || !v->is_array() || v->empty()) bad_key(path + key, "a non-empty array of integers");
    std::vector<int> out;
    for (const auto& e : *v) {
        if (!e.is_number_integer()) bad_key(path + key, "a non-empty array of integers");
        out.push_back(e.get<int>());
    }
    return out;
}

std::vector<double> cfg_double_array(const json& j, const std::string& path, const std::string& key) {
    const json* v = find(j, key);
    if (!v) return {};
    if (!v->is_array()) bad_key(path + key, "an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
        if (!e.is_number()) bad_key(path + key, "an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run directory plumbing: collected output names, input-overwrite protection,
// and the manifest every subcommand leaves behind.
// ---------------------------------------------------------------------------

struct Workspace {
    fs::path out_dir;
    fs::path input_path;  // empty when the command reads no input file
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit Workspace(const json& cfg) {
        out_dir = cfg_string(cfg, "", "out", ".");
        fs::create_directories(out_dir);
        const std::string in = cfg_string(cfg, "", "input", "");
        if (!in.empty()) input_path = in;
    }

    fs::path reserve(const std::string& name) {
        const fs::path p = out_dir / name;
        if (!input_path.empty() && fs::exists(input_path) &&
            fs::weakly_canonical(p) == fs::weakly_canonical(input_path)) {
            throw std::invalid_argument("refusing to overwrite the input file: " +
                                        input_path.string());
        }
        outputs.push_back(name);
        return p;
    }

    std::ofstream open(const std::string& name) {
        const fs::path p = reserve(name);
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
        return f;
    }

    void write_manifest(const std::string& command, const json& cfg, std::uint64_t seed,
                        const json& items = json()) {
        json m;
        m["command"] = command;
        m["config"] = cfg;
        m["seed"] = seed;
        m["versions"] = {{"rollcast", ROLLCAST_VERSION}};
        m["generated_at"] = rollcast::format_iso8601(static_cast<rollcast::UnixSeconds>(
            std::time(nullptr)));
        m["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["outputs"] = outputs;
        if (!items.is_null()) m["items"] = items;
        auto f = open("manifest.json");
        f << m.dump(2) << '\n';
    }
};

std::string format9g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string cell9g(double v) { return std::isfinite(v) ? format9g(v) : std::string(); }

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("model") : out;
}

// ---------------------------------------------------------------------------
// Shared input handling: canonical series loading and the train/test split.
// ---------------------------------------------------------------------------

rollcast::TimeSeries load_input_series(const json& cfg) {
    const std::string path = cfg_string(cfg, "", "input", "");
    if (path.empty()) {
        throw std::invalid_argument("no input file: pass one as an argument or set \"input\"");
    }
    return rollcast::read_canonical_csv_file(path);
}

bool has_split(const json& cfg) { return find(cfg, "split") != nullptr; }

std::pair<rollcast::TimeSeries, rollcast::TimeSeries> apply_split(const rollcast::TimeSeries& series,
                                                                  const json& cfg) {
    const json* sp = find(cfg, "split");
    if (!sp) throw std::invalid_argument("config: a \"split\" section is required");
    const std::size_t spd = static_cast<std::size_t>(series.samples_per_day());

    auto length_of = [&](const char* len_key, const char* days_key,
                         std::optional<std::size_t> fallback) -> std::size_t {
        const json* len = find(*sp, len_key);
        const json* days = find(*sp, days_key);
        if (len && days) {
            throw std::invalid_argument(std::string("config: split has both ") + len_key + " and " +
                                        days_key);
        }
        if (len) {
            if (!len->is_number_integer() || len->get<std::int64_t>() < 1) {
                bad_key(std::string("split.") + len_key, "a positive integer");
            }
            return len->get<std::size_t>();
        }
        if (days) {
            if (!days->is_number_integer() || days->get<std::int64_t>() < 1) {
                bad_key(std::string("split.") + days_key, "a positive integer");
            }
            return days->get<std::size_t>() * spd;
        }
        if (fallback) return *fallback;
        throw std::invalid_argument(std::string("config: split needs ") + len_key + " or " +
                                    days_key);
    };

    rollcast::SplitSpec spec;
    spec.train_len = length_of("train_len", "train_days", std::nullopt);
    if (spec.train_len >= series.size()) {
        throw std::invalid_argument("config: split train length " + std::to_string(spec.train_len) +
                                    " leaves no test data in a series of length " +
                                    std::to_string(series.size()));
    }
    spec.test_len = length_of("test_len", "test_days", series.size() - spec.train_len);
    return rollcast::split(series, spec);
}

/// The window model-fitting subcommands operate on: the training part when a
/// split is configured, the whole input otherwise.
rollcast::TimeSeries fitting_window(const json& cfg, std::string* used) {
    const rollcast::TimeSeries series = load_input_series(cfg);
    if (has_split(cfg)) {
        if (used) *used = "train";
        return apply_split(series, cfg).first;
    }
    if (used) *used = "full";
    return series;
}

// ---------------------------------------------------------------------------
// Model specs shared by `fit` and `evaluate`.
// ---------------------------------------------------------------------------

struct SpecDefaults {
    int hw_season_length = 288;
    int refit_interval = 1;
    bool filter_only = false;
};

rollcast::ModelOrder parse_order(const json& j, const std::string& path) {
    if (!j.is_object()) bad_key(path, "an object {p, d, q}");
    rollcast::ModelOrder order;
    for (const char* key : {"p", "d", "q"}) {
        if (!find(j, key)) bad_key(path, "an object with integer p, d, and q");
    }
    order.p = cfg_int(j, path + ".", "p", 0);
    order.d = cfg_int(j, path + ".", "d", 0);
    order.q = cfg_int(j, path + ".", "q", 0);
    return order;
}

rollcast::SeasonalOrder parse_seasonal(const json& j, const std::string& path) {
    if (!j.is_object()) bad_key(path, "an object {P, D, Q, S}");
    rollcast::SeasonalOrder seasonal;
    seasonal.P = cfg_int(j, path + ".", "P", 0);
    seasonal.D = cfg_int(j, path + ".", "D", 0);
    seasonal.Q = cfg_int(j, path + ".", "Q", 0);
    seasonal.S = cfg_int(j, path + ".", "S", 0);
    return seasonal;
}

rollcast::PredictorSpec parse_model_spec(const json& j, const std::string& path,
                                         const SpecDefaults& defaults) {
    if (!j.is_object()) bad_key(path, "an object");
    const std::string type = cfg_string(j, path + ".", "type", "");
    rollcast::PredictorSpec spec;
    if (type == "arima") {
        spec.model_type = rollcast::ModelType::arima;
    } else if (type == "sarima") {
        spec.model_type = rollcast::ModelType::sarima;
    } else if (type == "sarimax") {
        spec.model_type = rollcast::ModelType::sarimax;
    } else if (type == "holt_winters") {
        spec.model_type = rollcast::ModelType::holt_winters;
    } else {
        bad_key(path + ".type", "one of \"arima\", \"sarima\", \"sarimax\", \"holt_winters\"");
    }
    spec.label = cfg_string(j, path + ".", "label", "");
    if (spec.model_type != rollcast::ModelType::holt_winters) {
        const json* order = find(j, "order");
        if (!order) {
            throw std::invalid_argument("config: " + path + ".order is required for type \"" +
                                        type + "\"");
        }
        spec.order = parse_order(*order, path + ".order");
        if (const json* seasonal = find(j, "seasonal")) {
            spec.seasonal = parse_seasonal(*seasonal, path + ".seasonal");
        }
    }
    spec.use_exog = cfg_bool(j, path + ".", "exog", false);
    spec.hw_season_length = cfg_int(j, path + ".", "hw_season_length", defaults.hw_season_length);
    spec.refit_interval = cfg_int(j, path + ".", "refit_interval", defaults.refit_interval);
    spec.filter_only = cfg_bool(j, path + ".", "filter_only", defaults.filter_only);
    rollcast::validate_spec(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

int cmd_synth(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    rollcast::SynthSpec spec;
    if (const json* s = find(cfg, "synth")) {
        const std::string p = "synth.";
        spec.n = static_cast<std::size_t>(cfg_int(*s, p, "n", static_cast<int>(spec.n)));
        if (const json* start = find(*s, "start")) {
            if (start->is_number_integer()) {
                spec.start = start->get<std::int64_t>();
            } else if (start->is_string()) {
                const auto parsed = rollcast::parse_iso8601(start->get<std::string>());
                if (!parsed) bad_key("synth.start", "a unix timestamp or ISO-8601 string");
                spec.start = *parsed;
            } else {
                bad_key("synth.start", "a unix timestamp or ISO-8601 string");
            }
        }
        spec.interval_seconds = cfg_int(*s, p, "interval_seconds",
                                        static_cast<int>(spec.interval_seconds));
        spec.phi = cfg_double_array(*s, p, "phi");
        spec.theta = cfg_double_array(*s, p, "theta");
        spec.seasonal_phi = cfg_double_array(*s, p, "seasonal_phi");
        spec.seasonal_theta = cfg_double_array(*s, p, "seasonal_theta");
        spec.season_length = cfg_int(*s, p, "season_length", 0);
        spec.d = cfg_int(*s, p, "d", 0);
        spec.D = cfg_int(*s, p, "D", 0);
        spec.sigma = cfg_double(*s, p, "sigma", spec.sigma);
        spec.base_level = cfg_double(*s, p, "base_level", spec.base_level);
        spec.daily_amplitude = cfg_double(*s, p, "daily_amplitude", 0.0);
        spec.level_shift_factor = cfg_double(*s, p, "level_shift_factor", 1.0);
        spec.level_shift_index =
            static_cast<std::size_t>(cfg_int(*s, p, "level_shift_index", 0));
        spec.burn_in = static_cast<std::size_t>(cfg_int(*s, p, "burn_in",
                                                        static_cast<int>(spec.burn_in)));
    }
    const rollcast::TimeSeries series = rollcast::synthesize(spec, seed);

    Workspace ws(cfg);
    {
        auto out = ws.open("series.csv");
        rollcast::write_canonical_csv(out, series);
    }
    std::cerr << "synth: wrote " << (ws.out_dir / "series.csv").string() << " (" << series.size()
              << " samples at " << series.interval_seconds << " s)\n";
    ws.write_manifest("synth", cfg, seed, json{{"n", series.size()}});
    return 0;
}

int cmd_ingest(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    const std::string path = cfg_string(cfg, "", "input", "");
    if (path.empty()) {
        throw std::invalid_argument("no input file: pass one as an argument or set \"input\"");
    }
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    // Sniff the format from the first non-space byte: JSON documents start
    // with '[' or '{'; anything else is treated as the two-column CSV.
    std::size_t first = 0;
    while (first < content.size() && std::isspace(static_cast<unsigned char>(content[first]))) {
        ++first;
    }
    if (first == content.size()) throw std::invalid_argument(path + ": empty input");
    std::vector<rollcast::RawRecord> records;
    {
        std::istringstream stream(content);
        try {
            records = (content[first] == '[' || content[first] == '{')
                          ? rollcast::read_records_json(stream)
                          : rollcast::read_records_csv(stream);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path + ": " + e.what());
        }
    }

    const int interval = cfg_int(cfg, "", "interval_seconds", 300);
    const rollcast::RawSeries raw = rollcast::ingest_raw(records, interval);
    const rollcast::ImputeResult imputed = rollcast::impute_mean(raw);
    const rollcast::TimeSeries series = rollcast::rescale_to_gbps(imputed.series);

    Workspace ws(cfg);
    {
        auto out = ws.open("series.csv");
        rollcast::write_canonical_csv(out, series);
    }
    std::cerr << "ingest: " << records.size() << " records onto a " << raw.size()
              << "-slot grid; imputed " << imputed.n_imputed << " missing entr"
              << (imputed.n_imputed == 1 ? "y" : "ies") << " with the mean ("
              << format9g(imputed.mean) << " bps)\n";
    ws.write_manifest("ingest", cfg, seed,
                      json{{"n_records", records.size()},
                           {"n_slots", raw.size()},
                           {"n_imputed", imputed.n_imputed},
                           {"mean_bps", imputed.mean}});
    return 0;
}

int cmd_preprocess(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    const rollcast::TimeSeries series = load_input_series(cfg);
    rollcast::RawSeries raw;
    raw.start = series.start;
    raw.interval_seconds = series.interval_seconds;
    raw.values = series.values;
    const rollcast::RawSeries trimmed = rollcast::trim_incomplete_days(raw);
    rollcast::TimeSeries clean;
    clean.start = trimmed.start;
    clean.interval_seconds = trimmed.interval_seconds;
    clean.values = trimmed.values;

    Workspace ws(cfg);
    {
        auto out = ws.open("processed.csv");
        rollcast::write_canonical_csv(out, clean);
    }
    json items{{"n_in", series.size()},
               {"n_out", clean.size()},
               {"n_trimmed", series.size() - clean.size()},
               {"n_days", clean.size() / static_cast<std::size_t>(clean.samples_per_day())}};
    if (has_split(cfg)) {
        const auto [train, test] = apply_split(clean, cfg);
        {
            auto out = ws.open("train.csv");
            rollcast::write_canonical_csv(out, train);
        }
        {
            auto out = ws.open("test.csv");
            rollcast::write_canonical_csv(out, test);
        }
        items["train_len"] = train.size();
        items["test_len"] = test.size();
    }
    std::cerr << "preprocess: " << series.size() << " -> " << clean.size() << " samples ("
              << (series.size() - clean.size()) << " trimmed from a trailing partial day)\n";
    ws.write_manifest("preprocess", cfg, seed, items);
    return 0;
}

int cmd_diagnose(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    const rollcast::TimeSeries series = load_input_series(cfg);
    const std::size_t n = series.size();
    const json empty = json::object();
    const json& dj = find(cfg, "diagnostics") ? *find(cfg, "diagnostics") : empty;

    const int period = cfg_int(dj, "diagnostics.", "decomposition_period",
                               series.samples_per_day());
    if (period < 2) bad_key("diagnostics.decomposition_period", "an integer of at least 2");
    if (n < 2 * static_cast<std::size_t>(period)) {
        throw std::invalid_argument(
            "diagnose: series has " + std::to_string(n) + " samples, fewer than two full cycles of " +
            std::to_string(period) + "; set diagnostics.decomposition_period or provide more data");
    }

    const std::size_t max_pacf = n / 2 - 1;
    const std::size_t default_lags =
        std::min<std::size_t>(2 * static_cast<std::size_t>(period), max_pacf);
    const int lags_cfg = cfg_int(dj, "diagnostics.", "acf_lags", static_cast<int>(default_lags));
    if (lags_cfg < 1 || static_cast<std::size_t>(lags_cfg) > max_pacf) {
        bad_key("diagnostics.acf_lags",
                "an integer in [1, " + std::to_string(max_pacf) + "] for this series");
    }
    const std::size_t n_lags = static_cast<std::size_t>(lags_cfg);

    std::optional<int> max_lag;
    if (find(dj, "adf_max_lag")) max_lag = cfg_int(dj, "diagnostics.", "adf_max_lag", 0);

    const rollcast::AdfResult adf = rollcast::adf_test(series.values, max_lag);
    const rollcast::CorrelationSequence r = rollcast::acf(series.values, n_lags);
    const rollcast::CorrelationSequence pr = rollcast::pacf(series.values, n_lags);
    const double band = 2.0 / std::sqrt(static_cast<double>(n));
    const rollcast::Decomposition dec =
        rollcast::decompose_additive(series.values, static_cast<std::size_t>(period));

    Workspace ws(cfg);
    {
        auto out = ws.open("decomposition.csv");
        out << "original,trend,seasonal,residual\n";
        for (std::size_t i = 0; i < n; ++i) {
            out << cell9g(series.values[i]) << ',' << cell9g(dec.trend[i]) << ','
                << cell9g(dec.seasonal[i]) << ',' << cell9g(dec.residual[i]) << '\n';
        }
    }
    {
        json doc;
        doc["n"] = n;
        doc["interval_seconds"] = series.interval_seconds;
        doc["samples_per_day"] = series.samples_per_day();
        doc["adf"] = {{"statistic", adf.statistic},
                      {"p_value", adf.p_value},
                      {"used_lags", adf.used_lags},
                      {"n_obs", adf.n_obs},
                      {"critical_values", adf.critical_values}};
        doc["acf"] = {{"values", r.values}, {"confidence_band", band}};
        doc["pacf"] = {{"values", pr.values}, {"confidence_band", band}};
        doc["decomposition"] = {{"period", period}, {"file", "decomposition.csv"}};
        auto out = ws.open("diagnostics.json");
        out << doc.dump(2) << '\n';
    }

    char line[160];
    std::snprintf(line, sizeof(line), "adf: statistic=%.6f p_value=%.6g used_lags=%d n_obs=%d",
                  adf.statistic, adf.p_value, adf.used_lags, adf.n_obs);
    std::cout << line << '\n';
    std::cout << (adf.p_value < 0.05 ? "adf: unit root rejected at the 5% level (stationary)"
                                     : "adf: no evidence against a unit root at the 5% level")
              << '\n';
    std::snprintf(line, sizeof(line), "acf/pacf: %zu lags, confidence band +/-%.6f", n_lags, band);
    std::cout << line << '\n';
    std::cout << "decomposition: period " << period << " -> decomposition.csv\n";

    ws.write_manifest("diagnose", cfg, seed,
                      json{{"adf_p_value", adf.p_value}, {"n_lags", n_lags}, {"period", period}});
    return 0;
}

std::vector<int> parse_grid_axis(const json& g, const char* values_key, const char* max_key) {
    const json* values = find(g, values_key);
    const json* max = find(g, max_key);
    if (values && max) {
        throw std::invalid_argument(std::string("config: grid has both ") + values_key + " and " +
                                    max_key);
    }
    if (values) return cfg_int_array(g, "grid.", values_key);
    if (max) {
        const int hi = cfg_int(g, "grid.", max_key, 0);
        if (hi < 0) bad_key(std::string("grid.") + max_key, "a nonnegative integer");
        std::vector<int> out(static_cast<std::size_t>(hi) + 1);
        for (int i = 0; i <= hi; ++i) out[static_cast<std::size_t>(i)] = i;
        return out;
    }
    throw std::invalid_argument(std::string("config: grid needs ") + values_key + " or " + max_key);
}

json grid_items(const rollcast::RankedCandidates& table) {
    json items = json::array();
    for (const auto& row : table.rows) {
        json item{{"p", row.order.p},       {"d", row.order.d},       {"q", row.order.q},
                  {"P", row.seasonal.P},    {"D", row.seasonal.D},    {"Q", row.seasonal.Q},
                  {"S", row.seasonal.S},    {"status", rollcast::to_string(row.status)}};
        if (!row.message.empty()) item["message"] = row.message;
        items.push_back(std::move(item));
    }
    return items;
}

int cmd_gridsearch(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    std::string window;
    const rollcast::TimeSeries series = fitting_window(cfg, &window);

    const json* g = find(cfg, "grid");
    if (!g) throw std::invalid_argument("config: a \"grid\" section is required");
    rollcast::GridSpec spec;
    spec.p_values = parse_grid_axis(*g, "p_values", "p_max");
    spec.q_values = parse_grid_axis(*g, "q_values", "q_max");
    spec.d = cfg_int(*g, "grid.", "d", 0);
    if (const json* seasonal = find(*g, "seasonal")) {
        spec.seasonal = parse_seasonal(*seasonal, "grid.seasonal");
    }
    spec.with_exog = cfg_bool(*g, "grid.", "exog", false);
    spec.timeout_per_candidate_seconds = cfg_double(*g, "grid.", "timeout_seconds", 60.0);

    rollcast::ExogMatrix exog;
    if (spec.with_exog) exog = rollcast::extract_features(series.timestamps());
    const int jobs = cfg_int(cfg, "", "jobs", 4);
    const int top = cfg_int(cfg, "", "top", 10);
    if (top < 1) bad_key("top", "a positive integer");

    Workspace ws(cfg);
    rollcast::RankedCandidates table;
    bool all_failed = false;
    std::string failure;
    try {
        table = rollcast::grid_search(series, spec, jobs, seed,
                                      spec.with_exog ? &exog : nullptr);
    } catch (const rollcast::GridSearchError& e) {
        table = e.table;
        all_failed = true;
        failure = e.what();
    }
    {
        auto out = ws.open("grid.csv");
        rollcast::write_grid_csv(out, table);
    }

    std::size_t n_converged = 0;
    for (const auto& row : table.rows) {
        if (row.status == rollcast::CandidateStatus::converged) ++n_converged;
    }
    std::cout << "rank  order              aic            loglik         status\n";
    const std::size_t shown = std::min<std::size_t>(static_cast<std::size_t>(top),
                                                    table.rows.size());
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& row = table.rows[i];
        char order_buf[64], line[160];
        std::snprintf(order_buf, sizeof(order_buf), "(%d,%d,%d)(%d,%d,%d,%d)", row.order.p,
                      row.order.d, row.order.q, row.seasonal.P, row.seasonal.D, row.seasonal.Q,
                      row.seasonal.S);
        std::string aic = std::isfinite(row.aic) ? format9g(row.aic) : "-";
        std::string ll = std::isfinite(row.loglik) ? format9g(row.loglik) : "-";
        std::snprintf(line, sizeof(line), "%4zu  %-17s  %-13s  %-13s  %s", i + 1, order_buf,
                      aic.c_str(), ll.c_str(), rollcast::to_string(row.status));
        std::cout << line << '\n';
    }
    std::cerr << "gridsearch: " << n_converged << " of " << table.rows.size()
              << " candidates converged on the " << window << " window; full table in "
              << (ws.out_dir / "grid.csv").string() << '\n';

    json items = grid_items(table);
    ws.write_manifest("gridsearch", cfg, seed,
                      json{{"candidates", std::move(items)},
                           {"n_converged", n_converged},
                           {"series_window", window}});
    if (all_failed) {
        std::cerr << "gridsearch: " << failure << '\n';
        return 3;
    }
    return 0;
}

int cmd_fit(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    std::string window;
    const rollcast::TimeSeries series = fitting_window(cfg, &window);
    const json* m = find(cfg, "model");
    if (!m) throw std::invalid_argument("config: a \"model\" section is required");
    SpecDefaults defaults;
    defaults.hw_season_length = series.samples_per_day();
    defaults.refit_interval = cfg_int(cfg, "", "refit_interval", 1);
    defaults.filter_only = cfg_bool(cfg, "", "filter_only", false);
    const rollcast::PredictorSpec spec = parse_model_spec(*m, "model", defaults);

    Workspace ws(cfg);
    char line[256];
    if (spec.model_type == rollcast::ModelType::holt_winters) {
        const rollcast::HwFit fitted = rollcast::fit(series, spec.hw_season_length);
        {
            auto out = ws.open("model.json");
            out << rollcast::to_json(fitted).dump(2) << '\n';
        }
        std::snprintf(line, sizeof(line),
                      "holt_winters m=%d alpha=%.6f beta=%.6f gamma=%.6f sse=%.6f",
                      fitted.params.m, fitted.params.alpha, fitted.params.beta, fitted.params.gamma,
                      fitted.sse);
        std::cout << line << '\n';
        ws.write_manifest("fit", cfg, seed,
                          json{{"model", spec.name()}, {"status", "converged"},
                               {"series_window", window}});
        return 0;
    }

    rollcast::ExogMatrix exog;
    if (spec.use_exog) exog = rollcast::extract_features(series.timestamps());
    rollcast::FitOptions options;
    options.seed = seed;
    const rollcast::FittedModel fitted =
        rollcast::fit(series, spec.order, spec.seasonal, spec.use_exog ? &exog : nullptr, options);
    {
        auto out = ws.open("model.json");
        out << rollcast::to_json(fitted).dump(2) << '\n';
    }
    std::snprintf(line, sizeof(line),
                  "%s (%d,%d,%d)(%d,%d,%d,%d) loglik=%.6f aic=%.6f n_obs=%lld converged=%s",
                  rollcast::to_string(spec.model_type), fitted.order.p, fitted.order.d,
                  fitted.order.q, fitted.seasonal.P, fitted.seasonal.D, fitted.seasonal.Q,
                  fitted.seasonal.S, fitted.loglik, fitted.aic,
                  static_cast<long long>(fitted.n_obs_effective), fitted.converged ? "yes" : "no");
    std::cout << line << '\n';
    ws.write_manifest("fit", cfg, seed,
                      json{{"model", spec.name()},
                           {"status", fitted.converged ? "converged" : "not_converged"},
                           {"series_window", window}});
    if (!fitted.converged) {
        std::cerr << "fit: optimizer stopped short of convergence; model.json holds the best "
                     "parameters found\n";
        return 3;
    }
    return 0;
}

int cmd_forecast(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    const rollcast::TimeSeries history = load_input_series(cfg);
    Workspace ws(cfg);
    const std::string model_path =
        cfg_string(cfg, "", "model_file", (ws.out_dir / "model.json").string());
    const json doc = rollcast::load_model_file(model_path);
    const int horizon = cfg_int(cfg, "", "horizon", history.samples_per_day());
    if (horizon < 1) bad_key("horizon", "a positive integer");
    const std::size_t h = static_cast<std::size_t>(horizon);

    std::vector<rollcast::UnixSeconds> future(h);
    for (std::size_t i = 0; i < h; ++i) {
        future[i] = history.end_timestamp() +
                    static_cast<rollcast::UnixSeconds>(i) * history.interval_seconds;
    }

    const std::string type = rollcast::model_type_of(doc);
    std::vector<double> predicted;
    if (type == "sarimax") {
        const rollcast::FittedModel model = rollcast::sarimax_from_json(doc);
        if (model.n_user_exog() > 0) {
            const rollcast::ExogMatrix hist_exog =
                rollcast::extract_features(history.timestamps());
            const rollcast::ExogMatrix future_exog = rollcast::extract_features(future);
            predicted = rollcast::forecast(model, history, h, &future_exog, &hist_exog);
        } else {
            predicted = rollcast::forecast(model, history, h);
        }
    } else if (type == "holt_winters_additive") {
        const rollcast::HwFit fitted = rollcast::holt_winters_from_json(doc);
        predicted = rollcast::forecast(fitted.state, h, fitted.params);
    } else {
        throw std::invalid_argument("forecast: unsupported model_type \"" + type + "\"");
    }

    {
        auto out = ws.open("forecast.csv");
        out << "timestamp,predicted_gbps\n";
        for (std::size_t i = 0; i < h; ++i) {
            out << rollcast::format_iso8601(future[i]) << ',' << format9g(predicted[i]) << '\n';
        }
    }
    std::cerr << "forecast: " << h << " steps from " << rollcast::format_iso8601(future.front())
              << " using " << model_path << '\n';
    ws.write_manifest("forecast", cfg, seed,
                      json{{"model_file", model_path}, {"model_type", type}, {"horizon", h}});
    return 0;
}

int cmd_evaluate(const json& cfg) {
    const std::uint64_t seed = cfg_u64(cfg, "", "seed", 0);
    const rollcast::TimeSeries series = load_input_series(cfg);
    const auto [train, test] = apply_split(series, cfg);

    const json* ms = find(cfg, "models");
    if (!ms || !ms->is_array() || ms->empty()) {
        throw std::invalid_argument("config: a non-empty \"models\" array is required");
    }
    SpecDefaults defaults;
    defaults.hw_season_length = series.samples_per_day();
    defaults.refit_interval = cfg_int(cfg, "", "refit_interval", 1);
    defaults.filter_only = cfg_bool(cfg, "", "filter_only", false);
    std::vector<rollcast::PredictorSpec> specs;
    for (std::size_t i = 0; i < ms->size(); ++i) {
        specs.push_back(
            parse_model_spec((*ms)[i], "models[" + std::to_string(i) + "]", defaults));
    }

    bool any_exog = false;
    for (const auto& spec : specs) any_exog = any_exog || spec.use_exog;
    rollcast::ExogMatrix exog_train, exog_test;
    if (any_exog) {
        exog_train = rollcast::extract_features(train.timestamps());
        exog_test = rollcast::extract_features(test.timestamps());
    }

    const rollcast::EvalReport report =
        rollcast::compare(specs, train, test, any_exog ? &exog_train : nullptr,
                          any_exog ? &exog_test : nullptr, seed);

    Workspace ws(cfg);
    {
        auto out = ws.open("report.csv");
        rollcast::write_report_csv(out, report);
    }
    json items = json::array();
    std::size_t n_failed = 0;
    std::cout << "model  mape_standard_pct  mape_rolling_pct\n";
    for (const auto& row : report.rows) {
        json item{{"model", row.model}, {"ok", row.ok}};
        if (row.ok) {
            const std::string base = "trace_" + sanitize_name(row.model);
            {
                auto out = ws.open(base + "_standard.csv");
                rollcast::write_trace_csv(out, test, row.standard_trace.values);
            }
            {
                auto out = ws.open(base + "_rolling.csv");
                rollcast::write_trace_csv(out, test, row.rolling_trace.values);
            }
            char line[160];
            std::snprintf(line, sizeof(line), "%s  %.6f  %.6f", row.model.c_str(),
                          row.mape_standard_pct, row.mape_rolling_pct);
            std::cout << line << '\n';
            item["mape_standard_pct"] = row.mape_standard_pct;
            item["mape_rolling_pct"] = row.mape_rolling_pct;
            json warnings = json::array();
            for (const auto& w : row.standard_trace.warnings) warnings.push_back(w);
            for (const auto& w : row.rolling_trace.warnings) warnings.push_back(w);
            if (!warnings.empty()) item["warnings"] = std::move(warnings);
        } else {
            ++n_failed;
            std::cout << row.model << "  FAILED: " << row.error << '\n';
            item["error"] = row.error;
        }
        items.push_back(std::move(item));
    }
    std::cerr << "evaluate: " << (report.rows.size() - n_failed) << " of " << report.rows.size()
              << " models completed; report in " << (ws.out_dir / "report.csv").string() << '\n';
    ws.write_manifest("evaluate", cfg, seed,
                      json{{"models", std::move(items)},
                           {"train_len", train.size()},
                           {"test_len", test.size()},
                           {"n_failed", n_failed}});
    return n_failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"univariate traffic forecasting: ARIMA-family and Holt-Winters models with "
                 "standard vs. rolling evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("rollcast ") + ROLLCAST_VERSION);

    std::string config_path, out_dir, input_path;
    std::uint64_t seed = 0;
    int jobs = 0, top = 0, refit_interval = 0;
    bool filter_only = false;

    struct Command {
        CLI::App* sub;
        std::function<int(const json&)> run;
    };
    std::vector<Command> commands;
    auto add_command = [&](const char* name, const char* description, bool takes_input,
                           std::function<int(const json&)> run) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--jobs", jobs, "concurrency degree (overrides config)");
        sub->add_option("--top", top, "ranked rows to print (overrides config)");
        sub->add_option("--refit-interval", refit_interval,
                        "steps between rolling re-estimations (overrides config)");
        sub->add_flag("--filter-only", filter_only,
                      "rolling mode: keep the initial parameters, only advance the state");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        if (takes_input) {
            sub->add_option("input", input_path, "input data file (overrides config \"input\")");
        }
        commands.push_back({sub, std::move(run)});
    };

    add_command("synth", "generate a seeded synthetic traffic series", false, cmd_synth);
    add_command("ingest", "convert raw JSON/CSV telemetry to the canonical series CSV", true,
                cmd_ingest);
    add_command("preprocess", "trim partial days and split into train/test windows", true,
                cmd_preprocess);
    add_command("diagnose", "unit-root test, correlograms, and seasonal decomposition", true,
                cmd_diagnose);
    add_command("gridsearch", "rank candidate model orders by information criterion", true,
                cmd_gridsearch);
    add_command("fit", "fit the configured model and save it as model.json", true, cmd_fit);
    add_command("forecast", "forecast ahead from a saved model and series history", true,
                cmd_forecast);
    add_command("evaluate", "compare standard vs. rolling prediction across models", true,
                cmd_evaluate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const Command& command : commands) {
            if (!command.sub->parsed()) continue;
            json cfg = config_path.empty() ? json::object() : load_config_file(config_path);
            if (command.sub->count("--seed")) cfg["seed"] = seed;
            if (command.sub->count("--jobs")) cfg["jobs"] = jobs;
            if (command.sub->count("--top")) cfg["top"] = top;
            if (command.sub->count("--out")) cfg["out"] = out_dir;
            if (!input_path.empty()) cfg["input"] = input_path;
            if (command.sub->count("--refit-interval")) {
                cfg["refit_interval"] = refit_interval;
                if (cfg.contains("models")) {
                    for (auto& m : cfg["models"]) m["refit_interval"] = refit_interval;
                }
                if (cfg.contains("model")) cfg["model"]["refit_interval"] = refit_interval;
            }
            if (command.sub->count("--filter-only")) {
                cfg["filter_only"] = true;
                if (cfg.contains("models")) {
                    for (auto& m : cfg["models"]) m["filter_only"] = true;
                }
                if (cfg.contains("model")) cfg["model"]["filter_only"] = true;
            }
            return command.run(cfg);
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
