#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rollcast/calendar.hpp"
#include "rollcast/holt_winters.hpp"
#include "rollcast/random.hpp"
#include "rollcast/sarimax.hpp"
#include "rollcast/series.hpp"

namespace rollcast {

enum class ModelType { arima, sarima, sarimax, holt_winters };

inline const char* to_string(ModelType type) {
    switch (type) {
        case ModelType::arima: return "arima";
        case ModelType::sarima: return "sarima";
        case ModelType::sarimax: return "sarimax";
        case ModelType::holt_winters: return "holt_winters";
    }
    return "arima";
}

/// One model entry in a comparison run. For the ARIMA family `order` and
/// `seasonal` configure the fit; Holt-Winters uses only `hw_season_length`.
/// `refit_interval` and `filter_only` apply to rolling prediction:
/// filter_only keeps the initially fitted parameters for the whole rollout
/// and only advances the model state with each true observation.
struct PredictorSpec {
    ModelType model_type = ModelType::arima;
    ModelOrder order;
    SeasonalOrder seasonal;
    int hw_season_length = 288;
    bool use_exog = false;
    int refit_interval = 1;
    bool filter_only = false;
    // Wall-clock budget for each mid-rollout re-estimation (ARIMA family
    // only). A refit that runs out of budget is treated like any other
    // failed refit: the previous parameters carry forward with a warning.
    double refit_time_budget_seconds = std::numeric_limits<double>::infinity();
    std::string label;  // defaults to the model_type name

    std::string name() const { return label.empty() ? to_string(model_type) : label; }
};

inline void validate_spec(const PredictorSpec& spec) {
    if (spec.use_exog && spec.model_type != ModelType::sarimax) {
        throw std::invalid_argument("predictor '" + spec.name() +
                                    "': exogenous features are only valid for sarimax");
    }
    if (spec.refit_interval < 1) {
        throw std::invalid_argument("predictor '" + spec.name() +
                                    "': refit interval must be at least 1");
    }
    if (std::isnan(spec.refit_time_budget_seconds) || spec.refit_time_budget_seconds <= 0.0) {
        throw std::invalid_argument("predictor '" + spec.name() +
                                    "': refit time budget must be positive");
    }
    switch (spec.model_type) {
        case ModelType::arima:
            if (spec.seasonal.S != 0) {
                throw std::invalid_argument("predictor '" + spec.name() +
                                            "': arima does not take a seasonal order");
            }
            break;
        case ModelType::sarima:
            if (spec.seasonal.S < 2) {
                throw std::invalid_argument("predictor '" + spec.name() +
                                            "': sarima needs a seasonal period of at least 2");
            }
            break;
        case ModelType::sarimax:
            break;
        case ModelType::holt_winters:
            if (spec.hw_season_length < 2) {
                throw std::invalid_argument("predictor '" + spec.name() +
                                            "': seasonal period must be at least 2");
            }
            break;
    }
    validate_orders(spec.order, spec.seasonal);
}

/// Mean absolute percentage error, in percent. Exact zeros in the observed
/// sequence are rejected rather than fudged; callers may pre-filter.
inline double mape(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size() || predicted.empty()) {
        throw std::invalid_argument("mape: sequences must have equal, nonzero length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (observed[i] == 0.0) {
            throw std::invalid_argument("mape: observed value at index " + std::to_string(i) +
                                        " is zero");
        }
        acc += std::abs(predicted[i] - observed[i]) / std::abs(observed[i]);
    }
    return acc / static_cast<double>(observed.size()) * 100.0;
}

/// A per-step prediction sequence plus any warnings accumulated while
/// producing it (e.g. refits that had to be skipped).
struct PredictionTrace {
    std::vector<double> values;
    std::vector<std::string> warnings;
};

namespace detail {

inline FittedModel fit_for_spec(const PredictorSpec& spec, const TimeSeries& train,
                                const ExogMatrix* exog_train, std::uint64_t seed,
                                const std::optional<SarimaxParams>& warm_start,
                                std::vector<std::string>* warnings,
                                double time_budget_seconds = std::numeric_limits<double>::infinity()) {
    FitOptions options;
    options.seed = seed;
    options.warm_start = warm_start;
    if (std::isfinite(time_budget_seconds)) {
        options.deadline = std::chrono::steady_clock::now() +
                           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(time_budget_seconds));
    }
    const ExogMatrix* exog = spec.use_exog ? exog_train : nullptr;
    const FittedModel model = fit(train, spec.order, spec.seasonal, exog, options);
    if (!std::isfinite(model.loglik)) {
        throw std::runtime_error("predictor '" + spec.name() + "': fit failed outright");
    }
    if (!model.converged && warnings) {
        warnings->push_back("fit for '" + spec.name() + "' stopped short of convergence");
    }
    return model;
}

}  // namespace detail

/// Fit once on the training window, then forecast the whole test horizon
/// multi-step ahead (h = 1..n_test) from the training terminal state.
inline PredictionTrace standard_prediction(const PredictorSpec& spec, const TimeSeries& train,
                                           const TimeSeries& test,
                                           const ExogMatrix* exog_train = nullptr,
                                           const ExogMatrix* exog_test = nullptr,
                                           std::uint64_t seed = 0) {
    validate_spec(spec);
    if (test.size() == 0) throw std::invalid_argument("standard_prediction: empty test window");
    PredictionTrace trace;
    if (spec.model_type == ModelType::holt_winters) {
        const HwFit fitted = fit(train, spec.hw_season_length);
        trace.values = forecast(fitted.state, test.size(), fitted.params);
        return trace;
    }
    if (spec.use_exog && (exog_train == nullptr || exog_test == nullptr)) {
        throw std::invalid_argument("standard_prediction: predictor '" + spec.name() +
                                    "' needs exogenous matrices for train and test");
    }
    const FittedModel model =
        detail::fit_for_spec(spec, train, exog_train, seed, std::nullopt, &trace.warnings);
    trace.values = forecast(model, train, test.size(), spec.use_exog ? exog_test : nullptr,
                            spec.use_exog ? exog_train : nullptr);
    return trace;
}

/// Rolling-origin one-step prediction: forecast one step, then append the
/// true observation, advancing the model state every step and re-estimating
/// the parameters (warm-started) every refit_interval steps. A refit that
/// fails or does not converge is skipped with a warning — the previous
/// parameters carry forward and the rollout never aborts. Predictions at
/// index i depend only on data before index i.
inline PredictionTrace rolling_prediction(const PredictorSpec& spec, const TimeSeries& train,
                                          const TimeSeries& test,
                                          const ExogMatrix* exog_train = nullptr,
                                          const ExogMatrix* exog_test = nullptr,
                                          std::uint64_t seed = 0) {
    validate_spec(spec);
    if (test.size() == 0) throw std::invalid_argument("rolling_prediction: empty test window");
    const std::size_t n_test = test.size();
    PredictionTrace trace;
    trace.values.reserve(n_test);

    if (spec.model_type == ModelType::holt_winters) {
        HwFit fitted = fit(train, spec.hw_season_length);
        HwState state = fitted.state;
        std::vector<double> history = train.values;
        for (std::size_t i = 0; i < n_test; ++i) {
            trace.values.push_back(forecast(state, 1, fitted.params)[0]);
            state = smooth_step(state, test.values[i], fitted.params);
            history.push_back(test.values[i]);
            const bool refit_due = !spec.filter_only &&
                                   (i + 1) % static_cast<std::size_t>(spec.refit_interval) == 0 &&
                                   i + 1 < n_test;
            if (refit_due) {
                try {
                    fitted = refine(history, fitted.params);
                    state = fitted.state;
                } catch (const std::exception& e) {
                    trace.warnings.push_back("refit after test step " + std::to_string(i) +
                                             " skipped: " + e.what());
                }
            }
        }
        return trace;
    }

    if (spec.use_exog && (exog_train == nullptr || exog_test == nullptr)) {
        throw std::invalid_argument("rolling_prediction: predictor '" + spec.name() +
                                    "' needs exogenous matrices for train and test");
    }
    const FittedModel initial =
        detail::fit_for_spec(spec, train, exog_train, seed, std::nullopt, &trace.warnings);
    SarimaxForecaster forecaster(initial, train.values,
                                 spec.use_exog ? exog_train->rows : Eigen::MatrixXd());
    for (std::size_t i = 0; i < n_test; ++i) {
        Eigen::RowVectorXd exog_row;
        if (spec.use_exog) exog_row = exog_test->rows.row(static_cast<Eigen::Index>(i));
        trace.values.push_back(forecaster.predict_one(exog_row));
        forecaster.observe(test.values[i], exog_row);
        const bool refit_due = !spec.filter_only &&
                               (i + 1) % static_cast<std::size_t>(spec.refit_interval) == 0 &&
                               i + 1 < n_test;
        if (refit_due) {
            TimeSeries history;
            history.start = train.start;
            history.interval_seconds = train.interval_seconds;
            history.values = forecaster.values();
            ExogMatrix history_exog;
            if (spec.use_exog) {
                history_exog.column_names = exog_train->column_names;
                history_exog.rows = forecaster.user_exog();
            }
            try {
                std::vector<std::string> ignored;
                const FittedModel refitted = detail::fit_for_spec(
                    spec, history, spec.use_exog ? &history_exog : nullptr,
                    mix_seed(seed, static_cast<std::uint64_t>(i) + 1), forecaster.model().params,
                    &ignored, spec.refit_time_budget_seconds);
                if (refitted.converged) {
                    forecaster.set_model(refitted);
                } else {
                    trace.warnings.push_back("refit after test step " + std::to_string(i) +
                                             " did not converge; keeping previous parameters");
                }
            } catch (const std::exception& e) {
                trace.warnings.push_back("refit after test step " + std::to_string(i) +
                                         " skipped: " + e.what());
            }
        }
    }
    return trace;
}

struct EvalRow {
    std::string model;
    double mape_standard_pct = std::numeric_limits<double>::quiet_NaN();
    double mape_rolling_pct = std::numeric_limits<double>::quiet_NaN();
    PredictionTrace standard_trace;
    PredictionTrace rolling_trace;
    bool ok = false;
    std::string error;  // set when this model failed entirely
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

/// Runs both prediction modes for every model and assembles the comparison
/// report. A model that fails gets its error recorded in its row; the rest of
/// the report is still produced.
inline EvalReport compare(const std::vector<PredictorSpec>& models, const TimeSeries& train,
                          const TimeSeries& test, const ExogMatrix* exog_train = nullptr,
                          const ExogMatrix* exog_test = nullptr, std::uint64_t seed = 0) {
    if (models.empty()) throw std::invalid_argument("compare: empty model list");
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            if (models[i].name() == models[j].name()) {
                throw std::invalid_argument("compare: duplicate model name '" + models[i].name() +
                                            "'");
            }
        }
    }
    EvalReport report;
    report.rows.reserve(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        const PredictorSpec& spec = models[i];
        EvalRow row;
        row.model = spec.name();
        const std::uint64_t model_seed = mix_seed(seed, 0xe7a1u + i);
        try {
            row.standard_trace =
                standard_prediction(spec, train, test, exog_train, exog_test, model_seed);
            row.rolling_trace =
                rolling_prediction(spec, train, test, exog_train, exog_test, model_seed);
            row.mape_standard_pct = mape(row.standard_trace.values, test.values);
            row.mape_rolling_pct = mape(row.rolling_trace.values, test.values);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

/// Summary table: one row per model. Failed models leave their MAPE cells
/// empty (the error text lives in the run manifest, not here).
inline void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "model,mape_standard_pct,mape_rolling_pct\n";
    char buf[64];
    for (const EvalRow& row : report.rows) {
        out << row.model << ',';
        if (row.ok) {
            std::snprintf(buf, sizeof(buf), "%.6f", row.mape_standard_pct);
            out << buf;
        }
        out << ',';
        if (row.ok) {
            std::snprintf(buf, sizeof(buf), "%.6f", row.mape_rolling_pct);
            out << buf;
        }
        out << '\n';
    }
}

/// Plot-ready per-step trace: timestamped actual vs predicted values.
inline void write_trace_csv(std::ostream& out, const TimeSeries& test,
                            const std::vector<double>& predicted) {
    if (predicted.size() != test.size()) {
        throw std::invalid_argument("write_trace_csv: trace length does not match test length");
    }
    out << "timestamp,actual_gbps,predicted_gbps\n";
    char buf[64];
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        out << format_iso8601(test.timestamp_at(i)) << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", test.values[i]);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.9g", predicted[i]);
        out << buf << '\n';
    }
}

}  // namespace rollcast
