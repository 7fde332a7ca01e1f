#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rollcast/random.hpp"
#include "rollcast/sarimax.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

rollcast::TimeSeries make_series(std::vector<double> values) {
    rollcast::TimeSeries s;
    s.start = 1704067200;  // 2024-01-01T00:00:00Z
    s.interval_seconds = 300;
    s.values = std::move(values);
    return s;
}

std::vector<double> simulate_ar1(double phi, std::size_t n, std::uint64_t seed) {
    rollcast::NormalSampler rng(seed);
    double y = rng.normal() / std::sqrt(1.0 - phi * phi);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.push_back(y);
        y = phi * y + rng.normal();
    }
    return out;
}

std::vector<double> simulate_ma1(double theta, std::size_t n, std::uint64_t seed) {
    rollcast::NormalSampler rng(seed);
    std::vector<double> out;
    out.reserve(n);
    double prev = rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        const double e = rng.normal();
        out.push_back(e + theta * prev);
        prev = e;
    }
    return out;
}

// Seasonal AR driven by the product polynomial (1 - phi*L)(1 - sphi*L^S).
std::vector<double> simulate_sar(double phi, double sphi, int season, std::size_t n,
                                 std::uint64_t seed) {
    rollcast::NormalSampler rng(seed);
    const std::size_t burn = 600;
    std::vector<double> buf(n + burn, 0.0);
    for (std::size_t t = 0; t < buf.size(); ++t) {
        double y = rng.normal();
        if (t >= 1) y += phi * buf[t - 1];
        if (t >= static_cast<std::size_t>(season)) y += sphi * buf[t - season];
        if (t >= static_cast<std::size_t>(season) + 1) y -= phi * sphi * buf[t - season - 1];
        buf[t] = y;
    }
    return {buf.begin() + static_cast<std::ptrdiff_t>(burn), buf.end()};
}

}  // namespace

TEST_CASE("order validation enforces the supported ranges") {
    using rollcast::ModelOrder;
    using rollcast::SeasonalOrder;
    REQUIRE_NOTHROW(rollcast::validate_orders({2, 1, 3}, {}));
    REQUIRE_NOTHROW(rollcast::validate_orders({0, 0, 0}, {1, 1, 1, 288}));
    REQUIRE_THROWS_AS(rollcast::validate_orders({31, 0, 0}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::validate_orders({0, 0, 31}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::validate_orders({0, 3, 0}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::validate_orders({-1, 0, 0}, {}), std::invalid_argument);
    // Seasonal terms require a season length of at least two.
    REQUIRE_THROWS_AS(rollcast::validate_orders({0, 0, 0}, {1, 0, 0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::validate_orders({0, 0, 0}, {0, 1, 0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::validate_orders({0, 0, 0}, {1, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("differencing drops leading observations") {
    const std::vector<double> y = {1.0, 3.0, 6.0, 10.0};
    REQUIRE(rollcast::difference(y, 1, 0, 0) == std::vector<double>{2.0, 3.0, 4.0});
}

TEST_CASE("differencing a linear ramp yields a constant") {
    std::vector<double> ramp;
    for (int t = 0; t < 20; ++t) ramp.push_back(0.5 * t + 3.0);
    const auto d = rollcast::difference(ramp, 1, 0, 0);
    REQUIRE(d.size() == 19);
    for (double v : d) REQUIRE_THAT(v, WithinAbs(0.5, 1e-12));
}

TEST_CASE("seasonal differencing removes an exact periodic pattern") {
    const double pattern[4] = {5.0, 7.0, 6.0, 4.0};
    std::vector<double> series;
    for (int t = 0; t < 24; ++t) series.push_back(pattern[t % 4]);
    const auto d = rollcast::difference(series, 0, 1, 4);
    REQUIRE(d.size() == 20);
    for (double v : d) REQUIRE(v == 0.0);
}

TEST_CASE("differencing a timestamped series advances its start") {
    auto s = make_series({1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0});
    const auto d1 = rollcast::difference(s, 1, 0, 0);
    REQUIRE(d1.start == s.start + 300);
    REQUIRE(d1.size() == 7);
    const auto ds = rollcast::difference(s, 1, 1, 3);
    REQUIRE(ds.start == s.start + 4 * 300);
    REQUIRE(ds.size() == 4);
}

TEST_CASE("differencing validates its span") {
    const std::vector<double> two = {1.0, 2.0};
    const std::vector<double> three = {1.0, 2.0, 3.0};
    REQUIRE_THROWS_AS(rollcast::difference(two, 2, 0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::difference(three, 0, 1, 4), std::invalid_argument);
    REQUIRE_NOTHROW(rollcast::difference(three, 2, 0, 0));
}

TEST_CASE("integration undoes first differencing to high precision") {
    rollcast::NormalSampler rng(12);
    std::vector<double> y;
    double acc = 30.0;  // Gbps-scale level
    for (int t = 0; t < 2000; ++t) {
        acc += 0.2 * rng.normal();
        y.push_back(acc);
    }
    const auto w = rollcast::difference(y, 1, 0, 0);
    const std::vector<double> head(y.begin(), y.begin() + 1);
    const auto rebuilt = rollcast::integrate(w, head, 1, 0, 0);
    REQUIRE(rebuilt.size() == w.size());
    for (std::size_t t = 0; t < rebuilt.size(); ++t) {
        REQUIRE_THAT(rebuilt[t], WithinAbs(y[t + 1], 1e-12));
    }
}

TEST_CASE("integration undoes combined regular and seasonal differencing") {
    rollcast::NormalSampler rng(13);
    std::vector<double> y;
    for (int t = 0; t < 600; ++t) {
        y.push_back(20.0 + 0.01 * t + 3.0 * std::sin(2.0 * M_PI * t / 12.0) + rng.normal());
    }
    const auto w = rollcast::difference(y, 1, 1, 12);
    const std::size_t span = 13;  // d*1 + D*S leading values consumed
    REQUIRE(w.size() == y.size() - span);
    const std::vector<double> head(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(span));
    const auto rebuilt = rollcast::integrate(w, head, 1, 1, 12);
    for (std::size_t t = 0; t < rebuilt.size(); ++t) {
        REQUIRE_THAT(rebuilt[t], WithinAbs(y[t + span], 1e-8));
    }
}

TEST_CASE("fit recovers an autoregressive coefficient") {
    const auto data = simulate_ar1(0.7, 2000, 404);
    const auto model = rollcast::fit(make_series(data), {1, 0, 0});
    REQUIRE(model.converged);
    REQUIRE(model.params.phi.size() == 1);
    REQUIRE(model.params.phi[0] > 0.63);
    REQUIRE(model.params.phi[0] < 0.77);
    REQUIRE(model.params.sigma2 > 0.9);
    REQUIRE(model.params.sigma2 < 1.1);
    REQUIRE(model.n_obs_effective == 2000);
}

TEST_CASE("fit recovers a moving-average coefficient") {
    const auto data = simulate_ma1(0.6, 2000, 505);
    const auto model = rollcast::fit(make_series(data), {0, 0, 1});
    REQUIRE(model.converged);
    REQUIRE_THAT(model.params.theta[0], WithinAbs(0.6, 0.1));
    REQUIRE_THAT(model.params.sigma2, WithinAbs(1.0, 0.1));
}

TEST_CASE("fit recovers seasonal structure") {
    const auto data = simulate_sar(0.5, 0.4, 12, 3000, 606);
    const auto model = rollcast::fit(make_series(data), {1, 0, 0}, {1, 0, 0, 12});
    REQUIRE(model.converged);
    REQUIRE_THAT(model.params.phi[0], WithinAbs(0.5, 0.1));
    REQUIRE_THAT(model.params.seasonal_phi[0], WithinAbs(0.4, 0.1));
}

TEST_CASE("fit estimates a regression coefficient alongside the noise model") {
    rollcast::NormalSampler rng(707);
    const std::size_t n = 1500;
    const auto noise = simulate_ar1(0.5, n, 708);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t t = 0; t < n; ++t) {
        x.push_back(rng.normal());
        y.push_back(2.0 * x.back() + noise[t]);
    }
    rollcast::ExogMatrix exog;
    exog.column_names = {"load"};
    exog.rows.resize(static_cast<Eigen::Index>(n), 1);
    for (std::size_t t = 0; t < n; ++t) exog.rows(static_cast<Eigen::Index>(t), 0) = x[t];

    const auto model = rollcast::fit(make_series(y), {1, 0, 0}, {}, &exog);
    REQUIRE(model.converged);
    // Intercept defaults on for undifferenced fits, so beta = [const, load].
    REQUIRE(model.exog_names == std::vector<std::string>{"const", "load"});
    REQUIRE_THAT(model.params.beta[1], WithinAbs(2.0, 0.1));
    REQUIRE_THAT(model.params.phi[0], WithinAbs(0.5, 0.1));
}

TEST_CASE("fits are equivariant under rescaling the series") {
    const auto data = simulate_ar1(0.6, 1200, 909);
    std::vector<double> scaled = data;
    for (double& v : scaled) v *= 10.0;

    const auto base = rollcast::fit(make_series(data), {1, 0, 1});
    const auto big = rollcast::fit(make_series(scaled), {1, 0, 1});
    REQUIRE(base.converged);
    REQUIRE(big.converged);
    REQUIRE_THAT(big.params.phi[0], WithinAbs(base.params.phi[0], 1e-4));
    REQUIRE_THAT(big.params.theta[0], WithinAbs(base.params.theta[0], 1e-4));
    REQUIRE_THAT(big.params.sigma2, WithinRel(100.0 * base.params.sigma2, 1e-3));
    const double n_eff = static_cast<double>(base.n_obs_effective);
    REQUIRE_THAT(big.loglik, WithinAbs(base.loglik - n_eff * std::log(10.0), 1e-3));
}

TEST_CASE("information criterion identity holds exactly") {
    const auto data = simulate_ar1(0.5, 400, 111);
    const auto model = rollcast::fit(make_series(data), {1, 0, 1});
    // k = p + q + P + Q + #beta + 1 for the innovation variance.
    const double k = 1 + 1 + 0 + 0 + static_cast<double>(model.params.beta.size()) + 1;
    REQUIRE(model.aic == 2.0 * k - 2.0 * model.loglik);
}

TEST_CASE("intercept defaults follow the differencing order") {
    const auto data = simulate_ar1(0.4, 300, 222);
    const auto level = rollcast::fit(make_series(data), {1, 0, 0});
    REQUIRE(level.has_intercept());

    std::vector<double> walk;
    double acc = 0.0;
    for (double v : data) {
        acc += v;
        walk.push_back(acc);
    }
    const auto differenced = rollcast::fit(make_series(walk), {1, 1, 0});
    REQUIRE_FALSE(differenced.has_intercept());

    rollcast::FitOptions opts;
    opts.intercept = rollcast::InterceptMode::always;
    const auto forced = rollcast::fit(make_series(walk), {1, 1, 0}, {}, nullptr, opts);
    REQUIRE(forced.has_intercept());
    opts.intercept = rollcast::InterceptMode::never;
    const auto bare = rollcast::fit(make_series(data), {1, 0, 0}, {}, nullptr, opts);
    REQUIRE_FALSE(bare.has_intercept());
}

TEST_CASE("fit rejects short, degenerate, or malformed input") {
    const auto short_series = make_series(std::vector<double>(14, 1.0));
    REQUIRE_THROWS_MATCHES(rollcast::fit(short_series, {5, 0, 0}), std::invalid_argument,
                           MessageMatches(ContainsSubstring("too short")));

    auto bad = make_series(simulate_ar1(0.3, 100, 1));
    bad.values[50] = std::nan("");
    REQUIRE_THROWS_AS(rollcast::fit(bad, {1, 0, 0}), std::invalid_argument);

    const auto data = make_series(simulate_ar1(0.3, 100, 2));
    rollcast::ExogMatrix exog;
    exog.column_names = {"const"};
    exog.rows = Eigen::MatrixXd::Ones(100, 1);
    REQUIRE_THROWS_MATCHES(rollcast::fit(data, {1, 0, 0}, {}, &exog), std::invalid_argument,
                           MessageMatches(ContainsSubstring("reserved")));

    exog.column_names = {"flat"};
    REQUIRE_THROWS_MATCHES(rollcast::fit(data, {1, 1, 0}, {}, &exog), std::invalid_argument,
                           MessageMatches(ContainsSubstring("flat")));

    exog.rows = Eigen::MatrixXd::Ones(60, 1);
    REQUIRE_THROWS_AS(rollcast::fit(data, {1, 0, 0}, {}, &exog), std::invalid_argument);
}

TEST_CASE("random-walk forecasts repeat the last observation") {
    rollcast::FittedModel model;
    model.order = {0, 1, 0};
    model.params.sigma2 = 1.0;
    model.converged = true;

    rollcast::SarimaxForecaster forecaster(model, {3.0, 4.1, 5.2});
    const auto ahead = forecaster.predict(4);
    REQUIRE(ahead.size() == 4);
    for (double v : ahead) REQUIRE(v == 5.2);
    REQUIRE(forecaster.predict(0).empty());
}

TEST_CASE("autoregressive forecasts decay toward the mean") {
    rollcast::FittedModel model;
    model.order = {1, 0, 0};
    model.params.phi = {0.5};
    model.params.sigma2 = 1.0;
    model.converged = true;

    rollcast::SarimaxForecaster forecaster(model, {1.0, 3.0, 4.0});
    const auto ahead = forecaster.predict(3);
    REQUIRE(ahead == std::vector<double>{2.0, 1.0, 0.5});
}

TEST_CASE("regression effects shift forecasts by exactly their coefficient") {
    rollcast::FittedModel model;
    model.order = {1, 0, 0};
    model.params.phi = {0.5};
    model.params.beta = {2.0};
    model.params.sigma2 = 1.0;
    model.exog_names = {"x"};
    model.converged = true;

    // With a zero residual history the noise forecast is exactly zero, so the
    // x=1 vs x=0 forecast gap is the coefficient itself, bit for bit.
    const std::vector<double> history(6, 0.0);
    Eigen::MatrixXd hist_x = Eigen::MatrixXd::Zero(6, 1);
    rollcast::SarimaxForecaster forecaster(model, history, hist_x);

    const Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(3, 1);
    const Eigen::MatrixXd bumped = Eigen::MatrixXd::Ones(3, 1);
    const auto base = forecaster.predict(3, flat);
    const auto moved = forecaster.predict(3, bumped);
    REQUIRE(base.size() == 3);
    for (std::size_t h = 0; h < 3; ++h) {
        REQUIRE(base[h] == 0.0);
        REQUIRE(moved[h] - base[h] == 2.0);
    }

    // The same linearity holds over a non-trivial history up to roundoff.
    const std::vector<double> busy = {1.2, 1.9, 2.4, 2.0, 1.7, 2.2};
    rollcast::SarimaxForecaster other(model, busy, hist_x);
    const auto b2 = other.predict(3, flat);
    const auto m2 = other.predict(3, bumped);
    for (std::size_t h = 0; h < 3; ++h) {
        REQUIRE_THAT(m2[h] - b2[h], WithinAbs(2.0, 1e-12));
    }
}

TEST_CASE("forecasting a horizon in two stages matches one pass") {
    // Feeding a model its own predictions advances the filter state without
    // new information, so forecasting h1 steps, observing them, and
    // forecasting h2 more must agree with a single h1+h2 forecast.
    rollcast::NormalSampler rng(777);
    std::vector<double> y;
    double acc = 40.0;
    for (int t = 0; t < 500; ++t) {
        acc += 0.1 * rng.normal();
        y.push_back(acc);
    }
    const auto model = rollcast::fit(make_series(y), {1, 1, 1});
    REQUIRE(model.converged);

    const auto full = rollcast::forecast(model, make_series(y), 8);

    rollcast::SarimaxForecaster forecaster(model, y);
    const auto first = forecaster.predict(3);
    for (double v : first) forecaster.observe(v);
    const auto rest = forecaster.predict(5);
    for (std::size_t h = 0; h < 3; ++h) REQUIRE_THAT(first[h], WithinAbs(full[h], 1e-8));
    for (std::size_t h = 0; h < 5; ++h) REQUIRE_THAT(rest[h], WithinAbs(full[h + 3], 1e-8));
}

TEST_CASE("incremental observation matches a from-scratch forecaster") {
    const auto data = simulate_ar1(0.6, 300, 314);
    auto series = make_series({data.begin(), data.begin() + 250});
    const auto model = rollcast::fit(series, {1, 0, 1});
    REQUIRE(model.converged);

    rollcast::SarimaxForecaster incremental(model, series.values);
    for (std::size_t t = 250; t < 260; ++t) incremental.observe(data[t]);

    const std::vector<double> extended(data.begin(), data.begin() + 260);
    rollcast::SarimaxForecaster fresh(model, extended);
    REQUIRE_THAT(incremental.predict_one(), WithinAbs(fresh.predict_one(), 1e-12));
    const auto a = incremental.predict(5);
    const auto b = fresh.predict(5);
    for (std::size_t h = 0; h < 5; ++h) REQUIRE_THAT(a[h], WithinAbs(b[h], 1e-12));
}

TEST_CASE("differenced-model forecasts chain through integration") {
    // Fit a (1,1,0) model and check the forecast continues from the last level.
    rollcast::NormalSampler rng(555);
    std::vector<double> y;
    double acc = 50.0;
    std::vector<double> shocks = simulate_ar1(0.5, 800, 556);
    for (double s : shocks) {
        acc += 0.05 * s;
        y.push_back(acc);
    }
    const auto model = rollcast::fit(make_series(y), {1, 1, 0});
    REQUIRE(model.converged);
    const auto ahead = rollcast::forecast(model, make_series(y), 10);
    REQUIRE(ahead.size() == 10);
    // Forecast levels stay near the terminal level rather than the series mean.
    for (double v : ahead) REQUIRE_THAT(v, WithinAbs(y.back(), 1.0));
}

TEST_CASE("forecasting validates exogenous inputs") {
    rollcast::FittedModel model;
    model.order = {1, 0, 0};
    model.params.phi = {0.5};
    model.params.beta = {0.0};
    model.params.sigma2 = 1.0;
    model.exog_names = {"x"};
    model.converged = true;

    const auto history = make_series({1.0, 2.0, 1.5, 1.8, 1.2, 1.6});
    rollcast::ExogMatrix hist;
    hist.column_names = {"x"};
    hist.rows = Eigen::MatrixXd::Zero(6, 1);
    rollcast::ExogMatrix future;
    future.column_names = {"x"};
    future.rows = Eigen::MatrixXd::Zero(3, 1);

    REQUIRE_NOTHROW(rollcast::forecast(model, history, 3, &future, &hist));
    // Missing either matrix, a wrong row count, or a renamed column is an error.
    REQUIRE_THROWS_AS(rollcast::forecast(model, history, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::forecast(model, history, 3, &future, nullptr),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(rollcast::forecast(model, history, 4, &future, &hist),
                      std::invalid_argument);
    rollcast::ExogMatrix renamed = future;
    renamed.column_names = {"y"};
    REQUIRE_THROWS_AS(rollcast::forecast(model, history, 3, &renamed, &hist),
                      std::invalid_argument);
}

TEST_CASE("forecaster validates its construction inputs") {
    rollcast::FittedModel model;
    model.order = {0, 0, 0};
    model.params.sigma2 = 1.0;
    model.params.beta = {1.0, 2.0};
    model.exog_names = {"const"};  // beta has two entries but one name
    REQUIRE_THROWS_AS(rollcast::SarimaxForecaster(model, {1.0, 2.0}), std::invalid_argument);
}
