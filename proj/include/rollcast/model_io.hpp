#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rollcast/holt_winters.hpp"
#include "rollcast/sarimax.hpp"
#include "rollcast/version.hpp"

namespace rollcast {

namespace detail {

inline std::vector<double> json_doubles(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw std::invalid_argument("model document: missing array field '" + key + "'");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) {
            throw std::invalid_argument("model document: non-numeric entry in '" + key + "'");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

inline double json_double(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument("model document: missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

inline int json_int(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw std::invalid_argument("model document: missing integer field '" + key + "'");
    }
    return j.at(key).get<int>();
}

inline void check_envelope(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "rollcast-model") {
        throw std::invalid_argument("model document: not a rollcast model file");
    }
    if (!j.contains("model_type") || !j.at("model_type").is_string()) {
        throw std::invalid_argument("model document: missing model_type");
    }
}

}  // namespace detail

/// Serialized model envelope. Doubles are written in their shortest exact
/// decimal form, so parsing the document back reproduces every parameter
/// bit for bit.
inline nlohmann::json to_json(const FittedModel& model) {
    nlohmann::json j;
    j["format"] = "rollcast-model";
    j["library_version"] = ROLLCAST_VERSION;
    j["model_type"] = "sarimax";
    j["order"] = {{"p", model.order.p}, {"d", model.order.d}, {"q", model.order.q}};
    j["seasonal"] = {{"P", model.seasonal.P},
                     {"D", model.seasonal.D},
                     {"Q", model.seasonal.Q},
                     {"S", model.seasonal.S}};
    j["params"] = {{"phi", model.params.phi},
                   {"theta", model.params.theta},
                   {"seasonal_phi", model.params.seasonal_phi},
                   {"seasonal_theta", model.params.seasonal_theta},
                   {"beta", model.params.beta},
                   {"sigma2", model.params.sigma2}};
    j["exog_names"] = model.exog_names;
    j["loglik"] = model.loglik;
    j["aic"] = model.aic;
    j["n_obs_effective"] = model.n_obs_effective;
    j["converged"] = model.converged;
    return j;
}

inline nlohmann::json to_json(const HwFit& fitted) {
    nlohmann::json j;
    j["format"] = "rollcast-model";
    j["library_version"] = ROLLCAST_VERSION;
    j["model_type"] = "holt_winters_additive";
    j["params"] = {{"alpha", fitted.params.alpha},
                   {"beta", fitted.params.beta},
                   {"gamma", fitted.params.gamma},
                   {"m", fitted.params.m}};
    j["state"] = {{"level", fitted.state.level},
                  {"trend", fitted.state.trend},
                  {"seasonals", fitted.state.seasonals},
                  {"t", fitted.state.t}};
    j["sse"] = fitted.sse;
    return j;
}

inline std::string model_type_of(const nlohmann::json& j) {
    detail::check_envelope(j);
    return j.at("model_type").get<std::string>();
}

inline FittedModel sarimax_from_json(const nlohmann::json& j) {
    detail::check_envelope(j);
    if (model_type_of(j) != "sarimax") {
        throw std::invalid_argument("model document: expected model_type sarimax");
    }
    FittedModel model;
    const auto& order = j.at("order");
    model.order.p = detail::json_int(order, "p");
    model.order.d = detail::json_int(order, "d");
    model.order.q = detail::json_int(order, "q");
    const auto& seasonal = j.at("seasonal");
    model.seasonal.P = detail::json_int(seasonal, "P");
    model.seasonal.D = detail::json_int(seasonal, "D");
    model.seasonal.Q = detail::json_int(seasonal, "Q");
    model.seasonal.S = detail::json_int(seasonal, "S");
    validate_orders(model.order, model.seasonal);
    const auto& params = j.at("params");
    model.params.phi = detail::json_doubles(params, "phi");
    model.params.theta = detail::json_doubles(params, "theta");
    model.params.seasonal_phi = detail::json_doubles(params, "seasonal_phi");
    model.params.seasonal_theta = detail::json_doubles(params, "seasonal_theta");
    model.params.beta = detail::json_doubles(params, "beta");
    model.params.sigma2 = detail::json_double(params, "sigma2");
    if (!j.contains("exog_names") || !j.at("exog_names").is_array()) {
        throw std::invalid_argument("model document: missing exog_names");
    }
    for (const auto& name : j.at("exog_names")) {
        model.exog_names.push_back(name.get<std::string>());
    }
    if (model.exog_names.size() != model.params.beta.size()) {
        throw std::invalid_argument("model document: beta and exog_names lengths differ");
    }
    if (model.params.phi.size() != static_cast<std::size_t>(model.order.p) ||
        model.params.theta.size() != static_cast<std::size_t>(model.order.q) ||
        model.params.seasonal_phi.size() != static_cast<std::size_t>(model.seasonal.P) ||
        model.params.seasonal_theta.size() != static_cast<std::size_t>(model.seasonal.Q)) {
        throw std::invalid_argument("model document: coefficient lengths do not match the order");
    }
    model.loglik = detail::json_double(j, "loglik");
    model.aic = detail::json_double(j, "aic");
    model.n_obs_effective = j.value("n_obs_effective", std::int64_t{0});
    model.converged = j.value("converged", false);
    return model;
}

inline HwFit holt_winters_from_json(const nlohmann::json& j) {
    detail::check_envelope(j);
    if (model_type_of(j) != "holt_winters_additive") {
        throw std::invalid_argument("model document: expected model_type holt_winters_additive");
    }
    HwFit fitted;
    const auto& params = j.at("params");
    fitted.params.alpha = detail::json_double(params, "alpha");
    fitted.params.beta = detail::json_double(params, "beta");
    fitted.params.gamma = detail::json_double(params, "gamma");
    fitted.params.m = detail::json_int(params, "m");
    validate_hw_params(fitted.params);
    const auto& state = j.at("state");
    fitted.state.level = detail::json_double(state, "level");
    fitted.state.trend = detail::json_double(state, "trend");
    fitted.state.seasonals = detail::json_doubles(state, "seasonals");
    fitted.state.t = state.value("t", std::int64_t{0});
    if (fitted.state.seasonals.size() != static_cast<std::size_t>(fitted.params.m)) {
        throw std::invalid_argument("model document: seasonal ring does not match the period");
    }
    fitted.sse = j.value("sse", 0.0);
    return fitted;
}

inline void save_model_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": invalid JSON: " + e.what());
    }
    detail::check_envelope(j);
    return j;
}

}  // namespace rollcast
