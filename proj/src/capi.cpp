#include "plugcast/plugcast.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "plugcast/artifact.hpp"
#include "plugcast/error.hpp"
#include "plugcast/eval.hpp"
#include "plugcast/pipeline.hpp"
#include "plugcast/series.hpp"

struct plugcast_series {
    plugcast::PluginSeries series;
};

struct plugcast_model {
    plugcast::ModelArtifact artifact;
};

namespace {

thread_local std::string g_last_error;

plugcast_status set_error(plugcast_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <typename F>
plugcast_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return PLUGCAST_OK;
    } catch (const plugcast::Error& e) {
        return set_error(static_cast<plugcast_status>(static_cast<int>(e.category())), e.what());
    } catch (const nlohmann::json::exception& e) {
        return set_error(PLUGCAST_E_VALIDATION, std::string("invalid JSON: ") + e.what());
    } catch (const std::exception& e) {
        return set_error(PLUGCAST_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(PLUGCAST_E_INTERNAL, "unknown error");
    }
}

plugcast::RunConfig config_from(const char* config_json, const char* overrides_json) {
    using nlohmann::json;
    const json doc = config_json && *config_json ? json::parse(config_json) : json::object();
    const json over = overrides_json && *overrides_json ? json::parse(overrides_json) : json::object();
    return plugcast::parse_run_config(doc, over);
}

}  // namespace

extern "C" {

const char* plugcast_version(void) { return "0.1.0"; }

const char* plugcast_last_error(void) { return g_last_error.c_str(); }

plugcast_status plugcast_run(const char* command, const char* config_json, const char* overrides_json) {
    if (command == nullptr) return set_error(PLUGCAST_E_INVALID_ARGUMENT, "command is null");
    return guarded([&] {
        const plugcast::RunConfig cfg = config_from(config_json, overrides_json);
        plugcast::run_command(command, cfg);
    });
}

plugcast_status plugcast_check_config(const char* config_json, const char* overrides_json) {
    return guarded([&] { (void)config_from(config_json, overrides_json); });
}

plugcast_status plugcast_series_load(const char* csv_path, plugcast_series** out) {
    if (csv_path == nullptr || out == nullptr) return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream in(csv_path, std::ios::binary);
        if (!in) plugcast::fail(plugcast::Errc::io, std::string("cannot open '") + csv_path + "'");
        auto handle = std::make_unique<plugcast_series>();
        handle->series = plugcast::read_series_csv(in);
        *out = handle.release();
    });
}

void plugcast_series_free(plugcast_series* series) { delete series; }

plugcast_status plugcast_series_length(const plugcast_series* series, size_t* out) {
    if (series == nullptr || out == nullptr) return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    *out = series->series.size();
    return PLUGCAST_OK;
}

plugcast_status plugcast_series_data(const plugcast_series* series, int64_t* values, uint8_t* mask, size_t capacity) {
    if (series == nullptr) return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null series");
    const size_t n = std::min(capacity, series->series.size());
    if (values) std::memcpy(values, series->series.values.data(), n * sizeof(int64_t));
    if (mask) std::memcpy(mask, series->series.mask.data(), n);
    return PLUGCAST_OK;
}

plugcast_status plugcast_model_load(const char* json_path, plugcast_model** out) {
    if (json_path == nullptr || out == nullptr) return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::ifstream in(json_path);
        if (!in) plugcast::fail(plugcast::Errc::missing_artifact, std::string("cannot open '") + json_path + "'");
        auto handle = std::make_unique<plugcast_model>();
        handle->artifact = plugcast::artifact_from_json(nlohmann::json::parse(in));
        *out = handle.release();
    });
}

void plugcast_model_free(plugcast_model* model) { delete model; }

plugcast_status plugcast_model_name(const plugcast_model* model, char* buf, size_t capacity) {
    if (model == nullptr || buf == nullptr || capacity == 0)
        return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    const std::string& name = model->artifact.name;
    const size_t n = std::min(capacity - 1, name.size());
    std::memcpy(buf, name.data(), n);
    buf[n] = '\0';
    return PLUGCAST_OK;
}

plugcast_status plugcast_model_predict(const plugcast_model* model, const plugcast_series* series, size_t target_step,
                                       double* out) {
    if (model == nullptr || series == nullptr || out == nullptr)
        return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& s = series->series;
        const auto& spec = model->artifact.spec;
        if (s.resolution != plugcast::Resolution::half_hour)
            plugcast::fail(plugcast::Errc::alignment, "forecasts need a half-hourly series");
        if (target_step >= s.size() || target_step < static_cast<size_t>(spec.max_lag()))
            plugcast::fail(plugcast::Errc::insufficient_history, "target step lacks lag history");
        plugcast::FeatureRow row;
        row.step = target_step;
        row.timestamp = s.time_at(target_step);
        row.target = static_cast<double>(s.values[target_step]);
        row.dow = plugcast::day_of_week(row.timestamp);
        row.month = plugcast::month_of(row.timestamp);
        row.hour = plugcast::hour_of(row.timestamp);
        for (int lag : spec.lags) row.lag_values.push_back(static_cast<double>(s.values[target_step - lag]));
        *out = plugcast::predict(model->artifact, row);
    });
}

plugcast_status plugcast_metrics(const double* predictions, const double* actuals, size_t n, plugcast_metric_set* out) {
    if (out == nullptr || (n > 0 && (predictions == nullptr || actuals == nullptr)))
        return set_error(PLUGCAST_E_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto m = plugcast::metrics({predictions, n}, {actuals, n});
        out->rmse = m.rmse;
        out->mape_pct = m.mape_pct.value_or(std::numeric_limits<double>::quiet_NaN());
        out->mae = m.mae;
        out->n = m.n;
        out->n_skipped_zero_actual = m.n_skipped_zero_actual;
    });
}

}  // extern "C"
