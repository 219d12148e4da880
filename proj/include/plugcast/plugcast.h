/* C interface to the plugcast library. All functions return a status code;
 * on failure, plugcast_last_error() describes the most recent error on the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef PLUGCAST_H
#define PLUGCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PLUGCAST_BUILDING)
#    define PLUGCAST_API __declspec(dllexport)
#  else
#    define PLUGCAST_API __declspec(dllimport)
#  endif
#else
#  define PLUGCAST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1-3 double as CLI exit codes. */
typedef enum plugcast_status {
    PLUGCAST_OK = 0,
    PLUGCAST_E_VALIDATION = 1,
    PLUGCAST_E_DATA = 2,
    PLUGCAST_E_TRAINING = 3,
    PLUGCAST_E_INVALID_ARGUMENT = 4,
    PLUGCAST_E_INTERNAL = 5
} plugcast_status;

typedef struct plugcast_series plugcast_series;
typedef struct plugcast_model plugcast_model;

typedef struct plugcast_metric_set {
    double rmse;
    double mape_pct; /* NaN when every actual is zero */
    double mae;
    size_t n;
    size_t n_skipped_zero_actual;
} plugcast_metric_set;

PLUGCAST_API const char* plugcast_version(void);
PLUGCAST_API const char* plugcast_last_error(void);

/* Runs a pipeline subcommand ("synth", "build", "analyze", "train",
 * "evaluate", "report"). config_json is the run configuration document,
 * overrides_json an optional object of command-line overrides (may be NULL). */
PLUGCAST_API plugcast_status plugcast_run(const char* command, const char* config_json,
                                          const char* overrides_json);

/* Validates a configuration without running anything. */
PLUGCAST_API plugcast_status plugcast_check_config(const char* config_json, const char* overrides_json);

PLUGCAST_API plugcast_status plugcast_series_load(const char* csv_path, plugcast_series** out);
PLUGCAST_API void plugcast_series_free(plugcast_series* series);
PLUGCAST_API plugcast_status plugcast_series_length(const plugcast_series* series, size_t* out);
/* Copies min(capacity, length) values and mask flags; either buffer may be NULL. */
PLUGCAST_API plugcast_status plugcast_series_data(const plugcast_series* series, int64_t* values,
                                                  uint8_t* mask, size_t capacity);

PLUGCAST_API plugcast_status plugcast_model_load(const char* json_path, plugcast_model** out);
PLUGCAST_API void plugcast_model_free(plugcast_model* model);
/* Writes the model name into buf (NUL-terminated, truncated to capacity). */
PLUGCAST_API plugcast_status plugcast_model_name(const plugcast_model* model, char* buf, size_t capacity);
/* Day-ahead forecast for the series step `target_step`, built from the
 * step's lags and calendar fields. */
PLUGCAST_API plugcast_status plugcast_model_predict(const plugcast_model* model, const plugcast_series* series,
                                                    size_t target_step, double* out);

PLUGCAST_API plugcast_status plugcast_metrics(const double* predictions, const double* actuals, size_t n,
                                              plugcast_metric_set* out);

#ifdef __cplusplus
}
#endif

#endif /* PLUGCAST_H */
