/* C API for the notmf forecasting engine.
 *
 * All functions return notmf_status; NOTMF_OK means success. On failure a
 * human-readable message is available from notmf_last_error() until the next
 * call on the same thread. Objects returned through out-parameters are owned
 * by the caller and released with the matching *_free function.
 *
 * Matrices cross this boundary in row-major order.
 */
#ifndef NOTMF_C_H
#define NOTMF_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NOTMF_API __declspec(dllexport)
#else
#define NOTMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum notmf_status {
  NOTMF_OK = 0,
  NOTMF_ERR_ARGUMENT = 1,  /* null handle / invalid enum value */
  NOTMF_ERR_PARSE = 2,     /* malformed file or archive */
  NOTMF_ERR_DIMENSION = 3, /* shape or configuration error */
  NOTMF_ERR_NUMERICAL = 4  /* singular system, divergence, non-finite values */
} notmf_status;

typedef enum notmf_missing_rule {
  NOTMF_MISSING_NAN = 0,
  NOTMF_MISSING_ZERO = 1,
  NOTMF_MISSING_EXPLICIT = 2
} notmf_missing_rule;

typedef enum notmf_variant {
  NOTMF_VARIANT_NOTMF = 0,
  NOTMF_VARIANT_NOTMF_FIRST = 1,
  NOTMF_VARIANT_TMF = 2,
  NOTMF_VARIANT_TRMF = 3
} notmf_variant;

typedef struct notmf_dataset notmf_dataset;
typedef struct notmf_model notmf_model;
typedef struct notmf_forecast notmf_forecast;
typedef struct notmf_grid_result notmf_grid_result;

typedef struct notmf_config {
  int32_t rank;
  int32_t order;
  int32_t season;
  double lambda;
  double rho;
  int32_t outer_iters;
  int32_t cg_iters;
  double cg_tol;
  int32_t variant; /* notmf_variant */
  uint64_t seed;
  int32_t standardize;
} notmf_config;

typedef struct notmf_synth_spec {
  int64_t n_series;
  int64_t n_steps;
  int32_t true_rank;
  int32_t true_season;
  int32_t true_order;
  double noise_sd;
  double missing_rate;
  uint64_t seed;
} notmf_synth_spec;

NOTMF_API const char* notmf_last_error(void);

NOTMF_API void notmf_config_default(notmf_config* config);
NOTMF_API void notmf_synth_spec_default(notmf_synth_spec* spec);

/* ---- datasets ---------------------------------------------------------- */

NOTMF_API notmf_status notmf_dataset_from_dense(const double* values, const uint8_t* mask,
                                                int64_t n_rows, int64_t n_cols,
                                                int32_t missing_rule, notmf_dataset** out);
NOTMF_API notmf_status notmf_dataset_from_csv(const char* path, int32_t zero_as_missing,
                                              notmf_dataset** out);
NOTMF_API notmf_status notmf_dataset_to_csv(const notmf_dataset* dataset, const char* path);
NOTMF_API notmf_status notmf_dataset_slice_cols(const notmf_dataset* dataset, int64_t start,
                                                int64_t count, notmf_dataset** out);
NOTMF_API int64_t notmf_dataset_rows(const notmf_dataset* dataset);
NOTMF_API int64_t notmf_dataset_cols(const notmf_dataset* dataset);
NOTMF_API int64_t notmf_dataset_observed_count(const notmf_dataset* dataset);
/* Copies the stored values (zeros at unobserved entries) and mask. Either
 * destination may be null. Buffers hold rows*cols entries, row-major. */
NOTMF_API notmf_status notmf_dataset_copy(const notmf_dataset* dataset, double* values_out,
                                          uint8_t* mask_out);
NOTMF_API void notmf_dataset_free(notmf_dataset* dataset);

/* ---- training and forecasting ------------------------------------------ */

NOTMF_API notmf_status notmf_fit(const notmf_dataset* dataset, const notmf_config* config,
                                 notmf_model** out);
NOTMF_API notmf_status notmf_model_save(const notmf_model* model, const char* path);
NOTMF_API notmf_status notmf_model_load(const char* path, notmf_model** out);
NOTMF_API int64_t notmf_model_rank(const notmf_model* model);
NOTMF_API int64_t notmf_model_series(const notmf_model* model);
NOTMF_API int64_t notmf_model_steps(const notmf_model* model);
NOTMF_API notmf_status notmf_model_config(const notmf_model* model, notmf_config* out);
NOTMF_API int64_t notmf_model_trace_length(const notmf_model* model);
NOTMF_API notmf_status notmf_model_trace(const notmf_model* model, double* out);
/* which: 0 = W (R x N), 1 = X (R x T), 2 = A (R x d*R); row-major copy. */
NOTMF_API notmf_status notmf_model_factors(const notmf_model* model, int32_t which, double* out,
                                           int64_t* rows, int64_t* cols);
NOTMF_API void notmf_model_free(notmf_model* model);

NOTMF_API notmf_status notmf_forecast_model(const notmf_model* model, int64_t horizon,
                                            notmf_forecast** out);
NOTMF_API notmf_status notmf_rolling_forecast(const notmf_dataset* dataset,
                                              const notmf_config* config, int64_t train_cols,
                                              int64_t horizon, int64_t windows,
                                              notmf_model** final_model, notmf_forecast** out);
NOTMF_API int64_t notmf_forecast_rows(const notmf_forecast* forecast);
NOTMF_API int64_t notmf_forecast_cols(const notmf_forecast* forecast);
NOTMF_API int64_t notmf_forecast_start_index(const notmf_forecast* forecast);
NOTMF_API int64_t notmf_forecast_horizon(const notmf_forecast* forecast);
NOTMF_API int64_t notmf_forecast_windows(const notmf_forecast* forecast);
NOTMF_API notmf_status notmf_forecast_copy(const notmf_forecast* forecast, double* out);
/* labels may be null; then s1..sN / t<start+1>.. are used. */
NOTMF_API notmf_status notmf_forecast_to_csv(const notmf_forecast* forecast,
                                             const notmf_dataset* labels, const char* path);
NOTMF_API void notmf_forecast_free(notmf_forecast* forecast);

/* ---- evaluation --------------------------------------------------------- */

/* Scores forecast columns against the observed entries of dataset starting
 * at the forecast's start column. mape excludes zero actuals. */
NOTMF_API notmf_status notmf_score_forecast(const notmf_dataset* dataset,
                                            const notmf_forecast* forecast, double* mape_out,
                                            double* rmse_out, int64_t* n_out);

NOTMF_API notmf_status notmf_grid_search(const notmf_dataset* dataset, const notmf_config* base,
                                         int64_t train_cols, int64_t val_cols, int64_t horizon,
                                         const double* lambdas, int64_t n_lambdas,
                                         const double* rhos, int64_t n_rhos,
                                         notmf_grid_result** out);
NOTMF_API int64_t notmf_grid_size(const notmf_grid_result* grid);
NOTMF_API int64_t notmf_grid_best_index(const notmf_grid_result* grid);
NOTMF_API notmf_status notmf_grid_cell(const notmf_grid_result* grid, int64_t index,
                                       double* lambda_out, double* rho_out, double* mape_out,
                                       double* rmse_out);
NOTMF_API void notmf_grid_free(notmf_grid_result* grid);

NOTMF_API notmf_status notmf_synthetic(const notmf_synth_spec* spec, notmf_dataset** full_out,
                                       notmf_dataset** masked_out);

#ifdef __cplusplus
}
#endif

#endif /* NOTMF_C_H */
