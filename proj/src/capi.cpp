#include "notmf/notmf_c.h"

#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "notmf/csv_io.hpp"
#include "notmf/errors.hpp"
#include "notmf/eval.hpp"
#include "notmf/forecast.hpp"
#include "notmf/masked_matrix.hpp"
#include "notmf/model.hpp"
#include "notmf/model_archive.hpp"

struct notmf_dataset {
  notmf::Dataset data;
};

struct notmf_model {
  notmf::FactorModel model;
};

struct notmf_forecast {
  notmf::ForecastResult forecast;
};

struct notmf_grid_result {
  notmf::GridSearchResult result;
};

namespace {

thread_local std::string g_last_error;

notmf_status to_status(notmf::ErrorClass cls) {
  switch (cls) {
    case notmf::ErrorClass::parse: return NOTMF_ERR_PARSE;
    case notmf::ErrorClass::dimension: return NOTMF_ERR_DIMENSION;
    case notmf::ErrorClass::numerical: return NOTMF_ERR_NUMERICAL;
  }
  return NOTMF_ERR_ARGUMENT;
}

template <typename Fn>
notmf_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const notmf::Error& e) {
    g_last_error = e.what();
    return to_status(e.error_class());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NOTMF_ERR_ARGUMENT;
  } catch (...) {
    g_last_error = "unknown error";
    return NOTMF_ERR_ARGUMENT;
  }
}

notmf_status fail_argument(const char* message) {
  g_last_error = message;
  return NOTMF_ERR_ARGUMENT;
}

notmf::ModelConfig to_cpp_config(const notmf_config& c) {
  notmf::ModelConfig config;
  config.rank = c.rank;
  config.order = c.order;
  config.season = c.season;
  config.lambda = c.lambda;
  config.rho = c.rho;
  config.outer_iters = c.outer_iters;
  config.cg_iters = c.cg_iters;
  config.cg_tol = c.cg_tol;
  if (c.variant < 0 || c.variant > 3) {
    throw notmf::DimensionError("unknown variant code " + std::to_string(c.variant));
  }
  config.variant = static_cast<notmf::Variant>(c.variant);
  config.seed = c.seed;
  config.standardize = c.standardize != 0;
  return config;
}

notmf_config to_c_config(const notmf::ModelConfig& config) {
  notmf_config c;
  c.rank = config.rank;
  c.order = config.order;
  c.season = config.season;
  c.lambda = config.lambda;
  c.rho = config.rho;
  c.outer_iters = config.outer_iters;
  c.cg_iters = config.cg_iters;
  c.cg_tol = config.cg_tol;
  c.variant = static_cast<int32_t>(config.variant);
  c.seed = config.seed;
  c.standardize = config.standardize ? 1 : 0;
  return c;
}

}  // namespace

extern "C" {

const char* notmf_last_error(void) { return g_last_error.c_str(); }

void notmf_config_default(notmf_config* config) {
  if (config == nullptr) return;
  *config = to_c_config(notmf::ModelConfig{});
}

void notmf_synth_spec_default(notmf_synth_spec* spec) {
  if (spec == nullptr) return;
  const notmf::SyntheticSpec s;
  spec->n_series = s.n_series;
  spec->n_steps = s.n_steps;
  spec->true_rank = s.true_rank;
  spec->true_season = s.true_season;
  spec->true_order = s.true_order;
  spec->noise_sd = s.noise_sd;
  spec->missing_rate = s.missing_rate;
  spec->seed = s.seed;
}

notmf_status notmf_dataset_from_dense(const double* values, const uint8_t* mask, int64_t n_rows,
                                      int64_t n_cols, int32_t missing_rule, notmf_dataset** out) {
  if (values == nullptr || out == nullptr) return fail_argument("null argument");
  if (n_rows < 1 || n_cols < 1) return fail_argument("n_rows and n_cols must be >= 1");
  return guarded([&]() {
    Eigen::MatrixXd m(n_rows, n_cols);
    for (int64_t r = 0; r < n_rows; ++r) {
      for (int64_t c = 0; c < n_cols; ++c) {
        m(r, c) = values[r * n_cols + c];
      }
    }
    notmf::MaskedMatrix masked = [&]() {
      switch (missing_rule) {
        case NOTMF_MISSING_NAN:
          return notmf::MaskedMatrix::from_dense(m, notmf::MissingRule::nan_is_missing);
        case NOTMF_MISSING_ZERO:
          return notmf::MaskedMatrix::from_dense(m, notmf::MissingRule::zero_is_missing);
        case NOTMF_MISSING_EXPLICIT: {
          if (mask == nullptr) {
            throw notmf::DimensionError("explicit missing rule requires a mask");
          }
          notmf::MaskArray ma(n_rows, n_cols);
          for (int64_t r = 0; r < n_rows; ++r) {
            for (int64_t c = 0; c < n_cols; ++c) {
              ma(r, c) = mask[r * n_cols + c] != 0;
            }
          }
          return notmf::MaskedMatrix(std::move(m), std::move(ma));
        }
        default:
          throw notmf::DimensionError("unknown missing rule code " +
                                      std::to_string(missing_rule));
      }
    }();
    *out = new notmf_dataset{notmf::Dataset(std::move(masked),
                                            notmf::default_row_labels(n_rows),
                                            notmf::default_col_labels(n_cols))};
    return NOTMF_OK;
  });
}

notmf_status notmf_dataset_from_csv(const char* path, int32_t zero_as_missing,
                                    notmf_dataset** out) {
  if (path == nullptr || out == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    *out = new notmf_dataset{notmf::load_csv(path, zero_as_missing != 0)};
    return NOTMF_OK;
  });
}

notmf_status notmf_dataset_to_csv(const notmf_dataset* dataset, const char* path) {
  if (dataset == nullptr || path == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    notmf::save_csv(dataset->data, path);
    return NOTMF_OK;
  });
}

notmf_status notmf_dataset_slice_cols(const notmf_dataset* dataset, int64_t start, int64_t count,
                                      notmf_dataset** out) {
  if (dataset == nullptr || out == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    const notmf::MaskedMatrix& m = dataset->data.matrix;
    if (start < 0 || count < 1 || start + count > m.cols()) {
      throw notmf::DimensionError("slice [" + std::to_string(start) + ", " +
                                  std::to_string(start + count) + ") out of range for " +
                                  std::to_string(m.cols()) + " columns");
    }
    notmf::MaskedMatrix sliced(m.values().middleCols(start, count),
                               m.mask().middleCols(start, count));
    std::vector<std::string> cols(dataset->data.col_labels.begin() + start,
                                  dataset->data.col_labels.begin() + start + count);
    *out = new notmf_dataset{
        notmf::Dataset(std::move(sliced), dataset->data.row_labels, std::move(cols))};
    return NOTMF_OK;
  });
}

int64_t notmf_dataset_rows(const notmf_dataset* dataset) {
  return dataset == nullptr ? -1 : dataset->data.matrix.rows();
}

int64_t notmf_dataset_cols(const notmf_dataset* dataset) {
  return dataset == nullptr ? -1 : dataset->data.matrix.cols();
}

int64_t notmf_dataset_observed_count(const notmf_dataset* dataset) {
  return dataset == nullptr ? -1 : dataset->data.matrix.observed_count();
}

notmf_status notmf_dataset_copy(const notmf_dataset* dataset, double* values_out,
                                uint8_t* mask_out) {
  if (dataset == nullptr) return fail_argument("null dataset");
  const notmf::MaskedMatrix& m = dataset->data.matrix;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (values_out != nullptr) values_out[r * m.cols() + c] = m.values()(r, c);
      if (mask_out != nullptr) mask_out[r * m.cols() + c] = m.mask()(r, c) ? 1 : 0;
    }
  }
  return NOTMF_OK;
}

void notmf_dataset_free(notmf_dataset* dataset) { delete dataset; }

notmf_status notmf_fit(const notmf_dataset* dataset, const notmf_config* config,
                       notmf_model** out) {
  if (dataset == nullptr || config == nullptr || out == nullptr) {
    return fail_argument("null argument");
  }
  return guarded([&]() {
    *out = new notmf_model{notmf::fit(dataset->data.matrix, to_cpp_config(*config))};
    return NOTMF_OK;
  });
}

notmf_status notmf_model_save(const notmf_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    notmf::save_model(model->model, path);
    return NOTMF_OK;
  });
}

notmf_status notmf_model_load(const char* path, notmf_model** out) {
  if (path == nullptr || out == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    *out = new notmf_model{notmf::load_model(path)};
    return NOTMF_OK;
  });
}

int64_t notmf_model_rank(const notmf_model* model) {
  return model == nullptr ? -1 : model->model.rank();
}

int64_t notmf_model_series(const notmf_model* model) {
  return model == nullptr ? -1 : model->model.n_series();
}

int64_t notmf_model_steps(const notmf_model* model) {
  return model == nullptr ? -1 : model->model.n_steps();
}

notmf_status notmf_model_config(const notmf_model* model, notmf_config* out) {
  if (model == nullptr || out == nullptr) return fail_argument("null argument");
  *out = to_c_config(model->model.config);
  return NOTMF_OK;
}

int64_t notmf_model_trace_length(const notmf_model* model) {
  return model == nullptr ? -1 : static_cast<int64_t>(model->model.objective_trace.size());
}

notmf_status notmf_model_trace(const notmf_model* model, double* out) {
  if (model == nullptr || out == nullptr) return fail_argument("null argument");
  for (std::size_t i = 0; i < model->model.objective_trace.size(); ++i) {
    out[i] = model->model.objective_trace[i];
  }
  return NOTMF_OK;
}

notmf_status notmf_model_factors(const notmf_model* model, int32_t which, double* out,
                                 int64_t* rows, int64_t* cols) {
  if (model == nullptr) return fail_argument("null model");
  const Eigen::MatrixXd* m = nullptr;
  switch (which) {
    case 0: m = &model->model.w; break;
    case 1: m = &model->model.x; break;
    case 2: m = &model->model.coeffs.stacked; break;
    default: return fail_argument("factor selector must be 0 (W), 1 (X) or 2 (A)");
  }
  if (rows != nullptr) *rows = m->rows();
  if (cols != nullptr) *cols = m->cols();
  if (out != nullptr) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        out[r * m->cols() + c] = (*m)(r, c);
      }
    }
  }
  return NOTMF_OK;
}

void notmf_model_free(notmf_model* model) { delete model; }

notmf_status notmf_forecast_model(const notmf_model* model, int64_t horizon,
                                  notmf_forecast** out) {
  if (model == nullptr || out == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    *out = new notmf_forecast{notmf::forecast_observations(model->model, horizon)};
    return NOTMF_OK;
  });
}

notmf_status notmf_rolling_forecast(const notmf_dataset* dataset, const notmf_config* config,
                                    int64_t train_cols, int64_t horizon, int64_t windows,
                                    notmf_model** final_model, notmf_forecast** out) {
  if (dataset == nullptr || config == nullptr || out == nullptr) {
    return fail_argument("null argument");
  }
  return guarded([&]() {
    notmf::FactorModel state;
    notmf::ForecastResult fc =
        notmf::rolling_forecast(dataset->data.matrix, to_cpp_config(*config), train_cols, horizon,
                                windows, final_model != nullptr ? &state : nullptr);
    if (final_model != nullptr) {
      *final_model = new notmf_model{std::move(state)};
    }
    *out = new notmf_forecast{std::move(fc)};
    return NOTMF_OK;
  });
}

int64_t notmf_forecast_rows(const notmf_forecast* forecast) {
  return forecast == nullptr ? -1 : forecast->forecast.values.rows();
}

int64_t notmf_forecast_cols(const notmf_forecast* forecast) {
  return forecast == nullptr ? -1 : forecast->forecast.values.cols();
}

int64_t notmf_forecast_start_index(const notmf_forecast* forecast) {
  return forecast == nullptr ? -1 : forecast->forecast.start_index;
}

int64_t notmf_forecast_horizon(const notmf_forecast* forecast) {
  return forecast == nullptr ? -1 : forecast->forecast.horizon;
}

int64_t notmf_forecast_windows(const notmf_forecast* forecast) {
  return forecast == nullptr ? -1 : forecast->forecast.windows;
}

notmf_status notmf_forecast_copy(const notmf_forecast* forecast, double* out) {
  if (forecast == nullptr || out == nullptr) return fail_argument("null argument");
  const Eigen::MatrixXd& v = forecast->forecast.values;
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      out[r * v.cols() + c] = v(r, c);
    }
  }
  return NOTMF_OK;
}

notmf_status notmf_forecast_to_csv(const notmf_forecast* forecast, const notmf_dataset* labels,
                                   const char* path) {
  if (forecast == nullptr || path == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    const Eigen::MatrixXd& v = forecast->forecast.values;
    const Eigen::Index start = forecast->forecast.start_index;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    if (labels != nullptr) {
      if (labels->data.matrix.rows() != v.rows()) {
        throw notmf::DimensionError("label dataset has " +
                                    std::to_string(labels->data.matrix.rows()) +
                                    " series, forecast has " + std::to_string(v.rows()));
      }
      row_labels = labels->data.row_labels;
      const auto& source_cols = labels->data.col_labels;
      for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const Eigen::Index global = start + c;
        if (global < static_cast<Eigen::Index>(source_cols.size())) {
          col_labels.push_back(source_cols[static_cast<std::size_t>(global)]);
        } else {
          col_labels.push_back("t" + std::to_string(global + 1));
        }
      }
    } else {
      row_labels = notmf::default_row_labels(v.rows());
      col_labels = notmf::default_col_labels(v.cols(), start);
    }
    notmf::Dataset out_data(
        notmf::MaskedMatrix(v, notmf::MaskArray::Constant(v.rows(), v.cols(), true)),
        std::move(row_labels), std::move(col_labels));
    notmf::save_csv(out_data, path);
    return NOTMF_OK;
  });
}

void notmf_forecast_free(notmf_forecast* forecast) { delete forecast; }

notmf_status notmf_score_forecast(const notmf_dataset* dataset, const notmf_forecast* forecast,
                                  double* mape_out, double* rmse_out, int64_t* n_out) {
  if (dataset == nullptr || forecast == nullptr) return fail_argument("null argument");
  return guarded([&]() {
    const notmf::MaskedMatrix& m = dataset->data.matrix;
    const Eigen::MatrixXd& v = forecast->forecast.values;
    const Eigen::Index start = forecast->forecast.start_index;
    if (m.rows() != v.rows()) {
      throw notmf::DimensionError("dataset and forecast series counts differ");
    }
    if (start < 0 || start + v.cols() > m.cols()) {
      throw notmf::DimensionError("forecast columns [" + std::to_string(start) + ", " +
                                  std::to_string(start + v.cols()) +
                                  ") not covered by the dataset");
    }
    const Eigen::MatrixXd actual = m.values().middleCols(start, v.cols());
    const notmf::MaskArray mask = m.mask().middleCols(start, v.cols());
    std::int64_t n = 0;
    const double mape_value = notmf::mape(actual, mask, v);
    const double rmse_value = notmf::rmse(actual, mask, v, &n);
    if (mape_out != nullptr) *mape_out = mape_value;
    if (rmse_out != nullptr) *rmse_out = rmse_value;
    if (n_out != nullptr) *n_out = n;
    return NOTMF_OK;
  });
}

notmf_status notmf_grid_search(const notmf_dataset* dataset, const notmf_config* base,
                               int64_t train_cols, int64_t val_cols, int64_t horizon,
                               const double* lambdas, int64_t n_lambdas, const double* rhos,
                               int64_t n_rhos, notmf_grid_result** out) {
  if (dataset == nullptr || base == nullptr || lambdas == nullptr || rhos == nullptr ||
      out == nullptr) {
    return fail_argument("null argument");
  }
  if (n_lambdas < 1 || n_rhos < 1) return fail_argument("grids must be non-empty");
  return guarded([&]() {
    *out = new notmf_grid_result{notmf::grid_search(
        dataset->data.matrix, train_cols, val_cols, to_cpp_config(*base),
        std::span<const double>(lambdas, static_cast<std::size_t>(n_lambdas)),
        std::span<const double>(rhos, static_cast<std::size_t>(n_rhos)), horizon)};
    return NOTMF_OK;
  });
}

int64_t notmf_grid_size(const notmf_grid_result* grid) {
  return grid == nullptr ? -1 : static_cast<int64_t>(grid->result.table.size());
}

int64_t notmf_grid_best_index(const notmf_grid_result* grid) {
  return grid == nullptr ? -1 : static_cast<int64_t>(grid->result.best_index);
}

notmf_status notmf_grid_cell(const notmf_grid_result* grid, int64_t index, double* lambda_out,
                             double* rho_out, double* mape_out, double* rmse_out) {
  if (grid == nullptr) return fail_argument("null grid");
  if (index < 0 || index >= static_cast<int64_t>(grid->result.table.size())) {
    return fail_argument("grid index out of range");
  }
  const notmf::GridCell& cell = grid->result.table[static_cast<std::size_t>(index)];
  if (lambda_out != nullptr) *lambda_out = cell.lambda;
  if (rho_out != nullptr) *rho_out = cell.rho;
  if (mape_out != nullptr) *mape_out = cell.mape;
  if (rmse_out != nullptr) *rmse_out = cell.rmse;
  return NOTMF_OK;
}

void notmf_grid_free(notmf_grid_result* grid) { delete grid; }

notmf_status notmf_synthetic(const notmf_synth_spec* spec, notmf_dataset** full_out,
                             notmf_dataset** masked_out) {
  if (spec == nullptr || full_out == nullptr || masked_out == nullptr) {
    return fail_argument("null argument");
  }
  return guarded([&]() {
    notmf::SyntheticSpec s;
    s.n_series = spec->n_series;
    s.n_steps = spec->n_steps;
    s.true_rank = spec->true_rank;
    s.true_season = spec->true_season;
    s.true_order = spec->true_order;
    s.noise_sd = spec->noise_sd;
    s.missing_rate = spec->missing_rate;
    s.seed = spec->seed;
    notmf::SyntheticData data = notmf::make_synthetic(s);
    auto rows = notmf::default_row_labels(data.full.rows());
    auto cols = notmf::default_col_labels(data.full.cols());
    *full_out = new notmf_dataset{notmf::Dataset(std::move(data.full), rows, cols)};
    *masked_out = new notmf_dataset{notmf::Dataset(std::move(data.masked), rows, cols)};
    return NOTMF_OK;
  });
}

}  // extern "C"
