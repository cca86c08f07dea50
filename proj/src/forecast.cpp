#include "notmf/forecast.hpp"

#include <string>

#include "notmf/errors.hpp"

namespace notmf {

Eigen::MatrixXd forecast_latent(const Eigen::MatrixXd& x, const VarCoefficients& coeffs,
                                int season, Eigen::Index horizon, bool first_order) {
  const Eigen::Index rank = x.rows();
  const Eigen::Index t_len = x.cols();
  const int order = coeffs.order;
  if (coeffs.rank() != rank) {
    throw DimensionError("forecast_latent: coefficient rank " + std::to_string(coeffs.rank()) +
                         " does not match factor rank " + std::to_string(rank));
  }
  if (horizon < 0) {
    throw DimensionError("forecast horizon must be non-negative");
  }
  if (horizon == 0) {
    return Eigen::MatrixXd(rank, 0);
  }
  if (season == 0) {
    if (first_order) {
      throw DimensionError("first-order differencing requires season m >= 1");
    }
    if (t_len < order) {
      throw DimensionError("series too short to forecast: T=" + std::to_string(t_len) +
                           " < d=" + std::to_string(order));
    }
    Eigen::MatrixXd ext(rank, t_len + horizon);
    ext.leftCols(t_len) = x;
    for (Eigen::Index i = 0; i < horizon; ++i) {
      auto next = ext.col(t_len + i);
      next.setZero();
      for (int k = 1; k <= order; ++k) {
        next.noalias() += coeffs.block(k) * ext.col(t_len + i - k);
      }
    }
    return ext.rightCols(horizon);
  }

  const Eigen::Index len_v = t_len - season;
  if (len_v < order + (first_order ? 1 : 0)) {
    throw DimensionError("series too short to forecast: T=" + std::to_string(t_len) +
                         " needs T >= d+m" + std::string(first_order ? "+1" : "") +
                         " with d=" + std::to_string(order) + ", m=" + std::to_string(season));
  }
  Eigen::MatrixXd v(rank, len_v + horizon);
  v.leftCols(len_v) = x.middleCols(season, len_v) - x.middleCols(0, len_v);
  if (!first_order) {
    for (Eigen::Index i = 0; i < horizon; ++i) {
      auto next = v.col(len_v + i);
      next.setZero();
      for (int k = 1; k <= order; ++k) {
        next.noalias() += coeffs.block(k) * v.col(len_v + i - k);
      }
    }
  } else {
    const Eigen::Index len_u = len_v - 1;
    Eigen::MatrixXd u(rank, len_u + horizon);
    u.leftCols(len_u) = v.middleCols(1, len_u) - v.middleCols(0, len_u);
    for (Eigen::Index i = 0; i < horizon; ++i) {
      auto next = u.col(len_u + i);
      next.setZero();
      for (int k = 1; k <= order; ++k) {
        next.noalias() += coeffs.block(k) * u.col(len_u + i - k);
      }
      v.col(len_v + i) = v.col(len_v + i - 1) + u.col(len_u + i);
    }
  }
  Eigen::MatrixXd ext(rank, t_len + horizon);
  ext.leftCols(t_len) = x;
  for (Eigen::Index i = 1; i <= horizon; ++i) {
    ext.col(t_len + i - 1) = ext.col(t_len + i - 1 - season) + v.col(len_v + i - 1);
  }
  return ext.rightCols(horizon);
}

ForecastResult forecast_observations(const FactorModel& model, Eigen::Index horizon) {
  const Eigen::MatrixXd latent = forecast_latent(model.x, model.coeffs, model.config.season,
                                                 horizon, model.config.uses_first_order());
  ForecastResult result;
  result.values = model.w.transpose() * latent;
  if (model.standardized()) {
    for (Eigen::Index i = 0; i < result.values.rows(); ++i) {
      result.values.row(i) =
          result.values.row(i).array() * model.row_scale(i) + model.row_offset(i);
    }
  }
  result.start_index = model.n_steps();
  result.horizon = horizon;
  result.windows = 1;
  return result;
}

ForecastResult rolling_forecast(const MaskedMatrix& y_full, const ModelConfig& raw_config,
                                Eigen::Index train_cols, Eigen::Index horizon,
                                Eigen::Index windows, FactorModel* final_state) {
  const ModelConfig config = raw_config.normalized();
  if (train_cols < 1 || horizon < 1 || windows < 1) {
    throw DimensionError("rolling forecast needs train_cols, horizon and windows >= 1");
  }
  if (train_cols + horizon * windows > y_full.cols()) {
    throw DimensionError("rolling forecast needs " + std::to_string(train_cols + horizon * windows) +
                         " columns (train " + std::to_string(train_cols) + " + " +
                         std::to_string(windows) + " windows of " + std::to_string(horizon) +
                         "), data has " + std::to_string(y_full.cols()));
  }

  FactorModel model = fit(y_full.left_cols(train_cols), config);
  const bool first_order = config.uses_first_order();

  ForecastResult result;
  result.values.resize(y_full.rows(), horizon * windows);
  result.start_index = train_cols;
  result.horizon = horizon;
  result.windows = windows;

  Eigen::MatrixXd latent_forecast;
  for (Eigen::Index s = 1; s <= windows; ++s) {
    if (s >= 2) {
      const Eigen::Index t_now = train_cols + (s - 1) * horizon;
      MaskedMatrix revealed = y_full.left_cols(t_now);
      if (model.standardized()) {
        revealed = apply_standardization(revealed, model.row_offset, model.row_scale);
      }
      const OperatorFamily fam(config.order, config.season, t_now, first_order);
      Eigen::MatrixXd warm(model.x.rows(), t_now);
      warm.leftCols(t_now - horizon) = model.x;
      warm.rightCols(horizon) = latent_forecast;
      model.x = cgtf(revealed, model.w, warm, model.coeffs, fam, config.lambda, config.rho,
                     config.cg_iters, config.cg_tol)
                    .x;
      model.coeffs = update_coefficients(model.x, fam, config.lambda, config.uses_diagonal());
    }
    latent_forecast =
        forecast_latent(model.x, model.coeffs, config.season, horizon, first_order);
    Eigen::MatrixXd observed = model.w.transpose() * latent_forecast;
    if (model.standardized()) {
      for (Eigen::Index i = 0; i < observed.rows(); ++i) {
        observed.row(i) = observed.row(i).array() * model.row_scale(i) + model.row_offset(i);
      }
    }
    result.values.middleCols((s - 1) * horizon, horizon) = observed;
  }
  if (final_state != nullptr) {
    *final_state = std::move(model);
  }
  return result;
}

}  // namespace notmf
