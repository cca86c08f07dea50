#ifndef NOTMF_FORECAST_HPP
#define NOTMF_FORECAST_HPP

#include <Eigen/Dense>

#include "notmf/masked_matrix.hpp"
#include "notmf/model.hpp"
#include "notmf/solvers.hpp"

namespace notmf {

struct ForecastResult {
  Eigen::MatrixXd values;      // N x (horizon * windows)
  Eigen::Index start_index = 0;  // global column index of the first forecast step
  Eigen::Index horizon = 0;
  Eigen::Index windows = 1;
};

// Extrapolates the temporal factors horizon steps past the end of x.
// Season m >= 1: the VAR runs on the seasonal differences v_t = x_{t+m} - x_t
// and the forecasts integrate back through x_hat_{T+i} = x_{T+i-m} + v_hat,
// consuming previously forecasted columns once T+i-m exceeds T. Season 0 runs
// the VAR on the raw factor columns. With first_order the VAR runs on the
// once-more-differenced u_t = v_t - v_{t-1} and integrates twice.
Eigen::MatrixXd forecast_latent(const Eigen::MatrixXd& x, const VarCoefficients& coeffs,
                                int season, Eigen::Index horizon, bool first_order);

// W^T applied to the latent forecasts, inverse-standardized if the model was
// fit with standardization.
ForecastResult forecast_observations(const FactorModel& model, Eigen::Index horizon);

// Rolling scheme: fit once on the first train_cols columns, then per window
// reveal horizon new columns, re-solve the temporal factors by conjugate
// gradient (warm-started with the previous factors extended by their own
// forecasts), refresh the VAR coefficients, and forecast the next horizon.
// The spatial dictionary from the initial fit is never updated. When
// final_state is non-null it receives the model with the last window's
// temporal factors and coefficients.
ForecastResult rolling_forecast(const MaskedMatrix& y_full, const ModelConfig& config,
                                Eigen::Index train_cols, Eigen::Index horizon,
                                Eigen::Index windows, FactorModel* final_state = nullptr);

}  // namespace notmf

#endif
