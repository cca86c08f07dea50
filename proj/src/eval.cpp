#include "notmf/eval.hpp"

#include <cmath>
#include <string>

#include "notmf/errors.hpp"
#include "notmf/forecast.hpp"
#include "notmf/rng.hpp"

namespace notmf {

namespace {

void check_metric_shapes(const Eigen::MatrixXd& actual, const MaskArray& mask,
                         const Eigen::MatrixXd& predicted) {
  if (actual.rows() != mask.rows() || actual.cols() != mask.cols() ||
      actual.rows() != predicted.rows() || actual.cols() != predicted.cols()) {
    throw DimensionError("metric inputs must share one shape");
  }
}

}  // namespace

double mape(const Eigen::MatrixXd& actual, const MaskArray& mask, const Eigen::MatrixXd& predicted,
            std::int64_t* n_scored) {
  check_metric_shapes(actual, mask, predicted);
  double sum = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index t = 0; t < actual.cols(); ++t) {
    for (Eigen::Index i = 0; i < actual.rows(); ++i) {
      if (!mask(i, t) || actual(i, t) == 0.0) continue;
      sum += std::abs(actual(i, t) - predicted(i, t)) / std::abs(actual(i, t));
      ++n;
    }
  }
  if (n == 0) {
    throw DimensionError("mape: no scoreable entries (observed and nonzero)");
  }
  if (n_scored != nullptr) *n_scored = n;
  return sum / static_cast<double>(n) * 100.0;
}

double rmse(const Eigen::MatrixXd& actual, const MaskArray& mask, const Eigen::MatrixXd& predicted,
            std::int64_t* n_scored) {
  check_metric_shapes(actual, mask, predicted);
  double sum = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index t = 0; t < actual.cols(); ++t) {
    for (Eigen::Index i = 0; i < actual.rows(); ++i) {
      if (!mask(i, t)) continue;
      const double e = actual(i, t) - predicted(i, t);
      sum += e * e;
      ++n;
    }
  }
  if (n == 0) {
    throw DimensionError("rmse: no observed entries to score");
  }
  if (n_scored != nullptr) *n_scored = n;
  return std::sqrt(sum / static_cast<double>(n));
}

MetricReport score(const MaskedMatrix& actual, const Eigen::MatrixXd& predicted) {
  MetricReport report;
  report.mape = mape(actual.values(), actual.mask(), predicted);
  report.rmse = rmse(actual.values(), actual.mask(), predicted, &report.n_evaluated);
  return report;
}

GridSearchResult grid_search(const MaskedMatrix& y, Eigen::Index train_cols,
                             Eigen::Index val_cols, const ModelConfig& base,
                             std::span<const double> lambdas, std::span<const double> rhos,
                             Eigen::Index horizon) {
  if (lambdas.empty() || rhos.empty()) {
    throw DimensionError("grid search needs at least one lambda and one rho");
  }
  if (train_cols < 1 || val_cols < 1 || train_cols + val_cols > y.cols()) {
    throw DimensionError("grid search split exceeds the data: train " +
                         std::to_string(train_cols) + " + validation " + std::to_string(val_cols) +
                         " vs " + std::to_string(y.cols()) + " columns");
  }
  if (horizon < 1 || val_cols % horizon != 0) {
    throw DimensionError("validation columns (" + std::to_string(val_cols) +
                         ") must be a positive multiple of the horizon (" +
                         std::to_string(horizon) + ")");
  }
  const Eigen::Index windows = val_cols / horizon;
  const MaskedMatrix sub = y.left_cols(train_cols + val_cols);
  const Eigen::MatrixXd actual = y.values().middleCols(train_cols, val_cols);
  const MaskArray mask = y.mask().middleCols(train_cols, val_cols);

  GridSearchResult result;
  result.table.reserve(lambdas.size() * rhos.size());
  for (double lam : lambdas) {
    for (double rho : rhos) {
      ModelConfig config = base;
      config.lambda = lam;
      config.rho = rho;
      const ForecastResult fc = rolling_forecast(sub, config, train_cols, horizon, windows);
      GridCell cell;
      cell.lambda = lam;
      cell.rho = rho;
      cell.mape = mape(actual, mask, fc.values);
      cell.rmse = rmse(actual, mask, fc.values);
      result.table.push_back(cell);
    }
  }
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const GridCell& a = result.table[i];
    const GridCell& b = result.table[result.best_index];
    const bool better = a.mape < b.mape ||
                        (a.mape == b.mape &&
                         (a.rmse < b.rmse ||
                          (a.rmse == b.rmse &&
                           (a.lambda < b.lambda || (a.lambda == b.lambda && a.rho < b.rho)))));
    if (better) result.best_index = i;
  }
  return result;
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  const Eigen::Index n = spec.n_series;
  const Eigen::Index t_len = spec.n_steps;
  const int rank = spec.true_rank;
  const int m = spec.true_season;
  const int d = spec.true_order;
  if (n < 1 || t_len < 1) {
    throw DimensionError("synthetic data needs N >= 1 and T >= 1");
  }
  if (rank < 1 || rank > n) {
    throw DimensionError("synthetic rank must satisfy 1 <= R <= N");
  }
  if (m < 1 || d < 1) {
    throw DimensionError("synthetic generator needs season >= 1 and order >= 1");
  }
  if (t_len <= d + 2 * m) {
    throw DimensionError("synthetic generator needs T > d + 2m: T=" + std::to_string(t_len) +
                         ", d=" + std::to_string(d) + ", m=" + std::to_string(m));
  }
  if (spec.noise_sd < 0.0 || spec.missing_rate < 0.0 || spec.missing_rate > 1.0) {
    throw DimensionError("synthetic generator needs noise_sd >= 0 and missing_rate in [0, 1]");
  }

  Rng rng(spec.seed);
  constexpr double kTau = 6.283185307179586476925286766559;

  // Loadings: baseline factor gets positive-mean weights so every series sits
  // on a positive level; the rest are zero-mean.
  Eigen::MatrixXd w_true(rank, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w_true(0, i) = 1.5 + 0.2 * rng.normal();
    for (int r = 1; r < rank; ++r) {
      w_true(r, i) = 0.6 * rng.normal();
    }
  }

  // Per-factor seasonal pattern (fundamental + one harmonic) and trend drift.
  std::vector<double> amp1(rank, 0.0), phase1(rank, 0.0), amp2(rank, 0.0), phase2(rank, 0.0),
      drift(rank, 0.0);
  for (int r = 1; r < rank; ++r) {
    amp1[r] = rng.uniform(0.8, 1.6);
    phase1[r] = rng.uniform(0.0, kTau);
    amp2[r] = rng.uniform(0.2, 0.6);
    phase2[r] = rng.uniform(0.0, kTau);
    drift[r] = rng.uniform(-0.15, 0.15);  // per-season step, i.e. a linear trend
  }

  // Stable VAR(d) coefficients for the differenced-space residual of the
  // non-baseline factors. Rescaling block k by gamma^k scales the companion
  // eigenvalues by gamma.
  const int n_var = rank - 1;
  Eigen::MatrixXd var_coeffs(n_var, static_cast<Eigen::Index>(d) * n_var);
  if (n_var > 0) {
    for (Eigen::Index c = 0; c < var_coeffs.cols(); ++c) {
      for (Eigen::Index r = 0; r < var_coeffs.rows(); ++r) {
        var_coeffs(r, c) = rng.normal() * 0.5 / std::sqrt(static_cast<double>(d * n_var));
      }
    }
    Eigen::MatrixXd companion =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d) * n_var, static_cast<Eigen::Index>(d) * n_var);
    companion.topRows(n_var) = var_coeffs;
    if (d > 1) {
      companion.bottomLeftCorner(static_cast<Eigen::Index>(d - 1) * n_var,
                                 static_cast<Eigen::Index>(d - 1) * n_var)
          .setIdentity();
    }
    const double radius = companion.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 1e-12) {
      const double gamma = 0.75 / radius;
      for (int k = 1; k <= d; ++k) {
        var_coeffs.middleCols(static_cast<Eigen::Index>(k - 1) * n_var, n_var) *=
            std::pow(gamma, k);
      }
    }
  }

  // Differenced-space residual v_t (baseline row stays exactly zero).
  const Eigen::Index len_v = t_len - m;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(rank, len_v);
  const double innovation_sd = 0.15;
  for (Eigen::Index j = 0; j < len_v; ++j) {
    for (int r = 1; r < rank; ++r) {
      double value = drift[r] + innovation_sd * rng.normal();
      for (int k = 1; k <= d && j - k >= 0; ++k) {
        value += var_coeffs.row(r - 1)
                     .segment(static_cast<Eigen::Index>(k - 1) * n_var, n_var)
                     .dot(v.col(j - k).tail(n_var));
      }
      v(r, j) = value;
    }
  }

  // Seasonal integration: the first m columns carry the sinusoid pattern, the
  // rest follow x_t = x_{t-m} + v_{t-m}.
  Eigen::MatrixXd x_true(rank, t_len);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    if (t < m) {
      x_true(0, t) = 8.0;
      for (int r = 1; r < rank; ++r) {
        const double phase = kTau * static_cast<double>(t) / static_cast<double>(m);
        x_true(r, t) = amp1[r] * std::sin(phase + phase1[r]) +
                       amp2[r] * std::sin(2.0 * phase + phase2[r]);
      }
    } else {
      x_true.col(t) = x_true.col(t - m) + v.col(t - m);
    }
  }

  Eigen::MatrixXd values = w_true.transpose() * x_true;
  if (spec.noise_sd > 0.0) {
    for (Eigen::Index t = 0; t < t_len; ++t) {
      for (Eigen::Index i = 0; i < n; ++i) {
        values(i, t) += spec.noise_sd * rng.normal();
      }
    }
  }

  MaskArray observed(n, t_len);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      observed(i, t) = rng.uniform() > spec.missing_rate;
    }
  }

  return SyntheticData(MaskedMatrix(values, MaskArray::Constant(n, t_len, true)),
                       MaskedMatrix(values, observed), std::move(w_true), std::move(x_true));
}

}  // namespace notmf
