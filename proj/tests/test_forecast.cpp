#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "notmf/errors.hpp"
#include "notmf/eval.hpp"
#include "notmf/forecast.hpp"
#include "notmf/model.hpp"
#include "notmf/rng.hpp"
#include "oracles.hpp"

using notmf::MaskArray;
using notmf::MaskedMatrix;
using notmf::ModelConfig;
using notmf::VarCoefficients;

namespace {

// Straight-line reimplementation of the forecasting recursion on explicit
// column arrays; the library version is checked against it on random inputs.
Eigen::MatrixXd reference_forecast(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a_stacked,
                                   int order, int season, Eigen::Index horizon,
                                   bool first_order) {
  const Eigen::Index rank = x.rows();
  const Eigen::Index t_len = x.cols();
  auto var_step = [&](const std::vector<Eigen::VectorXd>& hist) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(rank);
    for (int k = 1; k <= order; ++k) {
      out += a_stacked.block(0, (k - 1) * rank, rank, rank) *
             hist[hist.size() - static_cast<std::size_t>(k)];
    }
    return out;
  };
  std::vector<Eigen::VectorXd> xs;
  for (Eigen::Index t = 0; t < t_len; ++t) xs.push_back(x.col(t));
  if (season == 0) {
    for (Eigen::Index i = 0; i < horizon; ++i) xs.push_back(var_step(xs));
  } else {
    std::vector<Eigen::VectorXd> vs;
    for (Eigen::Index t = 0; t + season < t_len; ++t) vs.push_back(x.col(t + season) - x.col(t));
    if (!first_order) {
      for (Eigen::Index i = 0; i < horizon; ++i) vs.push_back(var_step(vs));
    } else {
      std::vector<Eigen::VectorXd> us;
      for (std::size_t j = 1; j < vs.size(); ++j) us.push_back(vs[j] - vs[j - 1]);
      for (Eigen::Index i = 0; i < horizon; ++i) {
        us.push_back(var_step(us));
        vs.push_back(vs.back() + us.back());
      }
    }
    for (Eigen::Index i = 0; i < horizon; ++i) {
      const std::size_t idx = xs.size();
      xs.push_back(xs[idx - static_cast<std::size_t>(season)] +
                   vs[idx - static_cast<std::size_t>(season)]);
    }
  }
  Eigen::MatrixXd out(rank, horizon);
  for (Eigen::Index i = 0; i < horizon; ++i) {
    out.col(i) = xs[static_cast<std::size_t>(t_len + i)];
  }
  return out;
}

}  // namespace

TEST_CASE("hand-traced scalar forecasts") {
  Eigen::MatrixXd x(1, 2);
  x << 1.0, 3.0;
  VarCoefficients zero = VarCoefficients::zero(1, 1);
  Eigen::MatrixXd f = notmf::forecast_latent(x, zero, 1, 1, false);
  CHECK(f(0, 0) == doctest::Approx(3.0).epsilon(1e-15));

  VarCoefficients unit = VarCoefficients::zero(1, 1);
  unit.stacked(0, 0) = 1.0;
  f = notmf::forecast_latent(x, unit, 1, 1, false);
  CHECK(f(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("constant series are a fixed point for any coefficients") {
  notmf::Rng rng(307);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 9);
  x.row(0).setConstant(4.0);
  x.row(1).setConstant(-1.5);
  VarCoefficients coeffs;
  coeffs.stacked = oracles::random_matrix(rng, 2, 4);
  coeffs.order = 2;
  for (const int m : {1, 3}) {
    const Eigen::MatrixXd f = notmf::forecast_latent(x, coeffs, m, 5, false);
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      CHECK(f(0, c) == doctest::Approx(4.0).epsilon(1e-14));
      CHECK(f(1, c) == doctest::Approx(-1.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("zero horizon is the identity, negative horizon rejected") {
  Eigen::MatrixXd x(1, 5);
  x << 1, 2, 3, 4, 5;
  const VarCoefficients coeffs = VarCoefficients::zero(1, 1);
  CHECK(notmf::forecast_latent(x, coeffs, 1, 0, false).cols() == 0);
  CHECK_THROWS_AS(notmf::forecast_latent(x, coeffs, 1, -1, false), notmf::DimensionError);
}

TEST_CASE("forecasting a too-short series is rejected") {
  Eigen::MatrixXd x(1, 2);
  x << 1.0, 2.0;
  const VarCoefficients coeffs = VarCoefficients::zero(1, 1);
  CHECK_THROWS_AS(notmf::forecast_latent(x, coeffs, 2, 1, false), notmf::DimensionError);
  CHECK_THROWS_AS(notmf::forecast_latent(x, coeffs, 1, 1, true), notmf::DimensionError);
  Eigen::MatrixXd empty_history(1, 0);
  CHECK_THROWS_AS(notmf::forecast_latent(empty_history, coeffs, 0, 1, false),
                  notmf::DimensionError);
}

TEST_CASE("noiseless differenced VAR latents forecast exactly") {
  notmf::Rng rng(311);
  const int d = 2, m = 5;
  const Eigen::Index rank = 2;
  const Eigen::MatrixXd a_true = oracles::stable_var_coefficients(rng, rank, d, 0.9);
  const Eigen::MatrixXd v = oracles::var_series(rng, a_true, d, 40, 0.0);
  const Eigen::MatrixXd x_full =
      oracles::integrate_seasonal(oracles::random_matrix(rng, rank, m), v, m);
  VarCoefficients coeffs;
  coeffs.stacked = a_true;
  coeffs.order = d;

  // forecast from a truncated prefix; within and beyond one season
  for (const Eigen::Index horizon : {Eigen::Index(3), Eigen::Index(m), Eigen::Index(2 * m)}) {
    const Eigen::Index t_len = x_full.cols() - horizon;
    const Eigen::MatrixXd f =
        notmf::forecast_latent(x_full.leftCols(t_len), coeffs, m, horizon, false);
    const Eigen::MatrixXd truth = x_full.middleCols(t_len, horizon);
    CHECK((f - truth).norm() <= 1e-8 * (1.0 + truth.norm()));
  }
}

TEST_CASE("noiseless doubly differenced latents forecast exactly with first order") {
  notmf::Rng rng(313);
  const int d = 1, m = 4;
  const Eigen::Index rank = 2;
  const Eigen::MatrixXd a_true = oracles::stable_var_coefficients(rng, rank, d, 0.85);
  const Eigen::MatrixXd u = oracles::var_series(rng, a_true, d, 50, 0.0);
  // integrate u into v (first order, cumulative sum), then v into x (seasonal)
  Eigen::MatrixXd v(rank, u.cols() + 1);
  v.col(0) = oracles::random_matrix(rng, rank, 1).col(0);
  for (Eigen::Index j = 0; j < u.cols(); ++j) v.col(j + 1) = v.col(j) + u.col(j);
  const Eigen::MatrixXd x_full =
      oracles::integrate_seasonal(oracles::random_matrix(rng, rank, m), v, m);
  VarCoefficients coeffs;
  coeffs.stacked = a_true;
  coeffs.order = d;

  const Eigen::Index horizon = m;
  const Eigen::Index t_len = x_full.cols() - horizon;
  const Eigen::MatrixXd f =
      notmf::forecast_latent(x_full.leftCols(t_len), coeffs, m, horizon, true);
  const Eigen::MatrixXd truth = x_full.middleCols(t_len, horizon);
  CHECK((f - truth).norm() <= 1e-8 * (1.0 + truth.norm()));

  // differencing the forecasted columns reproduces the forecasted v sequence
  Eigen::MatrixXd ext(rank, x_full.cols());
  ext.leftCols(t_len) = x_full.leftCols(t_len);
  ext.rightCols(horizon) = f;
  for (Eigen::Index i = 0; i < horizon; ++i) {
    const Eigen::VectorXd v_hat = ext.col(t_len + i) - ext.col(t_len + i - m);
    const Eigen::VectorXd v_truth = v.col(t_len + i - m);
    CHECK((v_hat - v_truth).norm() <= 1e-10 * (1.0 + v_truth.norm()));
  }
}

TEST_CASE("forecast recursion matches the reference implementation on random input") {
  notmf::Rng rng(317);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = static_cast<int>(rng.next_u64() % 5);
    const bool first_order = m >= 1 && rng.bernoulli(0.4);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    const Eigen::Index t_len = d + m + 2 + static_cast<Eigen::Index>(rng.next_u64() % 10);
    const Eigen::Index horizon = 1 + static_cast<Eigen::Index>(rng.next_u64() % 7);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, rank, t_len);
    VarCoefficients coeffs;
    coeffs.stacked = oracles::random_matrix(rng, rank, d * rank, 0.5);
    coeffs.order = d;
    const Eigen::MatrixXd got = notmf::forecast_latent(x, coeffs, m, horizon, first_order);
    const Eigen::MatrixXd want =
        reference_forecast(x, coeffs.stacked, d, m, horizon, first_order);
    CHECK((got - want).norm() <= 1e-10 * (1.0 + want.norm()));
  }
}

TEST_CASE("forecast_observations maps latents through the loadings") {
  notmf::FactorModel model;
  model.w.resize(1, 1);
  model.w << 2.0;
  model.x.resize(1, 2);
  model.x << 1.0, 3.0;
  model.coeffs = VarCoefficients::zero(1, 1);
  model.config.rank = 1;
  model.config.order = 1;
  model.config.season = 1;
  const notmf::ForecastResult fc = notmf::forecast_observations(model, 1);
  CHECK(fc.values(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(fc.start_index == 2);

  model.w << 0.0;
  CHECK(notmf::forecast_observations(model, 3).values.isZero(0.0));
}

TEST_CASE("forecast_observations shape contract") {
  notmf::Rng rng(331);
  notmf::FactorModel model;
  model.w = oracles::random_matrix(rng, 2, 5);
  model.x = oracles::random_matrix(rng, 2, 20);
  model.coeffs = VarCoefficients::zero(2, 1);
  model.config.rank = 2;
  model.config.order = 1;
  model.config.season = 3;
  const notmf::ForecastResult fc = notmf::forecast_observations(model, 6);
  CHECK(fc.values.rows() == 5);
  CHECK(fc.values.cols() == 6);
  CHECK(fc.horizon == 6);
  CHECK(fc.windows == 1);
}

TEST_CASE("rolling with one window equals fit plus forecast") {
  notmf::SyntheticSpec spec;
  spec.n_series = 15;
  spec.n_steps = 100;
  spec.true_rank = 3;
  spec.true_season = 7;
  spec.true_order = 1;
  spec.missing_rate = 0.3;
  spec.seed = 21;
  const MaskedMatrix y = notmf::make_synthetic(spec).masked;
  ModelConfig config;
  config.rank = 4;
  config.order = 1;
  config.season = 7;
  config.rho = 1.0;
  config.outer_iters = 8;
  config.seed = 2;

  const Eigen::Index train = 90, horizon = 10;
  const notmf::ForecastResult rolled = notmf::rolling_forecast(y, config, train, horizon, 1);
  const notmf::FactorModel model = notmf::fit(y.left_cols(train), config);
  const notmf::ForecastResult direct = notmf::forecast_observations(model, horizon);
  CHECK(rolled.values == direct.values);
  CHECK(rolled.start_index == train);

  // same identity with standardization in the loop
  config.standardize = true;
  const notmf::ForecastResult rolled_std = notmf::rolling_forecast(y, config, train, horizon, 1);
  const notmf::ForecastResult direct_std =
      notmf::forecast_observations(notmf::fit(y.left_cols(train), config), horizon);
  CHECK(rolled_std.values == direct_std.values);
  CHECK(rolled_std.values.allFinite());
}

TEST_CASE("rolling keeps the spatial dictionary fixed and covers the range") {
  notmf::SyntheticSpec spec;
  spec.n_series = 12;
  spec.n_steps = 120;
  spec.true_rank = 3;
  spec.true_season = 6;
  spec.true_order = 1;
  spec.missing_rate = 0.3;
  spec.seed = 33;
  const MaskedMatrix y = notmf::make_synthetic(spec).masked;
  ModelConfig config;
  config.rank = 4;
  config.order = 1;
  config.season = 6;
  config.rho = 1.0;
  config.outer_iters = 6;
  config.seed = 4;

  const Eigen::Index train = 96, horizon = 6, windows = 4;
  notmf::FactorModel final_state;
  const notmf::ForecastResult fc =
      notmf::rolling_forecast(y, config, train, horizon, windows, &final_state);
  CHECK(fc.values.cols() == horizon * windows);
  CHECK(fc.start_index == train);
  CHECK(fc.windows == windows);

  // W is bitwise the window-1 dictionary
  const notmf::FactorModel window1 = notmf::fit(y.left_cols(train), config);
  CHECK(final_state.w == window1.w);
  // the final temporal factors track the extended series
  CHECK(final_state.x.cols() == train + horizon * (windows - 1));

  CHECK_THROWS_AS(notmf::rolling_forecast(y, config, 100, 6, 4), notmf::DimensionError);
}
