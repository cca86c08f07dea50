#include "notmf/operators.hpp"

#include <string>

#include "notmf/errors.hpp"

namespace notmf {

namespace {
constexpr Eigen::Index kDenseEntryCap = 1'000'000;
}

OperatorFamily::OperatorFamily(int order, int season, Eigen::Index time_length, bool first_order)
    : order_(order), season_(season), time_length_(time_length), first_order_(first_order) {
  if (order_ < 1) {
    throw DimensionError("operator order d must be >= 1, got " + std::to_string(order_));
  }
  if (season_ < 0) {
    throw DimensionError("season m must be >= 0, got " + std::to_string(season_));
  }
  if (time_length_ < 1) {
    throw DimensionError("time length T must be >= 1, got " + std::to_string(time_length_));
  }
  out_cols_ = time_length_ - order_ - season_ - (first_order_ ? 1 : 0);
  if (out_cols_ < 1) {
    throw DimensionError("series too short for (d=" + std::to_string(order_) +
                         ", m=" + std::to_string(season_) + (first_order_ ? ", first-order" : "") +
                         "): T=" + std::to_string(time_length_) + " leaves no differenced columns");
  }
}

void OperatorFamily::check_lag(int k) const {
  if (k < 0 || k > order_) {
    throw DimensionError("lag index k=" + std::to_string(k) + " out of range [0, " +
                         std::to_string(order_) + "]");
  }
}

Eigen::Index OperatorFamily::seasonal_cols() const { return time_length_ - order_ - season_; }

Eigen::MatrixXd OperatorFamily::apply(const Eigen::MatrixXd& x, int k) const {
  check_lag(k);
  if (x.cols() != time_length_) {
    throw DimensionError("apply: X has " + std::to_string(x.cols()) + " columns, expected T=" +
                         std::to_string(time_length_));
  }
  const Eigen::Index len = seasonal_cols();
  Eigen::MatrixXd seasonal;
  if (season_ >= 1) {
    seasonal = x.middleCols(order_ + season_ - k, len) - x.middleCols(order_ - k, len);
  } else {
    seasonal = x.middleCols(order_ - k, len);
  }
  if (!first_order_) {
    return seasonal;
  }
  return seasonal.middleCols(1, len - 1) - seasonal.middleCols(0, len - 1);
}

Eigen::MatrixXd OperatorFamily::apply_adjoint(const Eigen::MatrixXd& g, int k) const {
  check_lag(k);
  if (g.cols() != out_cols_) {
    throw DimensionError("apply_adjoint: G has " + std::to_string(g.cols()) +
                         " columns, expected out_cols=" + std::to_string(out_cols_));
  }
  const Eigen::Index len = seasonal_cols();
  Eigen::MatrixXd seasonal_grad;
  if (first_order_) {
    seasonal_grad = Eigen::MatrixXd::Zero(g.rows(), len);
    seasonal_grad.middleCols(1, len - 1) += g;
    seasonal_grad.middleCols(0, len - 1) -= g;
  } else {
    seasonal_grad = g;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.rows(), time_length_);
  if (season_ >= 1) {
    out.middleCols(order_ + season_ - k, len) += seasonal_grad;
    out.middleCols(order_ - k, len) -= seasonal_grad;
  } else {
    out.middleCols(order_ - k, len) += seasonal_grad;
  }
  return out;
}

Eigen::MatrixXd OperatorFamily::dense(int k) const {
  check_lag(k);
  if (out_cols_ * time_length_ > kDenseEntryCap) {
    throw DimensionError("dense operator would hold " +
                         std::to_string(out_cols_ * time_length_) +
                         " entries, above the cap of " + std::to_string(kDenseEntryCap));
  }
  const Eigen::Index len = seasonal_cols();
  Eigen::MatrixXd seasonal = Eigen::MatrixXd::Zero(len, time_length_);
  for (Eigen::Index j = 0; j < len; ++j) {
    if (season_ >= 1) {
      seasonal(j, order_ - k + j) -= 1.0;
      seasonal(j, order_ + season_ - k + j) += 1.0;
    } else {
      seasonal(j, order_ - k + j) += 1.0;
    }
  }
  if (!first_order_) {
    return seasonal;
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(len - 1, len);
  for (Eigen::Index j = 0; j < len - 1; ++j) {
    phi(j, j) = -1.0;
    phi(j, j + 1) = 1.0;
  }
  return phi * seasonal;
}

}  // namespace notmf
