#include "notmf/masked_matrix.hpp"

#include <cmath>

#include "notmf/errors.hpp"

namespace notmf {

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd values, MaskArray mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw DimensionError("mask shape " + std::to_string(mask_.rows()) + "x" +
                         std::to_string(mask_.cols()) + " does not match values shape " +
                         std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
  }
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DimensionError("matrix must have at least one row and one column");
  }
  col_observed_.resize(static_cast<std::size_t>(values_.cols()));
  row_observed_.resize(static_cast<std::size_t>(values_.rows()));
  for (Eigen::Index t = 0; t < values_.cols(); ++t) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (mask_(i, t)) {
        col_observed_[static_cast<std::size_t>(t)].push_back(i);
        row_observed_[static_cast<std::size_t>(i)].push_back(t);
        ++observed_count_;
      } else {
        values_(i, t) = 0.0;  // canonicalize: unobserved storage is never read
      }
    }
  }
}

MaskedMatrix MaskedMatrix::from_dense(const Eigen::MatrixXd& values, MissingRule rule,
                                      const MaskArray* mask) {
  switch (rule) {
    case MissingRule::nan_is_missing: {
      MaskArray m = values.array().unaryExpr([](double v) { return !std::isnan(v); });
      return MaskedMatrix(values, std::move(m));
    }
    case MissingRule::zero_is_missing: {
      MaskArray m = values.array().unaryExpr([](double v) { return v != 0.0 && !std::isnan(v); });
      return MaskedMatrix(values, std::move(m));
    }
    case MissingRule::explicit_mask: {
      if (mask == nullptr) {
        throw DimensionError("explicit_mask rule requires a mask");
      }
      return MaskedMatrix(values, *mask);
    }
  }
  throw DimensionError("unknown missing rule");
}

const std::vector<Eigen::Index>& MaskedMatrix::column_observed(Eigen::Index t) const {
  if (t < 0 || t >= cols()) {
    throw DimensionError("column index " + std::to_string(t) + " out of range [0, " +
                         std::to_string(cols()) + ")");
  }
  return col_observed_[static_cast<std::size_t>(t)];
}

const std::vector<Eigen::Index>& MaskedMatrix::row_observed(Eigen::Index i) const {
  if (i < 0 || i >= rows()) {
    throw DimensionError("row index " + std::to_string(i) + " out of range [0, " +
                         std::to_string(rows()) + ")");
  }
  return row_observed_[static_cast<std::size_t>(i)];
}

MaskedMatrix MaskedMatrix::left_cols(Eigen::Index count) const {
  if (count < 1 || count > cols()) {
    throw DimensionError("column count " + std::to_string(count) + " out of range [1, " +
                         std::to_string(cols()) + "]");
  }
  return MaskedMatrix(values_.leftCols(count), mask_.leftCols(count));
}

Eigen::MatrixXd project(const MaskArray& mask, const Eigen::MatrixXd& m) {
  if (mask.rows() != m.rows() || mask.cols() != m.cols()) {
    throw DimensionError("projection shape mismatch: mask " + std::to_string(mask.rows()) + "x" +
                         std::to_string(mask.cols()) + " vs matrix " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  }
  return mask.select(m, Eigen::MatrixXd::Zero(m.rows(), m.cols()));
}

}  // namespace notmf
