#ifndef NOTMF_OPERATORS_HPP
#define NOTMF_OPERATORS_HPP

#include <Eigen/Dense>

namespace notmf {

// Lagged seasonal differencing operators Psi_0..Psi_d over a length-T series,
// optionally composed with the first-order differencing operator Phi. Applied
// matrix-free in both directions: each operator row has at most two nonzeros,
// so forward/adjoint are column-shift loops, never materialized products.
//
// Column semantics of apply(X, k), 0-based columns x_0..x_{T-1}:
//   m >= 1:  col j = x_{d+m-k+j} - x_{d-k+j}          (seasonal difference)
//   m == 0:  col j = x_{d-k+j}                        (pure lag selection)
// m == 0 encodes the undifferenced variant so one solver serves all variants.
// With first_order, the result is additionally differenced along columns.
//
// Immutable after construction; apply/apply_adjoint are pure.
class OperatorFamily {
 public:
  OperatorFamily(int order, int season, Eigen::Index time_length, bool first_order);

  int order() const { return order_; }
  int season() const { return season_; }
  Eigen::Index time_length() const { return time_length_; }
  bool first_order() const { return first_order_; }
  Eigen::Index out_cols() const { return out_cols_; }

  // X Psi_k^T (composed with Phi^T when first_order): R x T -> R x out_cols.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x, int k) const;

  // Exact adjoint of apply: R x out_cols -> R x T, so that
  // <apply(X,k), G> == <X, apply_adjoint(G,k)> for all X, G.
  Eigen::MatrixXd apply_adjoint(const Eigen::MatrixXd& g, int k) const;

  // Explicit out_cols x T operator matrix. Exists for the vectorized
  // closed-form solve and for tests; capped at 10^6 entries.
  Eigen::MatrixXd dense(int k) const;

 private:
  void check_lag(int k) const;
  Eigen::Index seasonal_cols() const;  // width before the optional Phi stage

  int order_;
  int season_;
  Eigen::Index time_length_;
  bool first_order_;
  Eigen::Index out_cols_;
};

}  // namespace notmf

#endif
