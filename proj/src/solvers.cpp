#include "notmf/solvers.hpp"

#include <cmath>
#include <string>

#include "notmf/errors.hpp"

namespace notmf {

namespace {

void check_factor_shapes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                         const MaskedMatrix& y, const OperatorFamily& fam) {
  if (x.cols() != y.cols() || x.cols() != fam.time_length()) {
    throw DimensionError("temporal factor has " + std::to_string(x.cols()) +
                         " columns, expected T=" + std::to_string(y.cols()));
  }
  if (w.cols() != y.rows()) {
    throw DimensionError("spatial factor has " + std::to_string(w.cols()) +
                         " columns, expected N=" + std::to_string(y.rows()));
  }
  if (w.rows() != x.rows()) {
    throw DimensionError("factor ranks disagree: W has " + std::to_string(w.rows()) +
                         " rows, X has " + std::to_string(x.rows()));
  }
}

void check_coefficients(const VarCoefficients& coeffs, Eigen::Index rank,
                        const OperatorFamily& fam) {
  if (coeffs.order != fam.order()) {
    throw DimensionError("coefficient order " + std::to_string(coeffs.order) +
                         " does not match operator order " + std::to_string(fam.order()));
  }
  if (coeffs.rank() != rank || coeffs.stacked.cols() != coeffs.order * rank) {
    throw DimensionError("coefficient matrix must be R x d*R with R=" + std::to_string(rank));
  }
}

// Frobenius inner product.
double fdot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace

VarCoefficients VarCoefficients::zero(Eigen::Index rank, int order, bool diagonal) {
  VarCoefficients c;
  c.stacked = Eigen::MatrixXd::Zero(rank, static_cast<Eigen::Index>(order) * rank);
  c.order = order;
  c.diagonal = diagonal;
  return c;
}

Eigen::Block<const Eigen::MatrixXd> VarCoefficients::block(int k) const {
  if (k < 1 || k > order) {
    throw DimensionError("coefficient block k=" + std::to_string(k) + " out of range [1, " +
                         std::to_string(order) + "]");
  }
  const Eigen::Index r = rank();
  return stacked.block(0, static_cast<Eigen::Index>(k - 1) * r, r, r);
}

Eigen::MatrixXd update_spatial(const MaskedMatrix& y, const Eigen::MatrixXd& x, double rho) {
  if (x.cols() != y.cols()) {
    throw DimensionError("update_spatial: X has " + std::to_string(x.cols()) +
                         " columns, expected T=" + std::to_string(y.cols()));
  }
  if (rho < 0.0) {
    throw DimensionError("rho must be non-negative");
  }
  const Eigen::Index rank = x.rows();
  const Eigen::Index n_series = y.rows();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rank, n_series);
  Eigen::MatrixXd gram(rank, rank);
  Eigen::VectorXd rhs(rank);
  for (Eigen::Index i = 0; i < n_series; ++i) {
    const auto& observed = y.row_observed(i);
    if (observed.empty()) {
      continue;  // no data: pure ridge gives w_i = 0
    }
    gram = rho * Eigen::MatrixXd::Identity(rank, rank);
    rhs.setZero();
    for (Eigen::Index t : observed) {
      gram.noalias() += x.col(t) * x.col(t).transpose();
      rhs.noalias() += y.values()(i, t) * x.col(t);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (rho == 0.0) {
      const auto& d = ldlt.vectorD();
      if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff()) {
        throw NumericalError("update_spatial: singular system for series row " +
                             std::to_string(i) + " at rho=0");
      }
    }
    w.col(i) = ldlt.solve(rhs);
  }
  return w;
}

Eigen::MatrixXd weighted_rhs(const MaskedMatrix& y, const Eigen::MatrixXd& w) {
  if (w.cols() != y.rows()) {
    throw DimensionError("weighted_rhs: W has " + std::to_string(w.cols()) +
                         " columns, expected N=" + std::to_string(y.rows()));
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(w.rows(), y.cols());
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    for (Eigen::Index i : y.column_observed(t)) {
      rhs.col(t).noalias() += w.col(i) * y.values()(i, t);
    }
  }
  return rhs;
}

Eigen::MatrixXd apply_lx(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                         const MaskedMatrix& y, const VarCoefficients& coeffs,
                         const OperatorFamily& fam, double lambda, double rho) {
  check_factor_shapes(x, w, y, fam);
  check_coefficients(coeffs, x.rows(), fam);
  if (lambda < 0.0 || rho < 0.0) {
    throw DimensionError("lambda and rho must be non-negative");
  }
  Eigen::MatrixXd out = rho * x;
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    const auto& observed = y.column_observed(t);
    if (observed.empty()) continue;
    auto xt = x.col(t);
    auto acc = out.col(t);
    for (Eigen::Index i : observed) {
      acc.noalias() += w.col(i) * w.col(i).dot(xt);
    }
  }
  if (lambda > 0.0) {
    // z = sum_h A_h X Psi_h^T with A_0 = -I; the gradient scatters z back
    // through each Psi_k.
    Eigen::MatrixXd z = -fam.apply(x, 0);
    for (int h = 1; h <= fam.order(); ++h) {
      z.noalias() += coeffs.block(h) * fam.apply(x, h);
    }
    out.noalias() -= lambda * fam.apply_adjoint(z, 0);
    for (int k = 1; k <= fam.order(); ++k) {
      out.noalias() += lambda * fam.apply_adjoint(coeffs.block(k).transpose() * z, k);
    }
  }
  return out;
}

CgResult cgtf(const MaskedMatrix& y, const Eigen::MatrixXd& w, const Eigen::MatrixXd& x0,
              const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda, double rho,
              int max_iters, double tol) {
  if (rho <= 0.0) {
    throw DimensionError("cgtf requires rho > 0 for a positive-definite system");
  }
  if (max_iters < 1) {
    throw DimensionError("cgtf requires at least one iteration");
  }
  if (tol < 0.0) {
    throw DimensionError("cgtf tolerance must be non-negative");
  }
  const Eigen::MatrixXd rhs = weighted_rhs(y, w);
  CgResult result;
  result.x = x0;
  Eigen::MatrixXd residual = rhs - apply_lx(result.x, w, y, coeffs, fam, lambda, rho);
  double rr = residual.squaredNorm();
  result.initial_residual_norm = std::sqrt(rr);
  result.final_residual_norm = result.initial_residual_norm;
  if (!std::isfinite(rr)) {
    throw NumericalError("cgtf: non-finite residual at iteration 0");
  }
  if (rr == 0.0) {
    return result;  // warm start already solves the system
  }
  const double stop_norm = tol * result.initial_residual_norm;
  Eigen::MatrixXd direction = residual;
  for (int iter = 0; iter < max_iters; ++iter) {
    if (std::sqrt(rr) <= stop_norm) break;
    Eigen::MatrixXd l_direction = apply_lx(direction, w, y, coeffs, fam, lambda, rho);
    const double curvature = fdot(direction, l_direction);
    if (!std::isfinite(curvature) || curvature <= 0.0) {
      throw NumericalError("cgtf: conjugate gradient breakdown at iteration " +
                           std::to_string(iter));
    }
    const double alpha = rr / curvature;
    result.x.noalias() += alpha * direction;
    residual.noalias() -= alpha * l_direction;
    const double rr_next = residual.squaredNorm();
    if (!std::isfinite(rr_next)) {
      throw NumericalError("cgtf: non-finite residual at iteration " + std::to_string(iter + 1));
    }
    result.iterations = iter + 1;
    result.residual_trace.push_back(std::sqrt(rr_next));
    const double beta = rr_next / rr;
    rr = rr_next;
    direction = residual + beta * direction;
  }
  result.final_residual_norm = std::sqrt(rr);
  return result;
}

Eigen::MatrixXd oracle_x(const MaskedMatrix& y, const Eigen::MatrixXd& w,
                         const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda,
                         double rho) {
  const Eigen::Index rank = w.rows();
  const Eigen::Index t_len = fam.time_length();
  const Eigen::Index n = rank * t_len;
  if (n > 2000) {
    throw DimensionError("oracle_x capped at R*T <= 2000, got " + std::to_string(n));
  }
  if (w.cols() != y.rows() || y.cols() != t_len) {
    throw DimensionError("oracle_x: factor/data shape mismatch");
  }
  check_coefficients(coeffs, rank, fam);
  if (lambda < 0.0 || rho < 0.0) {
    throw DimensionError("lambda and rho must be non-negative");
  }

  Eigen::MatrixXd system = rho * Eigen::MatrixXd::Identity(n, n);
  // Block-diagonal S with S_t = sum_{i in Omega_t} w_i w_i^T.
  for (Eigen::Index t = 0; t < t_len; ++t) {
    auto block = system.block(t * rank, t * rank, rank, rank);
    for (Eigen::Index i : y.column_observed(t)) {
      block.noalias() += w.col(i) * w.col(i).transpose();
    }
  }
  if (lambda > 0.0) {
    // M = sum_k Psi_k kron A_k, with A_0 = -I; the temporal term is lambda M^T M.
    const Eigen::Index oc = fam.out_cols();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(oc * rank, n);
    for (int k = 0; k <= fam.order(); ++k) {
      const Eigen::MatrixXd psi = fam.dense(k);
      const Eigen::MatrixXd a_k =
          (k == 0) ? Eigen::MatrixXd(-Eigen::MatrixXd::Identity(rank, rank))
                   : Eigen::MatrixXd(coeffs.block(k));
      for (Eigen::Index r = 0; r < oc; ++r) {
        for (Eigen::Index c = 0; c < t_len; ++c) {
          if (psi(r, c) != 0.0) {
            m.block(r * rank, c * rank, rank, rank).noalias() += psi(r, c) * a_k;
          }
        }
      }
    }
    system.noalias() += lambda * m.transpose() * m;
  }

  const Eigen::MatrixXd rhs = weighted_rhs(y, w);
  const Eigen::Map<const Eigen::VectorXd> rhs_vec(rhs.data(), n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  const auto& d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-14 * d.maxCoeff()) {
    throw NumericalError("oracle_x: singular temporal system (rho too small)");
  }
  Eigen::VectorXd solution = ldlt.solve(rhs_vec);
  return Eigen::Map<Eigen::MatrixXd>(solution.data(), rank, t_len);
}

namespace {

// Solve min ||target - C * regressors||_F for C, minimum-norm when the Gram
// matrix is rank deficient. regressors: p x n, target: q x n, result: q x p.
Eigen::MatrixXd least_squares_coefficients(const Eigen::MatrixXd& regressors,
                                           const Eigen::MatrixXd& target) {
  const Eigen::Index p = regressors.rows();
  Eigen::MatrixXd gram = regressors * regressors.transpose();
  const double scale = gram.diagonal().maxCoeff();
  if (scale <= 0.0) {
    return Eigen::MatrixXd::Zero(target.rows(), p);  // zero regressors: min-norm is 0
  }
  gram.diagonal().array() += 1e-12 * scale;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const auto& d = ldlt.vectorD();
  if (ldlt.info() == Eigen::Success && d.minCoeff() > 1e-10 * d.maxCoeff()) {
    return ldlt.solve(regressors * target.transpose()).transpose();
  }
  // Rank-deficient: fall back to the minimum-norm pseudo-inverse solution.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(regressors.transpose());
  return cod.solve(target.transpose()).transpose();
}

}  // namespace

VarCoefficients update_coefficients(const Eigen::MatrixXd& x, const OperatorFamily& fam,
                                    double lambda, bool diagonal_constraint) {
  (void)lambda;  // cancels in the normal equations
  const Eigen::Index rank = x.rows();
  const int order = fam.order();
  const Eigen::Index oc = fam.out_cols();
  const Eigen::MatrixXd target = fam.apply(x, 0);
  Eigen::MatrixXd lagged(static_cast<Eigen::Index>(order) * rank, oc);
  for (int k = 1; k <= order; ++k) {
    lagged.middleRows(static_cast<Eigen::Index>(k - 1) * rank, rank) = fam.apply(x, k);
  }

  VarCoefficients coeffs = VarCoefficients::zero(rank, order, diagonal_constraint);
  if (!diagonal_constraint) {
    coeffs.stacked = least_squares_coefficients(lagged, target);
    return coeffs;
  }
  // Univariate constraint: factor row r regressed on its own lagged rows only.
  Eigen::MatrixXd row_regressors(order, oc);
  for (Eigen::Index r = 0; r < rank; ++r) {
    for (int k = 1; k <= order; ++k) {
      row_regressors.row(k - 1) = lagged.row(static_cast<Eigen::Index>(k - 1) * rank + r);
    }
    const Eigen::MatrixXd row_coeffs = least_squares_coefficients(row_regressors, target.row(r));
    for (int k = 1; k <= order; ++k) {
      coeffs.stacked(r, static_cast<Eigen::Index>(k - 1) * rank + r) = row_coeffs(0, k - 1);
    }
  }
  return coeffs;
}

}  // namespace notmf
