#ifndef NOTMF_SOLVERS_HPP
#define NOTMF_SOLVERS_HPP

#include <Eigen/Dense>
#include <vector>

#include "notmf/masked_matrix.hpp"
#include "notmf/operators.hpp"

namespace notmf {

// Stacked VAR coefficients [A_1 ... A_d], each block R x R. The lag-0 block
// is the convention A_0 = -I and is never stored.
struct VarCoefficients {
  Eigen::MatrixXd stacked;  // R x (d*R)
  int order = 0;
  bool diagonal = false;    // univariate-autoregression constraint

  static VarCoefficients zero(Eigen::Index rank, int order, bool diagonal = false);

  Eigen::Index rank() const { return stacked.rows(); }

  // A_k for k in 1..d.
  Eigen::Block<const Eigen::MatrixXd> block(int k) const;
};

// Ridge least squares for the spatial factors, one column per series:
//   w_i = (sum_{t in Omega_i} x_t x_t^T + rho I)^-1 sum_{t in Omega_i} x_t y_it.
// Series with no observations get w_i = 0. rho = 0 is allowed only when every
// observed row yields a nonsingular system.
Eigen::MatrixXd update_spatial(const MaskedMatrix& y, const Eigen::MatrixXd& x, double rho);

// Right-hand side of the temporal normal equations: W P_Omega(Y), computed
// from the observed index lists.
Eigen::MatrixXd weighted_rhs(const MaskedMatrix& y, const Eigen::MatrixXd& w);

// The normal-equation operator of the temporal subproblem:
//   L(X) = W P_Omega(W^T X) + lambda sum_k A_k^T (sum_h A_h X Psi_h^T) Psi_k + rho X
// with A_0 = -I. Linear, self-adjoint, positive-definite for rho > 0.
Eigen::MatrixXd apply_lx(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                         const MaskedMatrix& y, const VarCoefficients& coeffs,
                         const OperatorFamily& fam, double lambda, double rho);

struct CgResult {
  Eigen::MatrixXd x;
  int iterations = 0;                 // CG updates actually applied
  double initial_residual_norm = 0.0;
  double final_residual_norm = 0.0;
  std::vector<double> residual_trace;  // norm after each update
};

// Conjugate gradient on L(X) = W P_Omega(Y), warm-started at x0. Stops after
// max_iters updates or once the residual norm falls to tol times the initial
// residual norm, whichever comes first.
CgResult cgtf(const MaskedMatrix& y, const Eigen::MatrixXd& w, const Eigen::MatrixXd& x0,
              const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda, double rho,
              int max_iters, double tol);

// Vectorized closed-form solve of the same system, built densely:
//   vec(X) = (S + lambda sum_k sum_h (Psi_k kron A_k)^T (Psi_h kron A_h) + rho I)^-1
//            vec(W P_Omega(Y)).
// O(R^3 T^3); capped at R*T <= 2000. Serves as the correctness oracle for cgtf.
Eigen::MatrixXd oracle_x(const MaskedMatrix& y, const Eigen::MatrixXd& w,
                         const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda,
                         double rho);

// Least squares coefficient update A = X Psi_0^T [(I_d kron X) Psi^T]^+,
// minimum-norm when the regressors are rank deficient. With the diagonal
// constraint, each factor row is regressed independently on its own lags.
VarCoefficients update_coefficients(const Eigen::MatrixXd& x, const OperatorFamily& fam,
                                    double lambda, bool diagonal_constraint);

}  // namespace notmf

#endif
