#ifndef NOTMF_MODEL_HPP
#define NOTMF_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "notmf/masked_matrix.hpp"
#include "notmf/operators.hpp"
#include "notmf/solvers.hpp"

namespace notmf {

enum class Variant {
  notmf,        // seasonal differencing, full VAR coefficients
  notmf_first,  // seasonal plus first-order differencing
  tmf,          // no differencing (season forced to 0)
  trmf,         // diagonal coefficient constraint
};

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelConfig {
  int rank = 10;
  int order = 1;
  int season = 1;
  double lambda = 1.0;
  double rho = 5.0;
  int outer_iters = 30;
  int cg_iters = 5;
  double cg_tol = 1e-8;
  Variant variant = Variant::notmf;
  std::uint64_t seed = 1;
  bool standardize = false;

  bool uses_first_order() const { return variant == Variant::notmf_first; }
  bool uses_diagonal() const { return variant == Variant::trmf; }

  // Applies variant implications (tmf forces season 0) and validates fields.
  ModelConfig normalized() const;
};

struct FactorModel {
  Eigen::MatrixXd w;        // R x N
  Eigen::MatrixXd x;        // R x T
  VarCoefficients coeffs;   // R x d*R
  ModelConfig config;       // normalized
  std::vector<double> objective_trace;

  // Per-series standardization learned at fit time; empty when disabled.
  Eigen::VectorXd row_offset;
  Eigen::VectorXd row_scale;

  Eigen::Index rank() const { return w.rows(); }
  Eigen::Index n_series() const { return w.cols(); }
  Eigen::Index n_steps() const { return x.cols(); }
  bool standardized() const { return row_offset.size() > 0; }

  OperatorFamily family() const {
    return OperatorFamily(config.order, config.season, n_steps(), config.uses_first_order());
  }
};

// Full objective: 0.5 ||P(Y - W^T X)||^2 + rho/2 (||W||^2 + ||X||^2)
//                 + lambda/2 ||X Psi_0^T - A (I_d kron X) Psi^T||^2.
double objective(const MaskedMatrix& y, const Eigen::MatrixXd& w, const Eigen::MatrixXd& x,
                 const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda,
                 double rho);

// Alternating minimization: per outer iteration, closed-form spatial update,
// conjugate-gradient temporal solve warm-started at the previous X, then the
// coefficient least squares. Deterministic given (y, config).
FactorModel fit(const MaskedMatrix& y, const ModelConfig& config);

// Per-series z-scoring over observed entries (constant series get scale 1).
// Returns the transformed copy and writes the transform into offset/scale.
MaskedMatrix standardize_rows(const MaskedMatrix& y, Eigen::VectorXd& offset,
                              Eigen::VectorXd& scale);

// Applies a transform learned elsewhere (rolling windows reuse the fit one).
MaskedMatrix apply_standardization(const MaskedMatrix& y, const Eigen::VectorXd& offset,
                                   const Eigen::VectorXd& scale);

}  // namespace notmf

#endif
