#include "notmf/model.hpp"

#include <cmath>
#include <string>

#include "notmf/errors.hpp"
#include "notmf/rng.hpp"

namespace notmf {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::notmf: return "notmf";
    case Variant::notmf_first: return "notmf-1st";
    case Variant::tmf: return "tmf";
    case Variant::trmf: return "trmf";
  }
  return "unknown";
}

Variant variant_from_name(const std::string& name) {
  if (name == "notmf") return Variant::notmf;
  if (name == "notmf-1st" || name == "notmf_first") return Variant::notmf_first;
  if (name == "tmf") return Variant::tmf;
  if (name == "trmf") return Variant::trmf;
  throw DimensionError("unknown variant '" + name + "' (expected notmf|notmf-1st|tmf|trmf)");
}

ModelConfig ModelConfig::normalized() const {
  ModelConfig c = *this;
  if (c.variant == Variant::tmf) {
    c.season = 0;
  }
  if (c.rank < 1) {
    throw DimensionError("rank must be >= 1, got " + std::to_string(c.rank));
  }
  if (c.order < 1) {
    throw DimensionError("order d must be >= 1, got " + std::to_string(c.order));
  }
  if (c.season < 0) {
    throw DimensionError("season m must be >= 0, got " + std::to_string(c.season));
  }
  if (c.variant == Variant::notmf_first && c.season < 1) {
    throw DimensionError("variant notmf-1st requires season m >= 1");
  }
  if (c.lambda < 0.0) {
    throw DimensionError("lambda must be non-negative");
  }
  if (c.rho <= 0.0) {
    throw DimensionError("rho must be positive");
  }
  if (c.outer_iters < 0) {
    throw DimensionError("iteration count must be non-negative");
  }
  if (c.cg_iters < 1) {
    throw DimensionError("cg iteration count must be >= 1");
  }
  if (c.cg_tol < 0.0) {
    throw DimensionError("cg tolerance must be non-negative");
  }
  return c;
}

double objective(const MaskedMatrix& y, const Eigen::MatrixXd& w, const Eigen::MatrixXd& x,
                 const VarCoefficients& coeffs, const OperatorFamily& fam, double lambda,
                 double rho) {
  if (x.cols() != y.cols() || w.cols() != y.rows() || w.rows() != x.rows()) {
    throw DimensionError("objective: factor/data shape mismatch");
  }
  double data_term = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index t : y.row_observed(i)) {
      const double r = y.values()(i, t) - w.col(i).dot(x.col(t));
      data_term += r * r;
    }
  }
  double temporal_term = 0.0;
  if (lambda > 0.0) {
    Eigen::MatrixXd residual = fam.apply(x, 0);
    for (int k = 1; k <= fam.order(); ++k) {
      residual.noalias() -= coeffs.block(k) * fam.apply(x, k);
    }
    temporal_term = residual.squaredNorm();
  }
  return 0.5 * data_term + 0.5 * rho * (w.squaredNorm() + x.squaredNorm()) +
         0.5 * lambda * temporal_term;
}

MaskedMatrix standardize_rows(const MaskedMatrix& y, Eigen::VectorXd& offset,
                              Eigen::VectorXd& scale) {
  offset = Eigen::VectorXd::Zero(y.rows());
  scale = Eigen::VectorXd::Ones(y.rows());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const auto& observed = y.row_observed(i);
    if (observed.empty()) continue;
    double sum = 0.0;
    for (Eigen::Index t : observed) sum += y.values()(i, t);
    const double mean = sum / static_cast<double>(observed.size());
    double ss = 0.0;
    for (Eigen::Index t : observed) {
      const double d = y.values()(i, t) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(observed.size()));
    offset(i) = mean;
    scale(i) = sd > 0.0 ? sd : 1.0;
  }
  return apply_standardization(y, offset, scale);
}

MaskedMatrix apply_standardization(const MaskedMatrix& y, const Eigen::VectorXd& offset,
                                   const Eigen::VectorXd& scale) {
  if (offset.size() != y.rows() || scale.size() != y.rows()) {
    throw DimensionError("standardization vectors must have one entry per series");
  }
  Eigen::MatrixXd values = y.values();
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    values.row(i) = (values.row(i).array() - offset(i)) / scale(i);
  }
  return MaskedMatrix(std::move(values), y.mask());
}

FactorModel fit(const MaskedMatrix& y, const ModelConfig& raw_config) {
  const ModelConfig config = raw_config.normalized();
  const Eigen::Index n_series = y.rows();
  const Eigen::Index t_len = y.cols();
  if (config.rank >= std::min(n_series, t_len)) {
    throw DimensionError("rank R=" + std::to_string(config.rank) + " must be < min(N, T) = " +
                         std::to_string(std::min(n_series, t_len)));
  }
  const OperatorFamily fam(config.order, config.season, t_len, config.uses_first_order());

  FactorModel model;
  model.config = config;
  const MaskedMatrix* data = &y;
  MaskedMatrix transformed = y;
  if (config.standardize) {
    transformed = standardize_rows(y, model.row_offset, model.row_scale);
    data = &transformed;
  }

  // W, X entries iid normal scaled by 1/sqrt(R); A starts at zero so the
  // first temporal solve is a pure ridge-regularized completion.
  Rng rng(config.seed);
  const double init_scale = 1.0 / std::sqrt(static_cast<double>(config.rank));
  model.w.resize(config.rank, n_series);
  for (Eigen::Index c = 0; c < model.w.cols(); ++c) {
    for (Eigen::Index r = 0; r < model.w.rows(); ++r) {
      model.w(r, c) = init_scale * rng.normal();
    }
  }
  model.x.resize(config.rank, t_len);
  for (Eigen::Index c = 0; c < model.x.cols(); ++c) {
    for (Eigen::Index r = 0; r < model.x.rows(); ++r) {
      model.x(r, c) = init_scale * rng.normal();
    }
  }
  model.coeffs = VarCoefficients::zero(config.rank, config.order, config.uses_diagonal());

  model.objective_trace.reserve(static_cast<std::size_t>(config.outer_iters));
  for (int iter = 0; iter < config.outer_iters; ++iter) {
    model.w = update_spatial(*data, model.x, config.rho);
    CgResult cg = cgtf(*data, model.w, model.x, model.coeffs, fam, config.lambda, config.rho,
                       config.cg_iters, config.cg_tol);
    model.x = std::move(cg.x);
    model.coeffs = update_coefficients(model.x, fam, config.lambda, config.uses_diagonal());
    const double value =
        objective(*data, model.w, model.x, model.coeffs, fam, config.lambda, config.rho);
    if (!std::isfinite(value)) {
      throw NumericalError("fit: non-finite objective at outer iteration " + std::to_string(iter));
    }
    model.objective_trace.push_back(value);
  }
  return model;
}

}  // namespace notmf
