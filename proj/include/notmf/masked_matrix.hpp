#ifndef NOTMF_MASKED_MATRIX_HPP
#define NOTMF_MASKED_MATRIX_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace notmf {

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class MissingRule {
  nan_is_missing,
  zero_is_missing,
  explicit_mask,
};

// Partially observed N x T matrix. Stored dense; entries outside the observed
// index set are canonicalized to zero at construction so no downstream
// computation can depend on what the caller left there. Observed row/column
// index lists are precomputed once because the per-column and per-row sums of
// the factor updates iterate them repeatedly.
//
// Immutable after construction; safe to read from many threads.
class MaskedMatrix {
 public:
  MaskedMatrix(Eigen::MatrixXd values, MaskArray mask);

  static MaskedMatrix from_dense(const Eigen::MatrixXd& values, MissingRule rule,
                                 const MaskArray* mask = nullptr);

  const Eigen::MatrixXd& values() const { return values_; }
  const MaskArray& mask() const { return mask_; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  std::int64_t observed_count() const { return observed_count_; }

  // Sorted, duplicate-free index lists of the observed set.
  const std::vector<Eigen::Index>& column_observed(Eigen::Index t) const;
  const std::vector<Eigen::Index>& row_observed(Eigen::Index i) const;

  // First `count` columns as a new MaskedMatrix (split/rolling ingestion).
  MaskedMatrix left_cols(Eigen::Index count) const;

 private:
  Eigen::MatrixXd values_;
  MaskArray mask_;
  std::int64_t observed_count_ = 0;
  std::vector<std::vector<Eigen::Index>> col_observed_;
  std::vector<std::vector<Eigen::Index>> row_observed_;
};

// Orthogonal projection onto the observed set: keeps observed entries of m,
// zeroes the rest. Linear, idempotent, self-adjoint.
Eigen::MatrixXd project(const MaskArray& mask, const Eigen::MatrixXd& m);

}  // namespace notmf

#endif
