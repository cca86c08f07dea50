#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "notmf/errors.hpp"
#include "notmf/operators.hpp"
#include "notmf/rng.hpp"
#include "oracles.hpp"

using notmf::OperatorFamily;

TEST_CASE("build computes output widths and rejects short series") {
  CHECK(OperatorFamily(2, 3, 10, false).out_cols() == 5);
  CHECK(OperatorFamily(1, 0, 4, false).out_cols() == 3);
  CHECK(OperatorFamily(1, 2, 10, true).out_cols() == 6);
  CHECK_THROWS_AS(OperatorFamily(1, 2, 3, false), notmf::DimensionError);
  CHECK_THROWS_AS(OperatorFamily(1, 1, 3, true), notmf::DimensionError);
  CHECK_THROWS_AS(OperatorFamily(0, 1, 10, false), notmf::DimensionError);
  CHECK_THROWS_AS(OperatorFamily(1, -1, 10, false), notmf::DimensionError);
}

TEST_CASE("apply matches the stated column structure") {
  Eigen::MatrixXd x(1, 6);
  x << 1, 2, 3, 4, 5, 6;
  const OperatorFamily fam(1, 2, 6, false);

  Eigen::MatrixXd out = fam.apply(x, 0);
  CHECK(out.cols() == 3);
  CHECK(out(0, 0) == 2.0);
  CHECK(out(0, 1) == 2.0);
  CHECK(out(0, 2) == 2.0);

  out = fam.apply(x, 1);
  CHECK(out(0, 0) == 2.0);
  CHECK(out(0, 1) == 2.0);
  CHECK(out(0, 2) == 2.0);

  Eigen::MatrixXd lags(1, 4);
  lags << 10, 20, 30, 40;
  const OperatorFamily selection(1, 0, 4, false);
  const Eigen::MatrixXd selected = selection.apply(lags, 1);
  CHECK(selected(0, 0) == 10.0);
  CHECK(selected(0, 1) == 20.0);
  CHECK(selected(0, 2) == 30.0);

  CHECK_THROWS_AS(fam.apply(x, 2), notmf::DimensionError);
  CHECK_THROWS_AS(fam.apply(Eigen::MatrixXd::Zero(1, 5), 0), notmf::DimensionError);
}

TEST_CASE("seasonal difference of a linear ramp is a constant column") {
  notmf::Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = 1 + static_cast<int>(rng.next_u64() % 5);
    const Eigen::Index t_len = d + m + 3 + static_cast<Eigen::Index>(rng.next_u64() % 8);
    const double intercept = rng.normal();
    const double slope = rng.normal();
    Eigen::MatrixXd x(1, t_len);
    for (Eigen::Index t = 0; t < t_len; ++t) x(0, t) = intercept + slope * static_cast<double>(t);
    const OperatorFamily fam(d, m, t_len, false);
    for (int k = 0; k <= d; ++k) {
      const Eigen::MatrixXd out = fam.apply(x, k);
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        CHECK(std::abs(out(0, j) - m * slope) <= 1e-12 * (1.0 + std::abs(m * slope)));
      }
    }
  }
}

TEST_CASE("adjoint scatter example") {
  const OperatorFamily fam(1, 2, 6, false);
  Eigen::MatrixXd g(1, 3);
  g << 1, 0, 0;
  const Eigen::MatrixXd out = fam.apply_adjoint(g, 0);
  Eigen::MatrixXd expected(1, 6);
  expected << 0, -1, 0, 1, 0, 0;
  CHECK((out - expected).norm() == 0.0);

  // against the literal dense transpose as well
  const Eigen::MatrixXd dense = oracles::literal_psi(1, 2, 6, 0);
  CHECK((out - g * dense).norm() == 0.0);

  CHECK(fam.apply_adjoint(Eigen::MatrixXd::Zero(4, 3), 1).isZero(0.0));
  CHECK_THROWS_AS(fam.apply_adjoint(Eigen::MatrixXd::Zero(1, 4), 0), notmf::DimensionError);
}

TEST_CASE("forward/adjoint inner-product identity and dense equivalence") {
  notmf::Rng rng(17);
  for (int rep = 0; rep < 60; ++rep) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = static_cast<int>(rng.next_u64() % 6);  // includes the selection encoding
    const bool first_order = m >= 1 && rng.bernoulli(0.3);
    const Eigen::Index t_len =
        d + m + (first_order ? 1 : 0) + 2 + static_cast<Eigen::Index>(rng.next_u64() % 10);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d + 1));

    const OperatorFamily fam(d, m, t_len, first_order);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, rank, t_len);
    const Eigen::MatrixXd g = oracles::random_matrix(rng, rank, fam.out_cols());

    const Eigen::MatrixXd forward = fam.apply(x, k);
    const Eigen::MatrixXd adjoint = fam.apply_adjoint(g, k);
    const double lhs = (forward.array() * g.array()).sum();
    const double rhs = (x.array() * adjoint.array()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));

    const Eigen::MatrixXd dense = oracles::literal_operator(d, m, t_len, k, first_order);
    CHECK((forward - x * dense.transpose()).norm() <= 1e-12 * (1.0 + forward.norm()));
    CHECK((adjoint - g * dense).norm() <= 1e-12 * (1.0 + adjoint.norm()));
  }
}

TEST_CASE("dense matches the literal block sum and has signed unit entries") {
  notmf::Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int m = 1 + static_cast<int>(rng.next_u64() % 5);
    const Eigen::Index t_len = d + m + 2 + static_cast<Eigen::Index>(rng.next_u64() % 8);
    const OperatorFamily fam(d, m, t_len, false);
    for (int k = 0; k <= d; ++k) {
      const Eigen::MatrixXd dense = fam.dense(k);
      CHECK((dense - oracles::literal_psi(d, m, t_len, k)).norm() == 0.0);
      for (Eigen::Index r = 0; r < dense.rows(); ++r) {
        CHECK(dense.row(r).sum() == 0.0);
        CHECK(dense.row(r).cwiseAbs().sum() == 2.0);
      }
    }
  }

  const OperatorFamily selection(2, 0, 9, false);
  for (int k = 0; k <= 2; ++k) {
    const Eigen::MatrixXd dense = selection.dense(k);
    CHECK((dense - oracles::literal_selection(2, 9, k)).norm() == 0.0);
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
      CHECK(dense.row(r).sum() == 1.0);
    }
  }
}

TEST_CASE("first-order composition equals phi after the seasonal operator") {
  notmf::Rng rng(29);
  const int d = 2, m = 3;
  const Eigen::Index t_len = 17;
  const OperatorFamily composed(d, m, t_len, true);
  const OperatorFamily seasonal(d, m, t_len, false);
  const Eigen::MatrixXd x = oracles::random_matrix(rng, 3, t_len);
  const Eigen::MatrixXd phi = oracles::literal_phi(seasonal.out_cols() - 1);
  for (int k = 0; k <= d; ++k) {
    const Eigen::MatrixXd via_composed = composed.apply(x, k);
    const Eigen::MatrixXd via_stages = seasonal.apply(x, k) * phi.transpose();
    CHECK((via_composed - via_stages).norm() <= 1e-12 * (1.0 + via_stages.norm()));
    CHECK((composed.dense(k) - phi * seasonal.dense(k)).norm() == 0.0);
  }
}

TEST_CASE("dense refuses oversized instances") {
  const OperatorFamily fam(1, 1, 4000, false);
  CHECK_THROWS_AS(fam.dense(0), notmf::DimensionError);
}
