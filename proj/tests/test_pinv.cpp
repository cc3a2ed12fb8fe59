#include <gtest/gtest.h>

#include "hpfilter/examples.hpp"
#include "hpfilter/pinv.hpp"
#include "test_support.hpp"

namespace {

using namespace hpf;

Eigen::MatrixXd rank_matrix(Engine& rng, Index rows, Index cols, Index rank) {
  if (rank == 0) return Eigen::MatrixXd::Zero(rows, cols);
  return standard_normal(rng, rows, rank) * standard_normal(rng, rank, cols);
}

TEST(Pinv, WeightedShift) {
  const Index n = 6;
  const PinvBundle b = pinv(examples::weighted_shift_operator(n));
  ASSERT_TRUE(b.pinv.is_diagonal());
  EXPECT_EQ(b.numerical_rank, n - 1);
  EXPECT_EQ(b.pinv.multipliers()(0), 0.0);
  for (Index j = 2; j <= n; ++j) EXPECT_DOUBLE_EQ(b.pinv.multipliers()(j - 1), 1.0 / j);
  Eigen::VectorXd pi = Eigen::VectorXd::Ones(n);
  pi(0) = 0.0;
  EXPECT_EQ(b.projector_pi.multipliers(), pi);
  EXPECT_EQ(b.projector_complement.multipliers(), Eigen::VectorXd::Ones(n) - pi);
}

TEST(Pinv, ProjectorAbsorbsPinvWeightedShift) {
  const PinvBundle b = pinv(examples::weighted_shift_operator(8));
  EXPECT_LE(frobenius_distance(compose(b.projector_pi, b.pinv), b.pinv), 1e-12);
}

TEST(Pinv, Identity) {
  const PinvBundle b = pinv(OperatorRep::dense(Eigen::MatrixXd::Identity(5, 5)));
  EXPECT_LE((b.pinv.matrix() - Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-14);
  EXPECT_EQ(b.numerical_rank, 5);
}

TEST(Pinv, ZeroOperator) {
  const PinvBundle b = pinv(OperatorRep::dense(Eigen::MatrixXd::Zero(3, 4)));
  EXPECT_EQ(b.numerical_rank, 0);
  EXPECT_EQ(b.pinv.rows(), 4);
  EXPECT_EQ(b.pinv.cols(), 3);
  EXPECT_EQ(b.pinv.matrix().norm(), 0.0);
  EXPECT_EQ(b.projector_pi.to_dense().norm(), 0.0);
  EXPECT_EQ(b.range_basis().cols(), 0);
}

TEST(Pinv, LowRankRectangular) {
  Engine rng = make_engine(17);
  const OperatorRep a = OperatorRep::dense(rank_matrix(rng, 6, 4, 2));
  const PinvBundle b = pinv(a);
  EXPECT_EQ(b.numerical_rank, 2);
  EXPECT_LT(moore_penrose_residuals(a, b.pinv).max(), moore_penrose_tolerance(a));
}

TEST(Pinv, RcondDropsSmallSingularValues) {
  const OperatorRep a = OperatorRep::dense(Eigen::Vector2d(1.0, 1e-8).asDiagonal().toDenseMatrix());
  EXPECT_EQ(pinv(a).numerical_rank, 2);
  EXPECT_EQ(pinv(a, 1e-6).numerical_rank, 1);
  EXPECT_THROW(pinv(a, 0.0), InputError);
  EXPECT_THROW(pinv(a, 1.5), InputError);
}

TEST(Pinv, RandomMatricesSatisfyPenroseConditions) {
  Engine rng = make_engine(2024);
  std::uniform_int_distribution<Index> size(1, 12);
  for (int k = 0; k < 150; ++k) {
    const Index r = size(rng), c = size(rng);
    std::uniform_int_distribution<Index> rk(0, std::min(r, c));
    const Index rank = rk(rng);
    const OperatorRep a = OperatorRep::dense(rank_matrix(rng, r, c, rank));
    const PinvBundle b = pinv(a);
    const double tol = moore_penrose_tolerance(a);
    EXPECT_EQ(b.numerical_rank, rank) << r << "x" << c;
    EXPECT_LT(moore_penrose_residuals(a, b.pinv).max(), tol) << r << "x" << c << " rank " << rank;

    const Eigen::MatrixXd pi = b.projector_pi.to_dense();
    EXPECT_LT((pi * pi - pi).norm(), 1e-10);
    EXPECT_LT((pi.transpose() - pi).norm(), 1e-12);

    // <Pi xi, (I - Pi) eta> = 0
    const Eigen::VectorXd xi = standard_normal(rng, c), eta = standard_normal(rng, c);
    const Eigen::MatrixXd comp = b.projector_complement.to_dense();
    EXPECT_LT(std::abs((pi * xi).dot(comp * eta)), 1e-10 * xi.norm() * eta.norm());

    // Ker(Pi) = Ker(A), with Ker(A) from an independent LU factorization.
    const Eigen::MatrixXd am = a.to_dense();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(am);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd ker = lu.kernel();
    if (lu.rank() < c) {
      EXPECT_LT((pi * ker).norm(), 1e-8 * (1.0 + ker.norm()));
    }

    // A^+ annihilates Ran(A)^perp.
    Eigen::FullPivLU<Eigen::MatrixXd> lut(am.transpose());
    lut.setThreshold(1e-10);
    if (lut.rank() < r) {
      const Eigen::MatrixXd w = lut.kernel();
      EXPECT_LT((b.pinv.to_dense() * w).norm(), 1e-8 * (1.0 + w.norm()));
    }
  }
}

TEST(Pinv, DiagonalPathMatchesDense) {
  const Eigen::VectorXd m = (Eigen::VectorXd(5) << 0.0, 3.0, -2.0, 0.0, 0.5).finished();
  const PinvBundle d = pinv(OperatorRep::diagonal(m));
  const PinvBundle f = pinv(OperatorRep::dense(Eigen::MatrixXd(m.asDiagonal())));
  EXPECT_LT((d.pinv.to_dense() - f.pinv.to_dense()).norm(), 1e-14);
  EXPECT_LT((d.range_projector.to_dense() - f.range_projector.to_dense()).norm(), 1e-14);
  EXPECT_EQ(d.numerical_rank, 3);
}

}  // namespace
