#include <gtest/gtest.h>

#include "hpfilter/examples.hpp"
#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/monte_carlo.hpp"
#include "test_support.hpp"

namespace {

using namespace hpf;
using hpf::testing::kPi;

OperatorRep diag(std::initializer_list<double> v, BasisId b = BasisId::euclidean()) {
  Eigen::VectorXd m(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) m(i++) = x;
  return OperatorRep::diagonal(m, b);
}

// Each entry must sit inside the 3-SE band for at least 4 of 5 seeds.
template <class Estimate>
void expect_mostly_within(Estimate&& est, const Eigen::MatrixXd& truth) {
  Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(truth.rows(), truth.cols());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto [value, se] = est(seed);
    hits += within_bands(value, se, truth).template cast<int>().matrix();
  }
  EXPECT_GE(hits.minCoeff(), 4) << hits;
}

TEST(Qv, IdentityOperator) {
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(2), diag({1, 1}), diag({1, 2}));
  EXPECT_EQ(qv(m).multipliers(), Eigen::Vector2d(1, 2));
}

TEST(Qv, WeightedShift) {
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(4), diag({1, 1, 1, 1}),
                                              diag({1, 1, 1, 1}));
  const Eigen::VectorXd q = qv(m).multipliers();
  EXPECT_EQ(q(0), 0.0);
  for (int j = 2; j <= 4; ++j) EXPECT_NEAR(q(j - 1), 1.0 / (j * j), 1e-16);
}

TEST(Qv, LaplacianSpectrum) {
  const Index n = 8;
  const double s = 0.7;
  const GaussianModel m = GaussianModel::make(examples::dirichlet_laplacian(n),
                                              OperatorRep::identity(n, BasisId::sine_dirichlet()),
                                              s * OperatorRep::identity(n, BasisId::sine_dirichlet()));
  const Eigen::VectorXd q = qv(m).multipliers();
  for (Index k = 1; k <= n; ++k) EXPECT_NEAR(q(k - 1), s / std::pow(k * kPi, 4), 1e-18);
}

TEST(ConditionalMean, NoiselessInvertibleReturnsObservation) {
  Engine rng = make_engine(1);
  const OperatorRep a = OperatorRep::dense(standard_normal(rng, 3, 3) + 2.0 * Eigen::MatrixXd::Identity(3, 3));
  const GaussianModel m = GaussianModel::make(a, OperatorRep::dense(Eigen::MatrixXd::Zero(3, 3)),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 3)));
  const CoeffVector x(standard_normal(rng, 3));
  const ConditionalMean c = conditional_mean(m, x);
  EXPECT_FALSE(c.rank_deficient);
  EXPECT_LT((c.value - x).norm(), 1e-10);
}

TEST(ConditionalMean, ScalarFormula) {
  const double a = 2.0, su = 0.3, sv = 1.5, x = 0.8;
  const GaussianModel m = GaussianModel::make(diag({a}), diag({su}), diag({sv}));
  const double q = sv / (a * a);
  EXPECT_NEAR(conditional_mean(m, CoeffVector(Eigen::VectorXd::Constant(1, x))).value[0], q / (su + q) * x, 1e-15);
}

TEST(ConditionalMean, KernelComponentPassesThroughAtPrior) {
  CoeffVector y0(Eigen::Vector4d(2.5, 0, 0, 0));
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(4), diag({0.5, 1, 1, 1}),
                                              diag({1, 2, 3, 4}), y0);
  const ConditionalMean c = conditional_mean(m, y0);
  EXPECT_LT((c.value - y0).norm(), 1e-15);
}

TEST(ConditionalMean, AffineInObservation) {
  Engine rng = make_engine(2);
  const GaussianModel m = GaussianModel::make(OperatorRep::dense(standard_normal(rng, 4, 4)),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 4)),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 4)));
  const CoeffVector x1(standard_normal(rng, 4)), x2(standard_normal(rng, 4));
  const CoeffVector lhs = conditional_mean(m, 0.3 * x1 + 0.7 * x2).value;
  const CoeffVector rhs = 0.3 * conditional_mean(m, x1).value + 0.7 * conditional_mean(m, x2).value;
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(ConditionalMean, RegressionOfDrawsMatchesSlope) {
  const GaussianModel m = GaussianModel::make(diag({1, 2, 3, 0.5}), diag({0.4, 1, 0.2, 2}),
                                              diag({1, 3, 2, 0.1}));
  const Eigen::MatrixXd slope = conditional_slope(m).slope.to_dense();
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 100000, seed);
        const Regression r = least_squares(s.y, s.x);
        return std::pair{r.slope, r.std_error};
      },
      slope);
}

TEST(ConditionalMean, RegressionDenseModel) {
  Engine rng = make_engine(12);
  const GaussianModel m = GaussianModel::make(OperatorRep::dense(standard_normal(rng, 3, 3)),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 3)),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 3)));
  const Eigen::MatrixXd slope = conditional_slope(m).slope.to_dense();
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 50000, seed);
        const Regression r = least_squares(s.y, s.x);
        return std::pair{r.slope, r.std_error};
      },
      slope);
}

TEST(HsDiagnostics, IdentityPair) {
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(2), diag({1, 1}), diag({1, 1}));
  const HsReport r = hs_diagnostics(m);
  EXPECT_DOUBLE_EQ(r.trace_qv, 2.0);
  EXPECT_DOUBLE_EQ(r.trace_sigma_u, 2.0);
  // T = I (2I)^{-1/2}, |T|_F^2 = 2 * 1/2
  EXPECT_NEAR(r.hs_norm_t * r.hs_norm_t, 1.0, 1e-14);
  EXPECT_TRUE(r.injective);
}

TEST(HsDiagnostics, SummableDecayPasses) {
  const Index n = 200;
  Eigen::VectorXd sv(n), su(n);
  for (Index k = 1; k <= n; ++k) {
    sv(k - 1) = 1.0 / static_cast<double>(k * k);
    su(k - 1) = 1.0 / static_cast<double>(k * k);
  }
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(n), OperatorRep::diagonal(su),
                                              OperatorRep::diagonal(sv));
  const HsReport r = hs_diagnostics(m, SpectralDecay{2.0, 2.0, 0.0});
  double tr = 0.0;
  for (Index k = n; k >= 1; --k) tr += 1.0 / static_cast<double>(k * k);
  EXPECT_NEAR(r.trace_qv, tr, 1e-13);
  EXPECT_EQ(r.qv_trace_class, true);
  EXPECT_EQ(r.t_hilbert_schmidt, true);
}

TEST(HsDiagnostics, FlatSpectrumFails) {
  const Index n = 50;
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(n), OperatorRep::identity(n),
                                              OperatorRep::identity(n));
  const HsReport r = hs_diagnostics(m, SpectralDecay{0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.trace_qv, static_cast<double>(n));
  EXPECT_EQ(r.qv_trace_class, false);
  EXPECT_EQ(r.sigma_u_trace_class, false);
  EXPECT_EQ(r.t_hilbert_schmidt, false);
}

TEST(HsDiagnostics, NoninjectiveFlagged) {
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(3), diag({0, 1, 1}),
                                              diag({1, 1, 1}));
  EXPECT_FALSE(hs_diagnostics(m).injective);
}

TEST(HsDiagnostics, MissingDecayDeclaration) {
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(2), diag({1, 1}), diag({1, 1}));
  EXPECT_THROW(hs_diagnostics(m, SpectralDecay{0.0, std::nullopt, 0.0}), InputError);
}

TEST(Sample, ZeroCovariancesGivePrior) {
  const CoeffVector y0(Eigen::Vector3d(4, 0, 0));
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(3), diag({0, 0, 0}),
                                              diag({0, 0, 0}), y0);
  const JointSample s = sample_joint(m, 10, 3);
  EXPECT_EQ(s.u.norm(), 0.0);
  EXPECT_EQ(s.v.norm(), 0.0);
  for (Index k = 0; k < 10; ++k) {
    EXPECT_EQ(s.y.col(k), y0.coeffs());
    EXPECT_EQ(s.x.col(k), y0.coeffs());
  }
}

TEST(Sample, CovarianceBlocksWithinBands) {
  Engine rng = make_engine(5);
  const Eigen::MatrixXd su = hpf::testing::random_spd(rng, 3);
  const GaussianModel m = GaussianModel::make(OperatorRep::dense(standard_normal(rng, 3, 3)), OperatorRep::dense(su),
                                              OperatorRep::dense(hpf::testing::random_spd(rng, 3)));
  const JointCovariance jc = joint_covariance(m);
  const Eigen::MatrixXd q = jc.q_v.to_dense();
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 40000, seed);
        const CovarianceEstimate e = sample_covariance(s.x, s.x);
        return std::pair{e.value, e.std_error};
      },
      q + su);
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 40000, seed);
        const CovarianceEstimate e = sample_covariance(s.x, s.y);
        return std::pair{e.value, e.std_error};
      },
      q);
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 40000, seed);
        const CovarianceEstimate e = sample_covariance(s.u, s.v);
        return std::pair{e.value, e.std_error};
      },
      Eigen::MatrixXd::Zero(3, 3));
}

TEST(Sample, KernelAndRangeNoiseUncorrelatedUnderKernelIndependence) {
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(4), diag({0.5, 1, 2, 3}),
                                              diag({1, 1, 1, 1}));
  ASSERT_TRUE(satisfies_kernel_independence(m));
  const Eigen::MatrixXd pi = m.pinv_bundle.projector_pi.to_dense();
  const Eigen::MatrixXd cp = m.pinv_bundle.projector_complement.to_dense();
  EXPECT_LT((pi * m.sigma_u.to_dense() * pi - pi * m.sigma_u.to_dense()).norm(), 1e-10);
  expect_mostly_within(
      [&](std::uint64_t seed) {
        const JointSample s = sample_joint(m, 40000, seed);
        const CovarianceEstimate e = sample_covariance(pi * s.u, cp * s.u);
        return std::pair{e.value, e.std_error};
      },
      Eigen::MatrixXd::Zero(4, 4));
}

TEST(Sample, Reproducible) {
  const GaussianModel m = GaussianModel::make(OperatorRep::identity(2), diag({1, 2}), diag({3, 4}));
  const JointSample a = sample_joint(m, 3000, 42), b = sample_joint(m, 3000, 42);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(sample_joint(m, 10, 43).x, a.x.leftCols(10));
  // Prefixes agree chunk-wise.
  EXPECT_EQ(sample_joint(m, kSampleChunk, 42).x, a.x.leftCols(kSampleChunk));
}

TEST(Model, CovariancesStayPositiveThroughPipeline) {
  Engine rng = make_engine(9);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd g = standard_normal(rng, 4, 2);
    const GaussianModel m = GaussianModel::make(OperatorRep::dense(standard_normal(rng, 4, 4)),
                                                OperatorRep::dense(g * g.transpose()),
                                                OperatorRep::dense(hpf::testing::random_spd(rng, 4)));
    const OperatorRep q = qv(m);
    for (const OperatorRep& c : {q, m.sigma_u + q}) {
      const Eigen::MatrixXd d = c.to_dense();
      const double floor = -1e-10 * (1.0 + d.norm());
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (d + d.transpose())).eigenvalues()(0), floor);
    }
  }
}

TEST(Model, Validation) {
  Eigen::Matrix2d ns;
  ns << 1, 0.5, 0, 1;
  EXPECT_THROW(GaussianModel::make(OperatorRep::identity(2), OperatorRep::dense(ns), diag({1, 1})), InputError);
  EXPECT_THROW(GaussianModel::make(OperatorRep::identity(2), diag({1, -1}), diag({1, 1})), InputError);
  EXPECT_THROW(GaussianModel::make(OperatorRep::identity(2), diag({1, 1}), diag({1, 1, 1})), InputError);
  EXPECT_THROW(GaussianModel::make(examples::weighted_shift_operator(3), diag({1, 1, 1}), diag({1, 1, 1}),
                                   CoeffVector(Eigen::Vector3d(1, 1, 0))),
               InputError);
}

TEST(Model, CommutatorDetectsCoupling) {
  Eigen::Matrix3d su;
  su << 1, 0.4, 0, 0.4, 1, 0, 0, 0, 1;
  const GaussianModel m = GaussianModel::make(examples::weighted_shift_operator(3), OperatorRep::dense(su),
                                              diag({1, 1, 1}));
  EXPECT_FALSE(satisfies_kernel_independence(m));
  EXPECT_GT(kernel_independence_commutator(m), 0.1);
}

}  // namespace
