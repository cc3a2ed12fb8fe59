#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hpfilter/coeff_vector.hpp"
#include "hpfilter/error.hpp"
#include "hpfilter/operator.hpp"
#include "hpfilter/pinv.hpp"
#include "hpfilter/rng.hpp"
#include "hpfilter/spectral.hpp"

namespace hpf {

namespace detail {

inline double max_abs(const OperatorRep& a) {
  return a.is_diagonal() ? a.multipliers().cwiseAbs().maxCoeff()
                         : a.matrix().cwiseAbs().maxCoeff();
}

/// Eigenvalues of a symmetric operator in ascending order.
inline Eigen::VectorXd symmetric_eigenvalues(const OperatorRep& a) {
  if (a.is_diagonal()) {
    Eigen::VectorXd ev = a.multipliers();
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const Eigen::MatrixXd& m = a.matrix();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (m + m.transpose()),
                                                        Eigen::EigenvaluesOnly)
      .eigenvalues();
}

inline void check_covariance(const OperatorRep& c, const char* name) {
  if (c.rows() != c.cols() || c.domain_basis() != c.codomain_basis())
    throw InputError(std::string(name) + " must be a square operator on one space");
  const double scale = std::max(1.0, max_abs(c));
  if (!is_symmetric(c, 1e-12 * scale))
    throw InputError(std::string(name) + " is not symmetric");
  const Eigen::VectorXd ev = symmetric_eigenvalues(c);
  if (ev(0) < -1e-12 * scale)
    throw InputError(std::string(name) + " has negative eigenvalue " + std::to_string(ev(0)));
}

/// Applies f to the eigenvalues of a symmetric operator.
template <typename F>
OperatorRep spectral_map(const OperatorRep& c, F f) {
  if (c.is_diagonal()) return OperatorRep::diagonal(c.multipliers().unaryExpr(f), c.domain_basis());
  const Eigen::MatrixXd& m = c.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd mapped = eig.eigenvalues().unaryExpr(f);
  return OperatorRep::dense(eig.eigenvectors() * mapped.asDiagonal() *
                                eig.eigenvectors().transpose(),
                            c.domain_basis());
}

}  // namespace detail

/// Symmetric square root of a covariance; eigenvalues below zero from
/// round-off are clipped.
inline OperatorRep covariance_sqrt(const OperatorRep& c) {
  return detail::spectral_map(c, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

/// Result of inverting a symmetric PSD operator on its numerically nonzero
/// spectrum (eigenvalues > 1e-12 * largest).
struct SymmetricInverse {
  OperatorRep inverse;
  bool rank_deficient = false;
};

/// Generalized inverse of a symmetric PSD operator raised to `power`
/// (power = 1 gives the inverse, 0.5 the inverse square root).
inline SymmetricInverse symmetric_pinv(const OperatorRep& c, double power = 1.0) {
  const Eigen::VectorXd ev = detail::symmetric_eigenvalues(c);
  const double top = std::max(ev(ev.size() - 1), 0.0);
  const double cutoff = 1e-12 * top;
  bool deficient = !(ev(0) > cutoff);
  auto inv = [cutoff, power](double l) { return l > cutoff ? std::pow(l, -power) : 0.0; };
  return {detail::spectral_map(c, inv), deficient};
}

/// Stochastic model x = y0 + A^+ v + u with independent centred Gaussian u, v.
///
/// sigma_v is only meaningful on Ran(A): components of v orthogonal to the
/// range are never sampled and A^+ annihilates them.
struct GaussianModel {
  OperatorRep A;
  PinvBundle pinv_bundle;
  OperatorRep sigma_u;
  OperatorRep sigma_v;
  CoeffVector y0;

  static GaussianModel make(OperatorRep a, OperatorRep sigma_u, OperatorRep sigma_v,
                            std::optional<CoeffVector> y0 = std::nullopt,
                            std::optional<double> rcond = std::nullopt) {
    if (sigma_u.rows() != a.cols() || sigma_u.domain_basis() != a.domain_basis())
      throw InputError("sigma_u must act on the domain of A");
    if (sigma_v.rows() != a.rows() || sigma_v.domain_basis() != a.codomain_basis())
      throw InputError("sigma_v must act on the codomain of A");
    detail::check_covariance(sigma_u, "sigma_u");
    detail::check_covariance(sigma_v, "sigma_v");
    CoeffVector kernel_part = y0.value_or(CoeffVector::zeros(a.cols(), a.domain_basis()));
    if (kernel_part.dim() != a.cols() || kernel_part.basis() != a.domain_basis())
      throw InputError("y0 must live in the domain of A");
    PinvBundle bundle = pinv(a, rcond);
    const double leak = apply(bundle.projector_pi, kernel_part).norm();
    if (leak > 1e-10 * (1.0 + kernel_part.norm()))
      throw InputError("y0 must lie in Ker(A); |Pi y0| = " + std::to_string(leak));
    return GaussianModel{std::move(a), std::move(bundle), std::move(sigma_u), std::move(sigma_v),
                         std::move(kernel_part)};
  }

  Index dim() const { return A.cols(); }
};

/// |Pi Sigma_u - Sigma_u Pi|_F; zero exactly when Pi u and (I - Pi) u are
/// independent.
inline double kernel_independence_commutator(const GaussianModel& m) {
  const OperatorRep& pi = m.pinv_bundle.projector_pi;
  return frobenius_distance(compose(pi, m.sigma_u), compose(m.sigma_u, pi));
}

inline bool satisfies_kernel_independence(const GaussianModel& m, double tol = 1e-10) {
  return kernel_independence_commutator(m) <= tol;
}

/// Q_v = A^+ Sigma_v (A^+)^*, the covariance of the signal component A^+ v.
inline OperatorRep qv(const GaussianModel& m) {
  const OperatorRep& x = m.pinv_bundle.pinv;
  return compose(x, compose(m.sigma_v, adjoint(x)));
}

/// Covariance of v after restriction to Ran(A): P Sigma_v P.
inline OperatorRep range_covariance(const GaussianModel& m) {
  const OperatorRep& p = m.pinv_bundle.range_projector;
  return compose(p, compose(m.sigma_v, p));
}

/// Covariance of the pair (x, y):
///   [[Sigma_u + Q_v, Q_v], [Q_v, Q_v]].
struct JointCovariance {
  OperatorRep q_v;
  std::array<std::array<OperatorRep, 2>, 2> block;

  Eigen::MatrixXd assembled() const {
    const Index n = q_v.rows();
    Eigen::MatrixXd out(2 * n, 2 * n);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) out.block(r * n, c * n, n, n) = block[r][c].to_dense();
    return out;
  }
};

inline JointCovariance joint_covariance(const GaussianModel& m) {
  OperatorRep q = qv(m);
  OperatorRep top = m.sigma_u + q;
  return JointCovariance{q, {{{top, q}, {q, q}}}};
}

/// The linear map x - y0 -> E[y|x] - y0, i.e. Q_v (Sigma_u + Q_v)^{-1}.
struct ConditionalSlope {
  OperatorRep slope;
  /// Set when Sigma_u + Q_v is singular at working precision and a
  /// generalized inverse was used.
  bool rank_deficient = false;
};

inline ConditionalSlope conditional_slope(const GaussianModel& m) {
  const OperatorRep q = qv(m);
  const SymmetricInverse inv = symmetric_pinv(m.sigma_u + q);
  return {compose(q, inv.inverse), inv.rank_deficient};
}

struct ConditionalMean {
  CoeffVector value;
  bool rank_deficient = false;
};

/// E[y|x] = y0 + Q_v (Sigma_u + Q_v)^{-1} (x - y0).
inline ConditionalMean conditional_mean(const GaussianModel& m, const CoeffVector& x) {
  const ConditionalSlope s = conditional_slope(m);
  return {m.y0 + apply(s.slope, x - m.y0), s.rank_deficient};
}

struct HsReport {
  double trace_qv = 0.0;
  double trace_sigma_u = 0.0;
  /// Frobenius norm of T = Q_v (Sigma_u + Q_v)^{-1/2}.
  double hs_norm_t = 0.0;
  /// False when Sigma_u + Q_v has a (numerically) zero eigenvalue.
  bool injective = true;
  /// Verdicts for the untruncated sequences, from declared decay exponents.
  std::optional<bool> qv_trace_class;
  std::optional<bool> sigma_u_trace_class;
  std::optional<bool> t_hilbert_schmidt;
};

inline double trace(const OperatorRep& a) {
  return a.is_diagonal() ? a.multipliers().sum() : a.matrix().trace();
}

/// Trace and Hilbert-Schmidt diagnostics at the current truncation. With
/// declared exponents, also decides summability of the full sequences:
/// q_j ~ j^-(d_v + p_kappa), t_j = q_j / sqrt(sigma^u_j + q_j).
inline HsReport hs_diagnostics(const GaussianModel& m,
                               const std::optional<SpectralDecay>& decay = std::nullopt) {
  HsReport r;
  const OperatorRep q = qv(m);
  r.trace_qv = trace(q);
  r.trace_sigma_u = trace(m.sigma_u);
  const SymmetricInverse isqrt = symmetric_pinv(m.sigma_u + q, 0.5);
  r.injective = !isqrt.rank_deficient;
  r.hs_norm_t = frobenius_norm(compose(q, isqrt.inverse));
  if (decay) {
    const double du = decay->require(decay->sigma_u, "sigma_u");
    const double dv = decay->require(decay->sigma_v, "sigma_v");
    const double pk = decay->require(decay->kappa, "kappa");
    const double eq = dv + pk;
    const double et = eq - 0.5 * std::min(du, eq);
    r.qv_trace_class = summable(eq);
    r.sigma_u_trace_class = summable(du);
    r.t_hilbert_schmidt = 2.0 * et > 1.0;
  }
  return r;
}

/// Draws stored column-wise: column k of each matrix is draw k.
struct JointSample {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;

  Index count() const { return x.cols(); }
};

/// Draws per substream in sample_joint.
inline constexpr Index kSampleChunk = 1024;

/// Samples (u, v, y, x) with u ~ N(0, Sigma_u), v ~ N(0, P Sigma_v P),
/// y = y0 + A^+ v, x = y + u. Chunk k of kSampleChunk draws uses
/// substream_seed(seed, k), so the output depends only on (seed, count).
inline JointSample sample_joint(const GaussianModel& m, Index count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample_joint: count must be >= 1");
  const Eigen::MatrixXd su = covariance_sqrt(m.sigma_u).to_dense();
  const Eigen::MatrixXd sv = covariance_sqrt(range_covariance(m)).to_dense();
  const Eigen::MatrixXd ap = m.pinv_bundle.pinv.to_dense();
  const Index n1 = m.A.cols();
  const Index n2 = m.A.rows();

  JointSample s;
  s.u.resize(n1, count);
  s.v.resize(n2, count);
  for (Index start = 0, chunk = 0; start < count; start += kSampleChunk, ++chunk) {
    const Index len = std::min(kSampleChunk, count - start);
    Engine rng = make_engine(seed, static_cast<std::uint64_t>(chunk));
    const Eigen::MatrixXd zu = standard_normal(rng, n1, len);
    const Eigen::MatrixXd zv = standard_normal(rng, n2, len);
    s.u.middleCols(start, len) = su * zu;
    s.v.middleCols(start, len) = sv * zv;
  }
  s.y = (ap * s.v).colwise() + m.y0.coeffs();
  s.x = s.y + s.u;
  return s;
}

}  // namespace hpf
