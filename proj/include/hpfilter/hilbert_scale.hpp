#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/optimal_smoothing.hpp"
#include "hpfilter/pinv.hpp"
#include "hpfilter/spectral.hpp"

namespace hpf {

/// Weights of the Hilbert scale generated by K1 = (A^+ A^+*)^{-1} on Ran(A^*),
/// for a spectral (diagonal) operator A.
///
/// Component j of the range carries kappa_j = s_j^2, s_j the j-th nonzero
/// singular value of A, and weight kappa_j^n. Components in Ker(A) lie
/// outside the scale: they have zero H^{-n} norm and are ignored by the
/// H^n norm.
struct ScaleWeights {
  int n = 0;
  std::vector<Index> components;
  Eigen::VectorXd kappa;
  Eigen::VectorXd weights;
  std::optional<double> decay_exponent;

  /// |K1^n h|
  double norm_positive(const CoeffVector& h) const {
    double s = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const double t = weights(static_cast<Index>(i)) * h[components[i]];
      s += t * t;
    }
    return std::sqrt(s);
  }

  /// |K1^{-n} h|
  double norm_negative(const CoeffVector& h) const {
    double s = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const double t = h[components[i]] / weights(static_cast<Index>(i));
      s += t * t;
    }
    return std::sqrt(s);
  }
};

inline ScaleWeights scale_weights(const OperatorRep& a, int n,
                                  std::optional<double> decay_exponent = std::nullopt) {
  if (n < 0) throw InputError("scale_weights: scale index must be >= 0");
  if (!a.is_diagonal())
    throw InputError("scale_weights needs a spectral operator; pre-diagonalize A (compute its "
                     "SVD and pass the singular values as a diagonal operator)");
  const PinvBundle b = pinv(a);
  const Eigen::VectorXd& mult = a.multipliers();
  const Eigen::VectorXd& keep = b.projector_pi.multipliers();
  ScaleWeights w;
  w.n = n;
  w.decay_exponent = decay_exponent;
  for (Index j = 0; j < mult.size(); ++j)
    if (keep(j) == 1.0) w.components.push_back(j);
  const Index r = static_cast<Index>(w.components.size());
  w.kappa.resize(r);
  w.weights.resize(r);
  for (Index i = 0; i < r; ++i) {
    const double s = mult(w.components[static_cast<std::size_t>(i)]);
    w.kappa(i) = s * s;
    w.weights(i) = std::pow(w.kappa(i), n);
  }
  return w;
}

namespace detail {

inline OperatorRep power(const OperatorRep& g, int n) {
  OperatorRep out = g;
  for (int k = 1; k < n; ++k) out = compose(out, g);
  return out;
}

}  // namespace detail

struct RescaledCovariances {
  OperatorRep sigma_u;
  OperatorRep sigma_v;
};

/// Sigma_u~ = G1^n Sigma_u G1^n and Sigma_v~ = G2^n Sigma_v G2^n with
/// G1 = A^+ A^+* on H1 and G2 = A^+* A^+ on H2. At n = 0 the inputs are
/// returned unchanged.
inline RescaledCovariances rescaled_covariances(const GaussianModel& m, int n) {
  if (n < 0) throw InputError("rescaled_covariances: scale index must be >= 0");
  if (n == 0) return {m.sigma_u, m.sigma_v};
  const OperatorRep& x = m.pinv_bundle.pinv;
  const OperatorRep g1 = detail::power(compose(x, adjoint(x)), n);
  const OperatorRep g2 = detail::power(compose(adjoint(x), x), n);
  return {compose(g1, compose(m.sigma_u, g1)), compose(g2, compose(m.sigma_v, g2))};
}

/// The model seen in the scaled spaces: rescaled covariances and zero mean,
/// since y0 has zero norm there.
inline GaussianModel scaled_model(const GaussianModel& m, int n) {
  RescaledCovariances rc = rescaled_covariances(m, n);
  GaussianModel out = m;
  out.sigma_u = std::move(rc.sigma_u);
  out.sigma_v = std::move(rc.sigma_v);
  if (n > 0) out.y0 = CoeffVector::zeros(m.dim(), m.A.domain_basis());
  return out;
}

/// Least scale index n0 >= 0 such that the rescaled covariances (and the
/// rescaled Q_v) have summable spectra, i.e. d_u + 2 n p > 1 and
/// d_v + 2 n p > 1 with p the growth exponent of kappa. nullopt when no
/// finite n works.
inline std::optional<int> trace_class_threshold(const SpectralDecay& decay) {
  const double du = decay.require(decay.sigma_u, "sigma_u");
  const double dv = decay.require(decay.sigma_v, "sigma_v");
  const double pk = decay.require(decay.kappa, "kappa");
  auto ok = [&](int n) {
    return summable(du + 2.0 * n * pk) && summable(dv + 2.0 * n * pk) &&
           summable(dv + (2.0 * n + 1.0) * pk);
  };
  if (ok(0)) return 0;
  if (!(pk > 0.0)) return std::nullopt;
  const double worst = std::min(du, dv);
  int n = static_cast<int>(std::ceil((1.0 - worst) / (2.0 * pk)));
  n = std::max(n, 0);
  while (!ok(n)) ++n;
  return n;
}

/// Optimal smoother of the scaled problem, (A^+)^* Sigma_u~ A^* Sigma_v~^{-1}.
inline OperatorRep scaled_optimal_b(const GaussianModel& m, int n) {
  return optimal_b(scaled_model(m, n));
}

}  // namespace hpf
