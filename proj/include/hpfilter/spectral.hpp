#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hpfilter/basis.hpp"
#include "hpfilter/error.hpp"

namespace hpf {

/// sigma_j = scale * j^(-exponent), j = 1..dim.
inline Eigen::VectorXd power_decay(double scale, double exponent, Index dim) {
  if (dim < 1) throw DimensionError("power_decay: dim must be >= 1");
  Eigen::VectorXd out(dim);
  for (Index j = 1; j <= dim; ++j) out(j - 1) = scale * std::pow(static_cast<double>(j), -exponent);
  return out;
}

/// Declared asymptotic exponents of a spectral model:
///   sigma^u_j ~ j^(-sigma_u), sigma^v_j ~ j^(-sigma_v), kappa_j ~ j^(kappa).
/// kappa is the growth exponent of the eigenvalues of (A^+ A^+*)^{-1}, i.e.
/// twice the growth exponent of the singular values of A.
struct SpectralDecay {
  std::optional<double> sigma_u;
  std::optional<double> sigma_v;
  std::optional<double> kappa;

  double require(const std::optional<double>& v, const char* name) const {
    if (!v) throw InputError(std::string("missing decay declaration: ") + name);
    return *v;
  }
};

/// sum_j j^(-decay) converges iff decay > 1.
inline bool summable(double decay) { return decay > 1.0; }

/// Partial sum of term(j) for j = 1..n, summed from the smallest term up.
inline double partial_sum(const std::function<double(Index)>& term, Index n) {
  double s = 0.0;
  for (Index j = n; j >= 1; --j) s += term(j);
  return s;
}

/// (S(2N) - S(N)) / S(N): small for convergent power-law series, order one
/// for divergent ones.
inline double partial_sum_growth(const std::function<double(Index)>& term, Index n) {
  const double s1 = partial_sum(term, n);
  const double s2 = partial_sum(term, 2 * n);
  return (s2 - s1) / s1;
}

}  // namespace hpf
