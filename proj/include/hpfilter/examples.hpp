#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hpfilter/operator.hpp"

namespace hpf::examples {

// Example 1: A(x_1, x_2, x_3, ...) = (0, 2 x_2, 3 x_3, ...) on l^2.

inline OperatorRep weighted_shift_operator(Index dim) {
  Eigen::VectorXd m(dim);
  m(0) = 0.0;
  for (Index j = 2; j <= dim; ++j) m(j - 1) = static_cast<double>(j);
  return OperatorRep::diagonal(std::move(m));
}

/// b_1 = 0, b_j = sigma^u_j / sigma^v_j for j >= 2.
inline Eigen::VectorXd weighted_shift_bhat(const Eigen::VectorXd& sigma_u,
                                           const Eigen::VectorXd& sigma_v) {
  Eigen::VectorXd b = sigma_u.cwiseQuotient(sigma_v);
  b(0) = 0.0;
  return b;
}

/// 1 for j = 1, 1 / (j^2 b_j + 1) for j >= 2.
inline Eigen::VectorXd weighted_shift_filter(const Eigen::VectorXd& bhat) {
  Eigen::VectorXd f(bhat.size());
  f(0) = 1.0;
  for (Index j = 2; j <= bhat.size(); ++j)
    f(j - 1) = 1.0 / (static_cast<double>(j * j) * bhat(j - 1) + 1.0);
  return f;
}

// Example 2: A = -d^2/dt^2 on [0,1] with Dirichlet conditions; eigenpairs
// lambda_n = n^2 pi^2, e_n(t) = sqrt(2) sin(n pi t).

inline double laplacian_eigenvalue(Index n) {
  const double k = static_cast<double>(n) * std::numbers::pi;
  return k * k;
}

inline OperatorRep dirichlet_laplacian(Index dim) {
  Eigen::VectorXd m(dim);
  for (Index n = 1; n <= dim; ++n) m(n - 1) = laplacian_eigenvalue(n);
  return OperatorRep::diagonal(std::move(m), BasisId::sine_dirichlet());
}

/// Green function of the Dirichlet Laplacian: the kernel of A^{-1}.
inline double dirichlet_green(double t, double s) {
  return s <= t ? (1.0 - t) * s : t * (1.0 - s);
}

inline OperatorRep dirichlet_green_operator(Index dim, Index grid_points = OperatorRep::kDefaultGridPoints) {
  return OperatorRep::kernel("dirichlet_green", dirichlet_green, dim, grid_points);
}

/// (1 + n^4 pi^4 sigma^u_n / sigma^v_n)^{-1}.
inline Eigen::VectorXd laplacian_filter(const Eigen::VectorXd& ratio) {
  Eigen::VectorXd f(ratio.size());
  for (Index n = 1; n <= ratio.size(); ++n) {
    const double l = laplacian_eigenvalue(n);
    f(n - 1) = 1.0 / (1.0 + l * l * ratio(n - 1));
  }
  return f;
}

}  // namespace hpf::examples
