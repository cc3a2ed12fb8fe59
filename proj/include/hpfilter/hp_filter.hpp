#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hpfilter/coeff_vector.hpp"
#include "hpfilter/error.hpp"
#include "hpfilter/operator.hpp"
#include "hpfilter/rng.hpp"

namespace hpf {

/// One instance of the penalized trend problem
///   min_y |x - y|^2 + <Ay, B A y>.
struct FilterProblem {
  OperatorRep A;
  CoeffVector x;
  OperatorRep B;
};

namespace detail {

inline void check_smoother_shape(const OperatorRep& a, const OperatorRep& b) {
  if (b.rows() != a.rows() || b.cols() != a.rows())
    throw DimensionError("smoothing operator must be square on the codomain of A (dim " +
                         std::to_string(a.rows()) + ")");
  if (b.domain_basis() != a.codomain_basis() || b.codomain_basis() != a.codomain_basis())
    throw BasisError("smoothing operator basis must match the codomain basis of A");
}

inline void check_problem(const FilterProblem& p) {
  if (p.x.dim() != p.A.cols())
    throw DimensionError("observation dim " + std::to_string(p.x.dim()) +
                         " does not match operator input dim " + std::to_string(p.A.cols()));
  if (p.x.basis() != p.A.domain_basis())
    throw BasisError("observation basis does not match operator domain basis");
  check_smoother_shape(p.A, p.B);
}

}  // namespace detail

/// A^* B A as an operator on the domain of A.
inline OperatorRep penalty_operator(const OperatorRep& a, const OperatorRep& b) {
  detail::check_smoother_shape(a, b);
  return compose(adjoint(a), compose(b, a));
}

inline double objective(const FilterProblem& p, const CoeffVector& y) {
  detail::check_problem(p);
  y.require_compatible(p.x, "objective");
  const CoeffVector ay = apply(p.A, y);
  return (p.x - y).squared_norm() + ay.dot(apply(p.B, ay));
}

struct PositivityReport {
  bool pass = false;
  /// True when positivity followed from structure (nonnegative diagonal B).
  bool analytic = false;
  /// Smallest <Ah, BAh> found over unit vectors h; 0 for analytic passes.
  double min_value = 0.0;
  /// Unit vector attaining min_value (empirical path only).
  std::optional<Eigen::VectorXd> witness;
  int trials = 0;
};

/// Checks <Ah, BAh> >= 0. Nonnegative diagonal B passes analytically.
/// Otherwise the form is evaluated on `trials` seeded random unit vectors and
/// on the eigenvectors of the symmetric part of A^* B A.
inline PositivityReport positivity_check(const OperatorRep& a, const OperatorRep& b, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) throw InputError("positivity_check: trials must be >= 1");
  detail::check_smoother_shape(a, b);
  PositivityReport rep;
  rep.trials = trials;
  if (b.is_diagonal() && (b.multipliers().array() >= 0.0).all()) {
    rep.pass = true;
    rep.analytic = true;
    return rep;
  }

  const Eigen::MatrixXd m = penalty_operator(a, b).to_dense();
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  rep.min_value = eig.eigenvalues()(0);
  rep.witness = eig.eigenvectors().col(0);

  Engine rng = make_engine(seed);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd h = standard_normal(rng, m.cols());
    const double nh = h.norm();
    if (nh == 0.0) continue;
    h /= nh;
    const double q = h.dot(m * h);
    if (q < rep.min_value) {
      rep.min_value = q;
      rep.witness = h;
    }
  }
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  rep.pass = rep.min_value >= -1e-12 * scale;
  return rep;
}

/// (I + A^* B A)^{-1} as an operator; diagonal when A and B are.
inline OperatorRep filter_operator(const OperatorRep& a, const OperatorRep& b) {
  const OperatorRep pen = penalty_operator(a, b);
  if (pen.is_diagonal())
    return OperatorRep::diagonal((1.0 + pen.multipliers().array()).inverse().matrix(),
                                 pen.domain_basis());
  const Index n = pen.cols();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + pen.matrix();
  return OperatorRep::dense(m.partialPivLu().inverse(), pen.domain_basis());
}

/// Unique minimizer y(B, x) = (I + A^* B A)^{-1} x. Requires B to pass the
/// positivity check; throws PositivityError otherwise.
inline CoeffVector solve_filter(const FilterProblem& p) {
  detail::check_problem(p);
  const PositivityReport pos = positivity_check(p.A, p.B, 16, 0);
  if (!pos.pass)
    throw PositivityError("smoothing operator violates <Ah, BAh> >= 0 (minimum " +
                          std::to_string(pos.min_value) + ")");

  const OperatorRep pen = penalty_operator(p.A, p.B);
  if (pen.is_diagonal()) {
    Eigen::VectorXd y = p.x.coeffs().array() / (1.0 + pen.multipliers().array());
    return CoeffVector(std::move(y), p.x.basis());
  }

  const Index n = pen.cols();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + pen.matrix();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd& x = p.x.coeffs();
  Eigen::VectorXd y = lu.solve(x);
  // one step of iterative refinement
  y += lu.solve(x - m * y);
  const double res = (m * y - x).norm();
  if (!(res <= 1e-10 * x.norm())) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1)
                                        : std::numeric_limits<double>::infinity();
    throw InternalError("solve_filter: residual " + std::to_string(res) + " exceeds tolerance; " +
                        "cond(I + A*BA) = " + std::to_string(cond));
  }
  return CoeffVector(std::move(y), p.x.basis());
}

}  // namespace hpf
