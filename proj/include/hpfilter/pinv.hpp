#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "hpfilter/operator.hpp"

namespace hpf {

/// Moore-Penrose inverse of an operator together with the projector algebra
/// built from it.
struct PinvBundle {
  OperatorRep pinv;
  Index numerical_rank = 0;
  /// Absolute cutoff: singular values <= sv_threshold are treated as zero.
  double sv_threshold = 0.0;
  double largest_singular_value = 0.0;
  /// Pi = A^+ A, orthogonal projector onto Ker(A)^perp in the domain.
  OperatorRep projector_pi;
  /// I - Pi, orthogonal projector onto Ker(A).
  OperatorRep projector_complement;
  /// A A^+, orthogonal projector onto Ran(A) in the codomain.
  OperatorRep range_projector;
  /// Orthonormal basis of Ran(A) for dense A; empty for diagonal A, whose
  /// range basis is read off range_projector.
  Eigen::MatrixXd dense_range_basis;

  /// Orthonormal basis of Ran(A) as columns (codomain coordinates).
  Eigen::MatrixXd range_basis() const {
    if (!range_projector.is_diagonal()) return dense_range_basis;
    const Eigen::VectorXd& p = range_projector.multipliers();
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(p.size(), numerical_rank);
    for (Index j = 0, c = 0; j < p.size(); ++j)
      if (p(j) == 1.0) u(j, c++) = 1.0;
    return u;
  }
};

/// Computes A^+ by full SVD. Singular values at or below rcond * sigma_max
/// are discarded; without rcond the cutoff is eps * max(rows, cols) * sigma_max.
/// Diagonal operators are handled component-wise and stay diagonal.
inline PinvBundle pinv(const OperatorRep& a, std::optional<double> rcond = std::nullopt) {
  if (rcond && !(*rcond > 0.0 && *rcond < 1.0))
    throw InputError("pinv: rcond must lie in (0,1)");
  const double eps = std::numeric_limits<double>::epsilon();
  const double rel = rcond.value_or(eps * static_cast<double>(std::max(a.rows(), a.cols())));

  if (a.is_diagonal()) {
    const Eigen::VectorXd& m = a.multipliers();
    const Index n = m.size();
    const double smax = m.cwiseAbs().maxCoeff();
    const double cutoff = rel * smax;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
    Index rank = 0;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(m(j)) > cutoff) {
        inv(j) = 1.0 / m(j);
        pi(j) = 1.0;
        ++rank;
      }
    }
    const BasisId& b = a.domain_basis();
    return PinvBundle{OperatorRep::diagonal(inv, b),
                      rank,
                      cutoff,
                      smax,
                      OperatorRep::diagonal(pi, b),
                      OperatorRep::diagonal(Eigen::VectorXd::Ones(n) - pi, b),
                      OperatorRep::diagonal(pi, b),
                      {}};
  }

  const Eigen::MatrixXd m = a.matrix();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = rel * smax;
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;

  const Eigen::MatrixXd ur = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd vr = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd sinv = s.head(rank).cwiseInverse();
  Eigen::MatrixXd x = vr * sinv.asDiagonal() * ur.transpose();
  Eigen::MatrixXd pi = vr * vr.transpose();
  Eigen::MatrixXd rp = ur * ur.transpose();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.cols(), m.cols());

  const BasisId& dom = a.domain_basis();
  const BasisId& cod = a.codomain_basis();
  return PinvBundle{OperatorRep::dense(std::move(x), cod, dom),
                    rank,
                    cutoff,
                    smax,
                    OperatorRep::dense(pi, dom),
                    OperatorRep::dense(id - pi, dom),
                    OperatorRep::dense(std::move(rp), cod),
                    ur};
}

/// Norms of the four Moore-Penrose defects of x as an inverse of a.
struct MoorePenroseResiduals {
  double axa = 0.0;    // |A X A - A|
  double xax = 0.0;    // |X A X - X|
  double ax_sym = 0.0; // |(A X)* - A X|
  double xa_sym = 0.0; // |(X A)* - X A|

  double max() const { return std::max({axa, xax, ax_sym, xa_sym}); }
};

inline MoorePenroseResiduals moore_penrose_residuals(const OperatorRep& a, const OperatorRep& x) {
  const Eigen::MatrixXd am = a.to_dense();
  const Eigen::MatrixXd xm = x.to_dense();
  const Eigen::MatrixXd ax = am * xm;
  const Eigen::MatrixXd xa = xm * am;
  return {(ax * am - am).norm(), (xa * xm - xm).norm(), (ax.transpose() - ax).norm(),
          (xa.transpose() - xa).norm()};
}

/// Tolerance used for the Moore-Penrose and projector identities.
inline double moore_penrose_tolerance(const OperatorRep& a) {
  return 1e-10 * (1.0 + spectral_norm(a));
}

}  // namespace hpf
