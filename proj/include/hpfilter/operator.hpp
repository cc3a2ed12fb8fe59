#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hpfilter/basis.hpp"
#include "hpfilter/coeff_vector.hpp"
#include "hpfilter/error.hpp"

namespace hpf {

enum class OperatorKind { dense, diagonal, kernel };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::dense: return "dense";
    case OperatorKind::diagonal: return "diagonal";
    case OperatorKind::kernel: return "kernel";
  }
  return "unknown";
}

using KernelFn = std::function<double(double, double)>;

struct KernelData {
  std::string name;
  KernelFn fn;
  QuadGrid grid;
};

/// Linear operator between finite truncations of two Hilbert spaces.
///
/// Three representations are kept:
///  - dense: an explicit rows() x cols() matrix;
///  - diagonal: a multiplier sequence in a shared spectral basis;
///  - kernel: an integral operator on [0,1], discretized once by the trapezoid
///    rule into its Galerkin matrix in the sine basis.
///
/// Values are immutable. Diagonal operators stay diagonal under every
/// operation that preserves the structure; promotion to dense only happens
/// through to_dense() or operations documented to materialize.
class OperatorRep {
 public:
  static constexpr Index kDefaultGridPoints = 512;

  static OperatorRep dense(Eigen::MatrixXd m, BasisId domain, BasisId codomain) {
    if (m.rows() < 1 || m.cols() < 1) throw DimensionError("dense operator must be non-empty");
    OperatorRep op(OperatorKind::dense, std::move(domain), std::move(codomain));
    op.matrix_ = std::move(m);
    return op;
  }
  static OperatorRep dense(Eigen::MatrixXd m, const BasisId& basis = BasisId::euclidean()) {
    return dense(std::move(m), basis, basis);
  }

  static OperatorRep diagonal(Eigen::VectorXd multipliers, BasisId basis = BasisId::euclidean()) {
    if (multipliers.size() < 1) throw DimensionError("diagonal operator must be non-empty");
    OperatorRep op(OperatorKind::diagonal, basis, basis);
    op.multipliers_ = std::move(multipliers);
    return op;
  }

  static OperatorRep identity(Index dim, BasisId basis = BasisId::euclidean()) {
    return diagonal(Eigen::VectorXd::Ones(dim), std::move(basis));
  }

  /// Integral operator (Kx)(t) = int_0^1 k(t,s) x(s) ds acting on the first
  /// `dim` sine coefficients, discretized on `grid_points` trapezoid nodes.
  static OperatorRep kernel(std::string name, KernelFn fn, Index dim,
                            Index grid_points = kDefaultGridPoints) {
    if (dim < 1) throw DimensionError("kernel operator needs dim >= 1");
    auto data = std::make_shared<KernelData>();
    data->name = std::move(name);
    data->fn = std::move(fn);
    data->grid = QuadGrid::trapezoid(grid_points);
    if (dim >= grid_points - 1)
      throw DimensionError("kernel grid of " + std::to_string(grid_points) +
                           " points cannot resolve " + std::to_string(dim) + " sine modes");

    const auto& g = data->grid;
    const Index m = g.size();
    Eigen::MatrixXd samples(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index k = 0; k < m; ++k) samples(i, k) = data->fn(g.nodes(i), g.nodes(k));
    const Eigen::MatrixXd we = g.weights.asDiagonal() * sine_mode_matrix(g.nodes, dim);

    OperatorRep op(OperatorKind::kernel, BasisId::sine_dirichlet(), BasisId::sine_dirichlet());
    op.matrix_ = we.transpose() * samples * we;
    op.kernel_ = std::move(data);
    return op;
  }

  OperatorKind kind() const { return kind_; }
  bool is_diagonal() const { return kind_ == OperatorKind::diagonal; }

  /// Output dimension.
  Index rows() const { return is_diagonal() ? multipliers_.size() : matrix_.rows(); }
  /// Input dimension.
  Index cols() const { return is_diagonal() ? multipliers_.size() : matrix_.cols(); }

  const BasisId& domain_basis() const { return domain_; }
  const BasisId& codomain_basis() const { return codomain_; }

  const Eigen::VectorXd& multipliers() const {
    if (!is_diagonal()) throw InputError("multipliers() requires a diagonal operator");
    return multipliers_;
  }

  /// The explicit matrix of a dense operator, or the Galerkin matrix of a kernel.
  const Eigen::MatrixXd& matrix() const {
    if (is_diagonal()) throw InputError("matrix() is not available on a diagonal operator");
    return matrix_;
  }

  const KernelData& kernel_data() const {
    if (!kernel_) throw InputError("kernel_data() requires a kernel operator");
    return *kernel_;
  }

  Eigen::MatrixXd to_dense() const {
    if (is_diagonal()) return multipliers_.asDiagonal();
    return matrix_;
  }

 private:
  friend OperatorRep adjoint(const OperatorRep&);

  OperatorRep(OperatorKind kind, BasisId domain, BasisId codomain)
      : kind_(kind), domain_(std::move(domain)), codomain_(std::move(codomain)) {}

  OperatorKind kind_;
  BasisId domain_;
  BasisId codomain_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd multipliers_;
  std::shared_ptr<const KernelData> kernel_;
};

inline CoeffVector apply(const OperatorRep& t, const CoeffVector& x) {
  if (x.dim() != t.cols())
    throw DimensionError("apply: operator expects dim " + std::to_string(t.cols()) + ", got " +
                         std::to_string(x.dim()));
  if (x.basis() != t.domain_basis())
    throw BasisError("apply: operator domain basis is " + t.domain_basis().name() +
                     ", vector basis is " + x.basis().name());
  if (t.is_diagonal())
    return CoeffVector(t.multipliers().cwiseProduct(x.coeffs()), t.codomain_basis());
  return CoeffVector(t.matrix() * x.coeffs(), t.codomain_basis());
}

inline OperatorRep adjoint(const OperatorRep& t) {
  switch (t.kind()) {
    case OperatorKind::diagonal:
      return t;
    case OperatorKind::dense:
      return OperatorRep::dense(t.matrix().transpose(), t.codomain_basis(), t.domain_basis());
    case OperatorKind::kernel: {
      const Eigen::MatrixXd& m = t.matrix();
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if ((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale) return t;
      const KernelData& k = t.kernel_data();
      auto data = std::make_shared<KernelData>();
      data->name = k.name + "*";
      data->fn = [f = k.fn](double a, double b) { return f(b, a); };
      data->grid = k.grid;
      OperatorRep out(OperatorKind::kernel, t.codomain_basis(), t.domain_basis());
      out.matrix_ = m.transpose();
      out.kernel_ = std::move(data);
      return out;
    }
  }
  throw InternalError("adjoint: unknown operator kind");
}

/// s o t. Diagonal o diagonal stays diagonal; anything else materializes dense.
inline OperatorRep compose(const OperatorRep& s, const OperatorRep& t) {
  if (s.cols() != t.rows())
    throw DimensionError("compose: inner dimensions differ (" + std::to_string(s.cols()) +
                         " vs " + std::to_string(t.rows()) + ")");
  if (s.domain_basis() != t.codomain_basis())
    throw BasisError("compose: inner bases differ (" + s.domain_basis().name() + " vs " +
                     t.codomain_basis().name() + ")");
  if (s.is_diagonal() && t.is_diagonal())
    return OperatorRep::diagonal(s.multipliers().cwiseProduct(t.multipliers()),
                                 t.domain_basis());
  Eigen::MatrixXd m;
  if (s.is_diagonal())
    m = s.multipliers().asDiagonal() * t.matrix();
  else if (t.is_diagonal())
    m = s.matrix() * t.multipliers().asDiagonal();
  else
    m = s.matrix() * t.matrix();
  return OperatorRep::dense(std::move(m), t.domain_basis(), s.codomain_basis());
}

inline void require_same_shape(const OperatorRep& a, const OperatorRep& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": operator shapes differ");
  if (a.domain_basis() != b.domain_basis() || a.codomain_basis() != b.codomain_basis())
    throw BasisError(std::string(what) + ": operator bases differ");
}

/// alpha*a + beta*b, diagonal when both inputs are.
inline OperatorRep linear_combination(double alpha, const OperatorRep& a, double beta,
                                      const OperatorRep& b) {
  require_same_shape(a, b, "linear_combination");
  if (a.is_diagonal() && b.is_diagonal())
    return OperatorRep::diagonal(alpha * a.multipliers() + beta * b.multipliers(),
                                 a.domain_basis());
  return OperatorRep::dense(alpha * a.to_dense() + beta * b.to_dense(), a.domain_basis(),
                            a.codomain_basis());
}

inline OperatorRep operator+(const OperatorRep& a, const OperatorRep& b) {
  return linear_combination(1.0, a, 1.0, b);
}
inline OperatorRep operator-(const OperatorRep& a, const OperatorRep& b) {
  return linear_combination(1.0, a, -1.0, b);
}
inline OperatorRep operator*(double c, const OperatorRep& a) {
  if (a.is_diagonal()) return OperatorRep::diagonal(c * a.multipliers(), a.domain_basis());
  return OperatorRep::dense(c * a.matrix(), a.domain_basis(), a.codomain_basis());
}

inline double frobenius_norm(const OperatorRep& a) {
  return a.is_diagonal() ? a.multipliers().norm() : a.matrix().norm();
}

inline double frobenius_distance(const OperatorRep& a, const OperatorRep& b) {
  return frobenius_norm(a - b);
}

/// Largest singular value.
inline double spectral_norm(const OperatorRep& a) {
  if (a.is_diagonal()) return a.multipliers().cwiseAbs().maxCoeff();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a.matrix()).singularValues()(0);
}

inline bool is_symmetric(const OperatorRep& a, double tol) {
  if (a.is_diagonal()) return true;
  if (a.rows() != a.cols() || a.domain_basis() != a.codomain_basis()) return false;
  return (a.matrix() - a.matrix().transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace hpf
