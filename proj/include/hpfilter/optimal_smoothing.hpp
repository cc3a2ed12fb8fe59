#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/hp_filter.hpp"
#include "hpfilter/operator.hpp"

namespace hpf {

/// Inverse of sigma_v on Ran(A), zero on Ran(A)^perp.
///
/// When both A and sigma_v are diagonal the inverse is taken component-wise
/// and every range component must be strictly positive. Otherwise sigma_v is
/// compressed onto an orthonormal basis of Ran(A) and its eigenvalues there
/// must exceed 1e-12 times the largest.
inline OperatorRep range_inverse(const OperatorRep& sigma_v, const PinvBundle& bundle) {
  if (sigma_v.is_diagonal() && bundle.range_projector.is_diagonal()) {
    const Eigen::VectorXd& s = sigma_v.multipliers();
    const Eigen::VectorXd& p = bundle.range_projector.multipliers();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    std::vector<Index> bad;
    for (Index j = 0; j < s.size(); ++j) {
      if (p(j) == 0.0) continue;
      if (std::isnormal(s(j)) && s(j) > 0.0 && std::isfinite(1.0 / s(j)))
        inv(j) = 1.0 / s(j);
      else
        bad.push_back(j);
    }
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "sigma_v is singular on Ran(A) at spectral components";
      for (Index j : bad) msg << ' ' << (j + 1) << " (value " << s(j) << ")";
      throw SingularCovarianceError(msg.str());
    }
    return OperatorRep::diagonal(std::move(inv), sigma_v.domain_basis());
  }

  const Eigen::MatrixXd u = bundle.range_basis();
  const Index n = sigma_v.rows();
  if (u.cols() == 0)
    return OperatorRep::dense(Eigen::MatrixXd::Zero(n, n), sigma_v.domain_basis());
  const Eigen::MatrixXd c = u.transpose() * sigma_v.to_dense() * u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (c + c.transpose()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev(ev.size() - 1);
  std::vector<Index> bad;
  for (Index j = 0; j < ev.size(); ++j)
    if (!(ev(j) > 1e-12 * top) || !(top > 0.0)) bad.push_back(j);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "sigma_v is singular on Ran(A): compressed eigenvalues";
    for (Index j : bad) msg << " #" << (j + 1) << '=' << ev(j);
    msg << " (largest " << top << ")";
    throw SingularCovarianceError(msg.str());
  }
  const Eigen::MatrixXd w = u * eig.eigenvectors();
  return OperatorRep::dense(w * ev.cwiseInverse().asDiagonal() * w.transpose(),
                            sigma_v.domain_basis());
}

/// Optimal smoothing operator B = (A^+)^* Sigma_u A^* Sigma_v^{-1}.
/// Not symmetrized; diagonal inputs give a diagonal result.
inline OperatorRep optimal_b(const GaussianModel& m) {
  const OperatorRep sv_inv = range_inverse(m.sigma_v, m.pinv_bundle);
  return compose(adjoint(m.pinv_bundle.pinv),
                 compose(m.sigma_u, compose(adjoint(m.A), sv_inv)));
}

/// |E[y|x] - y(B, x)|.
inline double gap(const GaussianModel& m, const OperatorRep& b, const CoeffVector& x) {
  const CoeffVector target = conditional_mean(m, x).value;
  return (target - solve_filter({m.A, x, b})).norm();
}

/// Split of E[y|x] - y(B,x) into its Ran(Pi) and Ker(A) parts. The kernel
/// part is untouched by any smoother: y(B,x) keeps (I - Pi) x there.
struct GapParts {
  double total = 0.0;
  double range = 0.0;
  double kernel = 0.0;
};

inline GapParts gap_parts(const GaussianModel& m, const OperatorRep& b, const CoeffVector& x) {
  const CoeffVector d = conditional_mean(m, x).value - solve_filter({m.A, x, b});
  return {d.norm(), apply(m.pinv_bundle.projector_pi, d).norm(),
          apply(m.pinv_bundle.projector_complement, d).norm()};
}

/// Diagonal smoothers whose multipliers at `free_components` are parameters
/// and equal `base` elsewhere.
struct DiagonalFamily {
  Eigen::VectorXd base;
  std::vector<Index> free_components;
  BasisId basis = BasisId::euclidean();

  Index parameter_count() const { return static_cast<Index>(free_components.size()); }

  OperatorRep make(const Eigen::VectorXd& params) const {
    if (params.size() != parameter_count())
      throw DimensionError("DiagonalFamily: wrong parameter count");
    Eigen::VectorXd m = base;
    for (Index i = 0; i < params.size(); ++i) m(free_components[static_cast<std::size_t>(i)]) = params(i);
    return OperatorRep::diagonal(std::move(m), basis);
  }

  Eigen::VectorXd parameters_of(const OperatorRep& b) const {
    Eigen::VectorXd p(parameter_count());
    for (Index i = 0; i < p.size(); ++i)
      p(i) = b.multipliers()(free_components[static_cast<std::size_t>(i)]);
    return p;
  }
};

/// Cartesian lattice of parameter values. Points are enumerated with the
/// first axis varying slowest.
struct ParameterLattice {
  std::vector<Eigen::VectorXd> axes;
  double step = 0.0;

  /// center_i + (k + offset) * step for k = -half..half on every axis.
  static ParameterLattice centered(const Eigen::VectorXd& center, double step, int half,
                                   double offset = 0.0) {
    ParameterLattice lat;
    lat.step = step;
    for (Index i = 0; i < center.size(); ++i) {
      Eigen::VectorXd axis(2 * half + 1);
      for (int k = -half; k <= half; ++k) axis(k + half) = center(i) + (k + offset) * step;
      lat.axes.push_back(std::move(axis));
    }
    return lat;
  }

  Index size() const {
    Index n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
  }

  Eigen::VectorXd point(Index flat) const {
    Eigen::VectorXd p(static_cast<Index>(axes.size()));
    for (Index i = static_cast<Index>(axes.size()) - 1; i >= 0; --i) {
      const auto& a = axes[static_cast<std::size_t>(i)];
      p(i) = a(flat % a.size());
      flat /= a.size();
    }
    return p;
  }
};

struct GridSearchReport {
  Eigen::VectorXd argmin_params;
  Eigen::VectorXd bhat_params;
  double gap_at_argmin = std::numeric_limits<double>::infinity();
  double gap_at_bhat = 0.0;
  double lattice_step = 0.0;
  /// Whether each free parameter changes the filter at all. A parameter on a
  /// component outside Ran(A) is gap-equivalent at every value.
  std::vector<bool> identifiable;
  Index evaluated = 0;
  /// Lattice points skipped because they fail the positivity condition.
  Index rejected = 0;
  /// Lattice points whose average gap ties the minimum.
  Index equivalent = 0;
  bool pass = false;
};

/// Exhaustive search of the lattice for the smoother minimizing the average
/// gap over x_set. Passes when every identifiable parameter of the argmin lies
/// within one lattice step of the corresponding multiplier of optimal_b.
/// Ties are broken by lattice order.
inline GridSearchReport grid_search_oracle(const GaussianModel& m, const DiagonalFamily& family,
                                           const ParameterLattice& lattice,
                                           const std::vector<CoeffVector>& x_set) {
  if (x_set.empty()) throw InputError("grid_search_oracle: x_set is empty");
  if (static_cast<Index>(lattice.axes.size()) != family.parameter_count())
    throw DimensionError("grid_search_oracle: lattice and family dimensions differ");
  const OperatorRep bhat = optimal_b(m);
  if (!bhat.is_diagonal())
    throw InputError("grid_search_oracle: optimal smoother is not diagonal; "
                     "diagonal families cannot contain it");

  GridSearchReport r;
  r.lattice_step = lattice.step;
  r.bhat_params = family.parameters_of(bhat);
  const Eigen::MatrixXd a = m.A.to_dense();
  for (Index c : family.free_components) r.identifiable.push_back(a.row(c).norm() > 0.0);

  std::vector<CoeffVector> targets;
  targets.reserve(x_set.size());
  for (const auto& x : x_set) targets.push_back(conditional_mean(m, x).value);
  auto average_gap = [&](const OperatorRep& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < x_set.size(); ++i)
      s += (targets[i] - solve_filter({m.A, x_set[i], b})).norm();
    return s / static_cast<double>(x_set.size());
  };
  r.gap_at_bhat = average_gap(bhat);

  std::vector<double> gaps(static_cast<std::size_t>(lattice.size()),
                           std::numeric_limits<double>::infinity());
  for (Index k = 0; k < lattice.size(); ++k) {
    const Eigen::VectorXd params = lattice.point(k);
    const OperatorRep b = family.make(params);
    if (!positivity_check(m.A, b, 16, static_cast<std::uint64_t>(k)).pass) {
      ++r.rejected;
      continue;
    }
    ++r.evaluated;
    const double g = average_gap(b);
    gaps[static_cast<std::size_t>(k)] = g;
    if (g < r.gap_at_argmin) {
      r.gap_at_argmin = g;
      r.argmin_params = params;
    }
  }
  if (r.evaluated == 0) return r;

  const double tie = r.gap_at_argmin + 1e-12 * (1.0 + r.gap_at_argmin);
  for (double g : gaps)
    if (g <= tie) ++r.equivalent;

  r.pass = true;
  for (Index i = 0; i < family.parameter_count(); ++i) {
    if (!r.identifiable[static_cast<std::size_t>(i)]) continue;
    if (std::abs(r.argmin_params(i) - r.bhat_params(i)) > lattice.step * (1.0 + 1e-9))
      r.pass = false;
  }
  return r;
}

}  // namespace hpf
