#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hpfilter/error.hpp"

namespace hpf {

using Index = Eigen::Index;

/// Identifier of the orthonormal basis a coefficient vector is expressed in.
/// Two bases are the same iff their names compare equal.
class BasisId {
 public:
  BasisId() : name_(kEuclidean) {}
  explicit BasisId(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw InputError("basis identifier must be non-empty");
  }

  static BasisId euclidean() { return BasisId(kEuclidean); }
  static BasisId sine_dirichlet() { return BasisId(kSineDirichlet); }

  const std::string& name() const { return name_; }
  bool is_sine() const { return name_ == kSineDirichlet; }

  friend bool operator==(const BasisId&, const BasisId&) = default;

  static constexpr const char* kEuclidean = "abstract-euclidean";
  static constexpr const char* kSineDirichlet = "sine-dirichlet";

 private:
  std::string name_;
};

/// e_n(t) = sqrt(2) sin(n pi t), the Dirichlet eigenfunctions on [0,1].
inline double sine_mode(Index n, double t) {
  return std::numbers::sqrt2 * std::sin(static_cast<double>(n) * std::numbers::pi * t);
}

/// Composite trapezoid rule on a uniform grid over [0,1], endpoints included.
struct QuadGrid {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Index size() const { return nodes.size(); }

  static QuadGrid trapezoid(Index points) {
    if (points < 2) throw InputError("trapezoid grid needs at least 2 nodes");
    QuadGrid g;
    g.nodes = Eigen::VectorXd::LinSpaced(points, 0.0, 1.0);
    const double h = 1.0 / static_cast<double>(points - 1);
    g.weights = Eigen::VectorXd::Constant(points, h);
    g.weights(0) = g.weights(points - 1) = 0.5 * h;
    return g;
  }
};

/// Matrix E with E(i, n-1) = e_n(t_i) for n = 1..dim.
inline Eigen::MatrixXd sine_mode_matrix(const Eigen::VectorXd& nodes, Index dim) {
  Eigen::MatrixXd e(nodes.size(), dim);
  for (Index i = 0; i < nodes.size(); ++i)
    for (Index n = 1; n <= dim; ++n) e(i, n - 1) = sine_mode(n, nodes(i));
  return e;
}

/// Trapezoid inner products <x, e_n> for samples of x on a uniform grid.
/// The discrete sine modes are exactly orthonormal under this rule as long as
/// dim is below the number of grid intervals.
inline Eigen::VectorXd project_sine(const QuadGrid& grid, const Eigen::VectorXd& samples,
                                    Index dim) {
  if (samples.size() != grid.size())
    throw DimensionError("sample count " + std::to_string(samples.size()) +
                         " does not match grid size " + std::to_string(grid.size()));
  if (dim >= grid.size() - 1)
    throw DimensionError("sine truncation " + std::to_string(dim) + " needs more than " +
                         std::to_string(dim + 1) + " grid points, got " +
                         std::to_string(grid.size()));
  const Eigen::MatrixXd e = sine_mode_matrix(grid.nodes, dim);
  return e.transpose() * grid.weights.cwiseProduct(samples);
}

/// Evaluates sum_n c_n e_n(t) at the given nodes.
inline Eigen::VectorXd synthesize_sine(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& nodes) {
  return sine_mode_matrix(nodes, coeffs.size()) * coeffs;
}

}  // namespace hpf
