#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hpfilter/basis.hpp"
#include "hpfilter/error.hpp"

namespace hpf {

/// A function or sequence given by its coefficients in an orthonormal basis,
/// truncated to dim() terms. Arithmetic requires matching basis and dim.
class CoeffVector {
 public:
  explicit CoeffVector(Eigen::VectorXd coeffs, BasisId basis = BasisId::euclidean())
      : coeffs_(std::move(coeffs)), basis_(std::move(basis)) {
    if (coeffs_.size() < 1) throw DimensionError("coefficient vector must have dim >= 1");
  }

  static CoeffVector zeros(Index dim, BasisId basis = BasisId::euclidean()) {
    return CoeffVector(Eigen::VectorXd::Zero(dim), std::move(basis));
  }

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Index dim() const { return coeffs_.size(); }
  const BasisId& basis() const { return basis_; }

  double operator[](Index i) const { return coeffs_(i); }

  double squared_norm() const { return coeffs_.squaredNorm(); }
  double norm() const { return coeffs_.norm(); }

  double dot(const CoeffVector& other) const {
    require_compatible(other, "dot");
    return coeffs_.dot(other.coeffs_);
  }

  void require_compatible(const CoeffVector& other, const char* what) const {
    if (basis_ != other.basis_)
      throw BasisError(std::string(what) + ": basis mismatch (" + basis_.name() + " vs " +
                       other.basis_.name() + ")");
    if (dim() != other.dim())
      throw DimensionError(std::string(what) + ": dimension mismatch (" +
                           std::to_string(dim()) + " vs " + std::to_string(other.dim()) + ")");
  }

  friend CoeffVector operator+(const CoeffVector& a, const CoeffVector& b) {
    a.require_compatible(b, "operator+");
    return CoeffVector(a.coeffs_ + b.coeffs_, a.basis_);
  }
  friend CoeffVector operator-(const CoeffVector& a, const CoeffVector& b) {
    a.require_compatible(b, "operator-");
    return CoeffVector(a.coeffs_ - b.coeffs_, a.basis_);
  }
  friend CoeffVector operator*(double s, const CoeffVector& a) {
    return CoeffVector(s * a.coeffs_, a.basis_);
  }

 private:
  Eigen::VectorXd coeffs_;
  BasisId basis_;
};

}  // namespace hpf
