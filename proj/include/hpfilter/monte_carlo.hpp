#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "hpfilter/basis.hpp"
#include "hpfilter/error.hpp"

namespace hpf {

/// Ordinary least squares fit of each row of `responses` on the rows of
/// `regressors` (with intercept), from samples stored column-wise.
struct Regression {
  Eigen::MatrixXd slope;      // responses x regressors
  Eigen::MatrixXd std_error;  // same shape
  Eigen::VectorXd intercept;
  /// Regressors with zero sample variance are dropped; their slope column is
  /// zero with zero standard error.
  std::vector<bool> identified;
};

inline Regression least_squares(const Eigen::MatrixXd& responses, const Eigen::MatrixXd& regressors) {
  const Index m = regressors.cols();
  const Index p = regressors.rows();
  const Index k = responses.rows();
  if (responses.cols() != m) throw DimensionError("least_squares: sample counts differ");

  const Eigen::VectorXd xbar = regressors.rowwise().mean();
  const Eigen::VectorXd ybar = responses.rowwise().mean();
  const Eigen::MatrixXd xc = regressors.colwise() - xbar;
  const Eigen::MatrixXd yc = responses.colwise() - ybar;

  Regression r;
  r.identified.assign(static_cast<std::size_t>(p), false);
  std::vector<Index> keep;
  for (Index j = 0; j < p; ++j) {
    if (xc.row(j).squaredNorm() > 0.0) {
      keep.push_back(j);
      r.identified[static_cast<std::size_t>(j)] = true;
    }
  }
  const Index q = static_cast<Index>(keep.size());
  if (m <= q + 1) throw InputError("least_squares: not enough samples");

  Eigen::MatrixXd xk(q, m);
  for (Index j = 0; j < q; ++j) xk.row(j) = xc.row(keep[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd gram = xk * xk.transpose();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::MatrixXd gram_inv = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
  const Eigen::MatrixXd coef = (yc * xk.transpose()) * gram_inv;  // k x q
  const Eigen::MatrixXd resid = yc - coef * xk;
  const double dof = static_cast<double>(m - q - 1);

  r.slope = Eigen::MatrixXd::Zero(k, p);
  r.std_error = Eigen::MatrixXd::Zero(k, p);
  for (Index i = 0; i < k; ++i) {
    const double s2 = resid.row(i).squaredNorm() / dof;
    for (Index j = 0; j < q; ++j) {
      const Index col = keep[static_cast<std::size_t>(j)];
      r.slope(i, col) = coef(i, j);
      r.std_error(i, col) = std::sqrt(s2 * gram_inv(j, j));
    }
  }
  r.intercept = ybar - r.slope * xbar;
  return r;
}

/// Sample cross-covariance of two column-wise samples, with the standard
/// error of each entry estimated from the spread of the centred products.
struct CovarianceEstimate {
  Eigen::MatrixXd value;
  Eigen::MatrixXd std_error;
};

inline CovarianceEstimate sample_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Index m = a.cols();
  if (b.cols() != m) throw DimensionError("sample_covariance: sample counts differ");
  if (m < 2) throw InputError("sample_covariance: need at least two samples");
  const Eigen::MatrixXd ac = a.colwise() - a.rowwise().mean();
  const Eigen::MatrixXd bc = b.colwise() - b.rowwise().mean();
  CovarianceEstimate est;
  est.value.resize(a.rows(), b.rows());
  est.std_error.resize(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      const Eigen::ArrayXd prod = ac.row(i).array() * bc.row(j).array();
      const double mean = prod.mean();
      const double var = (prod - mean).square().sum() / static_cast<double>(m - 1);
      est.value(i, j) = prod.sum() / static_cast<double>(m - 1);
      est.std_error(i, j) = std::sqrt(var / static_cast<double>(m));
    }
  }
  return est;
}

/// Entry-wise |estimate - truth| <= bands * std_error.
inline Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> within_bands(
    const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& std_error, const Eigen::MatrixXd& truth,
    double bands = 3.0) {
  return (estimate - truth).array().abs() <= bands * std_error.array();
}

}  // namespace hpf
