#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/hilbert_scale.hpp"
#include "hpfilter/io.hpp"
#include "hpfilter/monte_carlo.hpp"
#include "hpfilter/optimal_smoothing.hpp"
#include "hpfilter/pinv.hpp"

namespace hpf {

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skip: return "SKIP";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  nlohmann::json details = nlohmann::json::object();
};

struct ValidationOptions {
  std::uint64_t seed = 0;
  Index mc_draws = 20000;
  Index random_matrices = 20;
  Index gap_samples = 100;
  Index grid_x_samples = 32;
  std::optional<int> scale_n;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::fail; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["status"] = all_pass() ? "PASS" : "FAIL";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json j = c.details;
      j["name"] = c.name;
      j["status"] = to_string(c.status);
      arr.push_back(std::move(j));
    }
    out["checks"] = std::move(arr);
    return out;
  }
};

/// Random rows x cols matrix of exact rank `rank`, built from a rank
/// factorization with Gaussian factors.
inline Eigen::MatrixXd random_rank_matrix(Engine& rng, Index rows, Index cols, Index rank) {
  if (rank == 0) return Eigen::MatrixXd::Zero(rows, cols);
  return standard_normal(rng, rows, rank) * standard_normal(rng, rank, cols);
}

/// Worst Moore-Penrose and projector defect of pinv(A), each divided by
/// 1e-10 (1 + |A|); values <= 1 pass.
inline double moore_penrose_defect_ratio(const OperatorRep& a) {
  const PinvBundle b = pinv(a);
  const double tau = moore_penrose_tolerance(a);
  const Eigen::MatrixXd pi = b.projector_pi.to_dense();
  const Eigen::MatrixXd co = b.projector_complement.to_dense();
  double worst = moore_penrose_residuals(a, b.pinv).max();
  worst = std::max(worst, (pi * pi - pi).norm());
  worst = std::max(worst, (pi.transpose() - pi).norm());
  // <Pi xi, (I - Pi) xi> over the standard basis and its pairwise sums
  worst = std::max(worst, (pi.transpose() * co).cwiseAbs().maxCoeff());
  return worst / tau;
}

namespace detail {

inline CheckResult check_moore_penrose(const GaussianModel& m, const ValidationOptions& o) {
  CheckResult c{"moore_penrose"};
  double worst = moore_penrose_defect_ratio(m.A);
  c.details["model_defect_ratio"] = worst;
  Engine rng = make_engine(o.seed, 101);
  std::uniform_int_distribution<Index> size(1, 12);
  for (Index k = 0; k < o.random_matrices; ++k) {
    const Index r = size(rng), cols = size(rng);
    std::uniform_int_distribution<Index> rk(0, std::min(r, cols));
    const Eigen::MatrixXd a = random_rank_matrix(rng, r, cols, rk(rng));
    worst = std::max(worst, moore_penrose_defect_ratio(OperatorRep::dense(a)));
  }
  c.details["random_matrices"] = o.random_matrices;
  c.details["worst_defect_ratio"] = worst;
  c.details["numerical_rank"] = m.pinv_bundle.numerical_rank;
  c.status = worst <= 1.0 ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

inline CheckResult check_kernel_independence(const GaussianModel& m) {
  CheckResult c{"kernel_independence"};
  const double comm = kernel_independence_commutator(m);
  c.details["commutator_norm"] = comm;
  c.details["tolerance"] = 1e-10;
  c.status = comm <= 1e-10 ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

inline CheckResult check_conditional_mean(const GaussianModel& m, const ValidationOptions& o) {
  CheckResult c{"conditional_mean_mc"};
  const JointSample s = sample_joint(m, o.mc_draws, o.seed);
  const Regression reg = least_squares(s.y, s.x);
  const ConditionalSlope truth = conditional_slope(m);
  const Eigen::MatrixXd t = truth.slope.to_dense();
  const auto ok = within_bands(reg.slope, reg.std_error, t, 3.0);
  const Index entries = ok.size();
  const Index misses = entries - ok.count();
  const Index allowed = std::max<Index>(1, entries / 50);
  c.details["draws"] = o.mc_draws;
  c.details["entries"] = entries;
  c.details["outside_3se"] = misses;
  c.details["allowed_outside"] = allowed;
  c.details["max_abs_deviation"] = (reg.slope - t).cwiseAbs().maxCoeff();
  c.details["rank_deficient"] = truth.rank_deficient;
  c.status = misses <= allowed ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

inline CheckResult check_gap(const GaussianModel& m, const OperatorRep& bhat,
                             const ValidationOptions& o) {
  CheckResult c{"gap_bhat"};
  const JointSample s = sample_joint(m, o.gap_samples, substream_seed(o.seed, 1));
  double worst_ratio = 0.0, max_total = 0.0, max_kernel = 0.0;
  for (Index k = 0; k < s.count(); ++k) {
    const CoeffVector x(s.x.col(k), m.A.domain_basis());
    const GapParts g = gap_parts(m, bhat, x);
    worst_ratio = std::max(worst_ratio, g.range / (1e-9 * (1.0 + x.norm())));
    max_total = std::max(max_total, g.total);
    max_kernel = std::max(max_kernel, g.kernel);
  }
  c.details["samples"] = o.gap_samples;
  c.details["worst_range_gap_ratio"] = worst_ratio;
  c.details["max_gap"] = max_total;
  c.details["max_kernel_gap"] = max_kernel;
  c.status = worst_ratio <= 1.0 ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

inline CheckResult check_grid(const GaussianModel& m, const OperatorRep& bhat,
                              const ValidationOptions& o) {
  CheckResult c{"grid_search"};
  if (!bhat.is_diagonal() || !m.A.is_diagonal()) {
    c.details["reason"] = "optimal smoother is not diagonal";
    return c;
  }
  DiagonalFamily fam{bhat.multipliers(), {}, bhat.domain_basis()};
  const Eigen::VectorXd& a = m.A.multipliers();
  for (Index j = 0; j < a.size() && fam.free_components.size() < 3; ++j)
    if (a(j) != 0.0) fam.free_components.push_back(j);
  if (fam.free_components.empty()) {
    c.details["reason"] = "A has no range components";
    return c;
  }
  const Eigen::VectorXd center = fam.parameters_of(bhat);
  const double scale = center.cwiseAbs().minCoeff();
  const double step = scale > 0.0 ? 0.05 * scale : 0.05;
  const ParameterLattice lat = ParameterLattice::centered(center, step, 10);
  const JointSample s = sample_joint(m, o.grid_x_samples, substream_seed(o.seed, 2));
  std::vector<CoeffVector> xs;
  for (Index k = 0; k < s.count(); ++k) xs.emplace_back(s.x.col(k), m.A.domain_basis());
  const GridSearchReport r = grid_search_oracle(m, fam, lat, xs);
  c.details["argmin_params"] = io::to_json(r.argmin_params);
  c.details["bhat_params"] = io::to_json(r.bhat_params);
  c.details["gap_at_argmin"] = r.gap_at_argmin;
  c.details["gap_at_bhat"] = r.gap_at_bhat;
  c.details["lattice_step"] = r.lattice_step;
  c.details["lattice_points"] = lat.size();
  c.status = r.pass ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

inline CheckResult check_white_noise(const GaussianModel& m, const ValidationOptions& o) {
  CheckResult c{"white_noise_ratio"};
  if (!o.scale_n) {
    c.details["reason"] = "no scale index configured";
    return c;
  }
  if (!m.A.is_diagonal() || !m.sigma_u.is_diagonal() || !m.sigma_v.is_diagonal()) {
    c.details["reason"] = "scaled check needs a spectral model";
    return c;
  }
  const OperatorRep b = scaled_optimal_b(m, *o.scale_n);
  const Eigen::VectorXd& pi = m.pinv_bundle.projector_pi.multipliers();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, dev = 0.0;
  for (Index j = 0; j < pi.size(); ++j) {
    if (pi(j) == 0.0) continue;
    const double ratio = m.sigma_u.multipliers()(j) / m.sigma_v.multipliers()(j);
    const double bj = b.multipliers()(j);
    lo = std::min(lo, bj);
    hi = std::max(hi, bj);
    dev = std::max(dev, std::abs(bj - ratio) / std::max(1.0, std::abs(ratio)));
  }
  c.details["scale_n"] = *o.scale_n;
  c.details["multiplier_spread"] = hi - lo;
  c.details["max_relative_deviation_from_ratio"] = dev;
  c.status = dev <= 1e-12 ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

}  // namespace detail

namespace detail {

inline CheckResult guarded(const std::string& name, const std::function<CheckResult()>& run) {
  try {
    return run();
  } catch (const Error& e) {
    CheckResult c{name, CheckStatus::fail};
    c.details["error"] = e.what();
    return c;
  }
}

}  // namespace detail

/// Runs every applicable oracle on one model. Individual failures do not stop
/// the remaining checks.
inline ValidationReport validate_model(const GaussianModel& m, const ValidationOptions& o) {
  ValidationReport rep;
  rep.checks.push_back(detail::guarded("moore_penrose", [&] { return detail::check_moore_penrose(m, o); }));
  rep.checks.push_back(detail::guarded("kernel_independence", [&] { return detail::check_kernel_independence(m); }));
  rep.checks.push_back(
      detail::guarded("conditional_mean_mc", [&] { return detail::check_conditional_mean(m, o); }));
  std::optional<OperatorRep> bhat;
  try {
    bhat = optimal_b(m);
  } catch (const SingularCovarianceError& e) {
    CheckResult c{"optimal_b", CheckStatus::fail};
    c.details["error"] = e.what();
    rep.checks.push_back(std::move(c));
  }
  if (bhat) {
    rep.checks.push_back(detail::guarded("gap_bhat", [&] { return detail::check_gap(m, *bhat, o); }));
    rep.checks.push_back(detail::guarded("grid_search", [&] { return detail::check_grid(m, *bhat, o); }));
  }
  rep.checks.push_back(
      detail::guarded("white_noise_ratio", [&] { return detail::check_white_noise(m, o); }));
  return rep;
}

}  // namespace hpf
