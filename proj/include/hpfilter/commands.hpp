#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpfilter/config.hpp"
#include "hpfilter/examples.hpp"
#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/hilbert_scale.hpp"
#include "hpfilter/hp_filter.hpp"
#include "hpfilter/io.hpp"
#include "hpfilter/monte_carlo.hpp"
#include "hpfilter/optimal_smoothing.hpp"
#include "hpfilter/validation.hpp"

// Implementations of the CLI subcommands. Each writes its outputs below the
// configured output directory and returns the process exit code; malformed
// input is reported by throwing InputError.

namespace hpf::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitValidationFail = 2;

namespace detail {

inline void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline json positivity_json(const PositivityReport& p) {
  return {{"pass", p.pass}, {"analytic", p.analytic}, {"min_value", p.min_value}};
}

inline std::vector<Index> one_based(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
  return idx;
}

/// Projects the observations onto the basis of A's domain.
struct Observation {
  CoeffVector coeffs;
  Eigen::VectorXd nodes;    // t of each output row
  Eigen::VectorXd samples;  // raw values (sine basis) or coefficients
};

inline Observation observe(const io::Series& s, const OperatorRep& a) {
  const Index dim = a.cols();
  const Index m = static_cast<Index>(s.values.size());
  const Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(s.values.data(), m);
  if (a.domain_basis().is_sine()) {
    const QuadGrid grid = QuadGrid::trapezoid(std::max<Index>(m, 2));
    if (s.has_t) {
      const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(s.t.data(), m);
      if ((t - grid.nodes).cwiseAbs().maxCoeff() > 1e-9)
        throw InputError("sine projection needs samples on a uniform grid over [0,1] with endpoints");
    }
    return {CoeffVector(project_sine(grid, values, dim), a.domain_basis()), grid.nodes, values};
  }
  if (m > dim)
    throw DimensionError("series of length " + std::to_string(m) +
                         " overflows the truncation dimension " + std::to_string(dim));
  if (m < dim)
    throw DimensionError("series of length " + std::to_string(m) +
                         " is shorter than the truncation dimension " + std::to_string(dim));
  Eigen::VectorXd nodes = s.has_t ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(s.t.data(), m))
                                  : Eigen::VectorXd::LinSpaced(m, 1.0, static_cast<double>(m));
  return {CoeffVector(values, a.domain_basis()), std::move(nodes), values};
}

inline void write_operator_fields(json& j, const char* key, const OperatorRep& op) {
  if (op.is_diagonal())
    j[std::string(key) + "_multipliers"] = io::to_json(op.multipliers());
  else
    j[std::string(key) + "_rows"] = io::to_json(op.to_dense());
}

}  // namespace detail

inline int cmd_filter(const RunConfig& c) {
  const GaussianModel m = build_model(c);
  const OperatorRep b = c.smoothing_spec
                            ? io::parse_operator(*c.smoothing_spec, m.A.rows(), m.A.codomain_basis())
                            : optimal_b(m);
  if (c.input_path.empty()) throw InputError("filter: no input series configured (\"input\")");
  const detail::Observation obs = detail::observe(io::read_series(c.input_path), m.A);

  const PositivityReport pos = positivity_check(m.A, b, 64, c.seed);
  if (!pos.pass)
    throw PositivityError("filter: smoothing operator fails <Ah, BAh> >= 0 (minimum " +
                          io::format_double(pos.min_value) + ")");
  const CoeffVector y = solve_filter({m.A, obs.coeffs, b});
  const CoeffVector r = obs.coeffs - y;
  const OperatorRep f = filter_operator(m.A, b);
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(m.dim(), m.dim()) + penalty_operator(m.A, b).to_dense();
  const double solve_residual = (system * y.coeffs() - obs.coeffs.coeffs()).norm();

  detail::prepare_output(c.output_path);
  const Index rows = obs.nodes.size();
  Eigen::VectorXd trend_values, resid_values;
  if (m.A.domain_basis().is_sine()) {
    trend_values = synthesize_sine(y.coeffs(), obs.nodes);
    resid_values = obs.samples - trend_values;
  } else {
    trend_values = y.coeffs();
    resid_values = r.coeffs();
  }
  std::vector<Index> idx = detail::one_based(rows);
  io::write_series_csv(c.output_path / "trend.csv", idx, obs.nodes, trend_values);
  io::write_series_csv(c.output_path / "residual.csv", idx, obs.nodes, resid_values);
  {
    std::ofstream out = io::open_output(c.output_path / "coefficients.csv");
    out << "index,observed,trend\n";
    for (Index j = 0; j < m.dim(); ++j)
      out << (j + 1) << ',' << io::format_double(obs.coeffs[j]) << ',' << io::format_double(y[j])
          << '\n';
  }

  json side;
  side["basis"] = m.A.domain_basis().name();
  side["dim"] = m.dim();
  side["smoother"] = io::operator_to_json(b);
  side["smoother_source"] = c.smoothing_spec ? "config" : "optimal_b";
  detail::write_operator_fields(side, "bhat", b);
  detail::write_operator_fields(side, "filter", f);
  side["diagnostics"] = {{"positivity", detail::positivity_json(pos)},
                         {"solve_residual", solve_residual},
                         {"numerical_rank", m.pinv_bundle.numerical_rank},
                         {"kernel_independence_commutator", kernel_independence_commutator(m)}};
  io::write_json(c.output_path / "filter.json", side);
  return kExitOk;
}

inline int cmd_optimal_b(const RunConfig& c) {
  const GaussianModel m = build_model(c);
  const OperatorRep b = optimal_b(m);
  detail::prepare_output(c.output_path);
  json j;
  j["bhat"] = io::operator_to_json(b);
  j["numerical_rank"] = m.pinv_bundle.numerical_rank;
  j["kernel_independence_commutator"] = kernel_independence_commutator(m);
  j["symmetric"] = is_symmetric(b, 1e-12 * std::max(1.0, frobenius_norm(b)));
  j["positivity"] = detail::positivity_json(positivity_check(m.A, b, 64, c.seed));
  io::write_json(c.output_path / "bhat.json", j);
  return kExitOk;
}

struct ExampleParams {
  int which = 1;
  Index dim = 8;
  std::uint64_t seed = 0;
  std::filesystem::path out = "example";
  json sigma_u = {{"kind", "power_decay"}, {"scale", 1.0}, {"exponent", 0.0}};
  json sigma_v = {{"kind", "power_decay"}, {"scale", 1.0}, {"exponent", 0.0}};
};

/// Writes a self-contained instance of one of the two closed-form examples:
/// operator and covariance specs, a run config, a sampled observation x.csv
/// and golden.json with the closed-form smoother and filter multipliers.
inline int cmd_example(const ExampleParams& p) {
  if (p.which != 1 && p.which != 2) throw InputError("example: --which must be 1 or 2");
  if (p.dim < 1) throw InputError("example: --dim must be >= 1");
  const bool laplace = p.which == 2;
  const BasisId basis = laplace ? BasisId::sine_dirichlet() : BasisId::euclidean();
  const json op_spec = laplace ? json{{"kind", "diagonal"}, {"name", "dirichlet_laplacian"}}
                               : json{{"kind", "diagonal"}, {"name", "weighted_shift"}};

  OperatorRep a = io::parse_operator(op_spec, p.dim, basis);
  OperatorRep su = io::parse_covariance(p.sigma_u, p.dim, basis);
  OperatorRep sv = io::parse_covariance(p.sigma_v, p.dim, basis);
  const Eigen::VectorXd su_v = su.multipliers();
  const Eigen::VectorXd sv_v = sv.multipliers();
  const GaussianModel m = GaussianModel::make(std::move(a), std::move(su), std::move(sv));

  Eigen::VectorXd bhat, filt;
  if (laplace) {
    bhat = su_v.cwiseQuotient(sv_v);
    filt = examples::laplacian_filter(bhat);
  } else {
    bhat = examples::weighted_shift_bhat(su_v, sv_v);
    filt = examples::weighted_shift_filter(bhat);
  }
  const JointSample s = sample_joint(m, 1, p.seed);
  const Eigen::VectorXd x = s.x.col(0);

  detail::prepare_output(p.out);
  io::write_json(p.out / "operator.json", op_spec);
  io::write_json(p.out / "sigma_u.json", p.sigma_u);
  io::write_json(p.out / "sigma_v.json", p.sigma_v);
  if (laplace) {
    const QuadGrid grid = QuadGrid::trapezoid(std::max<Index>(64, 8 * p.dim) + 1);
    const Eigen::VectorXd values = synthesize_sine(x, grid.nodes);
    io::write_series_csv(p.out / "x_samples.csv", detail::one_based(grid.size()), grid.nodes, values);
    std::ofstream out = io::open_output(p.out / "x.csv");
    out << "t,value\n";
    for (Index i = 0; i < grid.size(); ++i)
      out << io::format_double(grid.nodes(i)) << ',' << io::format_double(values(i)) << '\n';
  } else {
    std::ofstream out = io::open_output(p.out / "x.csv");
    out << "t,value\n";
    for (Index j = 0; j < p.dim; ++j) out << (j + 1) << ',' << io::format_double(x(j)) << '\n';
  }

  json cfg;
  cfg["basis"] = basis.name();
  cfg["dim"] = p.dim;
  cfg["operator"] = op_spec;
  cfg["sigma_u"] = p.sigma_u;
  cfg["sigma_v"] = p.sigma_v;
  cfg["seed"] = p.seed;
  cfg["input"] = "x.csv";
  cfg["output"] = "filtered";
  if (p.sigma_u.value("kind", "") == "power_decay" && p.sigma_v.value("kind", "") == "power_decay")
    cfg["scale"] = {{"kappa_decay", laplace ? 4.0 : 2.0},
                    {"sigma_u_decay", p.sigma_u["exponent"]},
                    {"sigma_v_decay", p.sigma_v["exponent"]}};
  io::write_json(p.out / "config.json", cfg);

  json golden;
  golden["example"] = p.which;
  golden["dim"] = p.dim;
  golden["bhat_multipliers"] = io::to_json(bhat);
  golden["filter_multipliers"] = io::to_json(filt);
  golden["x_coeffs"] = io::to_json(x);
  golden["trend_coeffs"] = io::to_json(Eigen::VectorXd(filt.cwiseProduct(x)));
  io::write_json(p.out / "golden.json", golden);
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& c) {
  const GaussianModel m = build_model(c);
  const JointSample s = sample_joint(m, c.simulate_count, c.seed);
  detail::prepare_output(c.output_path);
  {
    std::ofstream out = io::open_output(c.output_path / "draws.csv");
    out << "draw,component,u,y,x\n";
    for (Index k = 0; k < s.count(); ++k)
      for (Index j = 0; j < s.x.rows(); ++j)
        out << (k + 1) << ',' << (j + 1) << ',' << io::format_double(s.u(j, k)) << ','
            << io::format_double(s.y(j, k)) << ',' << io::format_double(s.x(j, k)) << '\n';
  }
  {
    std::ofstream out = io::open_output(c.output_path / "v_draws.csv");
    out << "draw,component,v\n";
    for (Index k = 0; k < s.count(); ++k)
      for (Index j = 0; j < s.v.rows(); ++j)
        out << (k + 1) << ',' << (j + 1) << ',' << io::format_double(s.v(j, k)) << '\n';
  }
  const Eigen::VectorXd xbar = s.x.rowwise().mean();
  json j;
  j["count"] = s.count();
  j["seed"] = c.seed;
  j["x_mean"] = io::to_json(xbar);
  // Extension: kernel component of the sample mean as an estimate of y0.
  j["y0_estimate"] = io::to_json(Eigen::VectorXd(m.pinv_bundle.projector_complement.to_dense() * xbar));
  if (s.count() >= 2) {
    const CovarianceEstimate cov = sample_covariance(s.x, s.x);
    const Eigen::MatrixXd truth = (m.sigma_u + qv(m)).to_dense();
    const auto ok = within_bands(cov.value, cov.std_error, truth, 3.0);
    j["x_covariance_within_3se"] = static_cast<double>(ok.count()) / static_cast<double>(ok.size());
  }
  io::write_json(c.output_path / "summary.json", j);
  return kExitOk;
}

inline int cmd_scale(const RunConfig& c) {
  const GaussianModel m = build_model(c);
  std::optional<int> n0;
  json j;
  if (c.scale && c.scale->decay.kappa && c.scale->decay.sigma_u && c.scale->decay.sigma_v) {
    n0 = trace_class_threshold(c.scale->decay);
    j["decay"] = {{"kappa_decay", *c.scale->decay.kappa},
                  {"sigma_u_decay", *c.scale->decay.sigma_u},
                  {"sigma_v_decay", *c.scale->decay.sigma_v}};
  }
  j["n0"] = n0 ? json(*n0) : json(nullptr);
  std::vector<int> levels;
  if (c.scale_n) {
    levels.push_back(*c.scale_n);
  } else {
    const int start = n0.value_or(0);
    for (int n = start; n <= start + 3; ++n) levels.push_back(n);
  }
  json arr = json::array();
  for (int n : levels) {
    json lv;
    lv["n"] = n;
    const ScaleWeights w = scale_weights(m.A, n);
    json comps = json::array();
    for (Index k : w.components) comps.push_back(k + 1);
    lv["range_components"] = comps;
    lv["kappa"] = io::to_json(w.kappa);
    lv["weights"] = io::to_json(w.weights);
    const GaussianModel sm = scaled_model(m, n);
    detail::write_operator_fields(lv, "sigma_u_tilde", sm.sigma_u);
    detail::write_operator_fields(lv, "sigma_v_tilde", sm.sigma_v);
    try {
      detail::write_operator_fields(lv, "bhat", optimal_b(sm));
    } catch (const SingularCovarianceError& e) {
      lv["bhat_error"] = e.what();
    }
    const HsReport hs = hs_diagnostics(sm);
    lv["trace_sigma_u_tilde"] = hs.trace_sigma_u;
    lv["trace_qv_tilde"] = hs.trace_qv;
    lv["hs_norm_t_tilde"] = hs.hs_norm_t;
    arr.push_back(std::move(lv));
  }
  j["levels"] = std::move(arr);
  detail::prepare_output(c.output_path);
  io::write_json(c.output_path / "scale.json", j);
  return kExitOk;
}

inline int cmd_validate(const RunConfig& c) {
  const GaussianModel m = build_model(c);
  ValidationOptions o;
  o.seed = c.seed;
  o.mc_draws = c.mc_draws;
  o.random_matrices = c.random_matrices;
  o.scale_n = c.scale_n;
  const ValidationReport rep = validate_model(m, o);
  detail::prepare_output(c.output_path);
  io::write_json(c.output_path / "validation.json", rep.to_json());
  return rep.all_pass() ? kExitOk : kExitValidationFail;
}

}  // namespace hpf::cli
