#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hpfilter/gaussian_model.hpp"
#include "hpfilter/io.hpp"

namespace hpf {

/// Everything one CLI run needs. Paths are absolute once loaded.
struct RunConfig {
  io::json operator_spec;
  io::json sigma_u_spec;
  io::json sigma_v_spec;
  std::optional<io::json> smoothing_spec;
  std::optional<Eigen::VectorXd> y0;
  BasisId basis = BasisId::euclidean();
  std::optional<Index> truncation_dim;
  std::optional<int> scale_n;
  std::optional<io::ScaleConfig> scale;
  std::uint64_t seed = 0;
  std::filesystem::path input_path;
  std::filesystem::path output_path = "out";
  Index simulate_count = 1000;
  Index mc_draws = 20000;
  Index random_matrices = 20;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<Index> dim;
  std::optional<int> scale_n;
  std::optional<std::filesystem::path> out;
};

inline RunConfig parse_run_config(const io::json& j, const std::filesystem::path& base_dir,
                                  const Overrides& ov = {}) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig c;
  auto resolve = [&](const std::filesystem::path& p) {
    return std::filesystem::absolute(p.is_absolute() ? p : base_dir / p).lexically_normal();
  };
  c.operator_spec = io::detail::field(j, "operator", "config");
  c.sigma_u_spec = io::detail::field(j, "sigma_u", "config");
  c.sigma_v_spec = io::detail::field(j, "sigma_v", "config");
  if (j.contains("smoothing")) c.smoothing_spec = j["smoothing"];
  if (j.contains("y0")) c.y0 = io::vector_from_json(j["y0"], "y0");
  if (j.contains("basis")) c.basis = BasisId(j["basis"].get<std::string>());
  if (j.contains("dim")) c.truncation_dim = j["dim"].get<Index>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("input")) c.input_path = resolve(j["input"].get<std::string>());
  c.output_path = resolve(j.value("output", std::string("out")));
  if (j.contains("scale")) {
    c.scale = io::parse_scale_config(j["scale"]);
    c.scale_n = c.scale->n;
  }
  if (j.contains("simulate")) c.simulate_count = j["simulate"].value("count", c.simulate_count);
  if (j.contains("validate")) {
    c.mc_draws = j["validate"].value("mc_draws", c.mc_draws);
    c.random_matrices = j["validate"].value("random_matrices", c.random_matrices);
  }

  if (ov.seed) c.seed = *ov.seed;
  if (ov.dim) c.truncation_dim = *ov.dim;
  if (ov.scale_n) c.scale_n = *ov.scale_n;
  if (ov.out) c.output_path = std::filesystem::absolute(*ov.out).lexically_normal();
  if (c.truncation_dim && *c.truncation_dim < 2) throw InputError("truncation dimension must be >= 2");
  if (c.scale_n && *c.scale_n < 0) throw InputError("scale index must be >= 0");
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path, const Overrides& ov = {}) {
  const io::json j = io::read_json(path);
  return parse_run_config(j, std::filesystem::absolute(path).parent_path(), ov);
}

inline OperatorRep build_operator(const RunConfig& c) {
  OperatorRep a = io::parse_operator(c.operator_spec, c.truncation_dim, c.basis);
  if (a.cols() < 2) throw InputError("truncation dimension must be >= 2");
  return a;
}

inline GaussianModel build_model(const RunConfig& c) {
  OperatorRep a = build_operator(c);
  OperatorRep su = io::parse_covariance(c.sigma_u_spec, a.cols(), a.domain_basis());
  OperatorRep sv = io::parse_covariance(c.sigma_v_spec, a.rows(), a.codomain_basis());
  std::optional<CoeffVector> y0;
  if (c.y0) y0 = CoeffVector(*c.y0, a.domain_basis());
  return GaussianModel::make(std::move(a), std::move(su), std::move(sv), std::move(y0));
}

}  // namespace hpf
