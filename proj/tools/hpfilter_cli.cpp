// Command-line front end: filter, optimal-b, example, simulate, validate, scale.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hpfilter/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<hpf::Index> dim;
  std::optional<int> scale_n;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Seed for every random draw");
    app->add_option("--dim", dim, "Truncation dimension");
    app->add_option("--scale-n", scale_n, "Hilbert-scale index n");
    app->add_option("--out", out, "Output directory");
  }

  hpf::RunConfig load() const {
    hpf::Overrides ov;
    ov.seed = seed;
    ov.dim = dim;
    ov.scale_n = scale_n;
    if (out) ov.out = std::filesystem::path(*out);
    return hpf::load_run_config(config, ov);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized functional Hodrick-Prescott filter"};
  app.require_subcommand(1);

  CommonFlags filter_flags, bhat_flags, sim_flags, val_flags, scale_flags;
  auto* filter = app.add_subcommand("filter", "Extract the trend of an observed series");
  filter_flags.attach(filter);
  auto* bhat = app.add_subcommand("optimal-b", "Compute the optimal smoothing operator");
  bhat_flags.attach(bhat);
  auto* simulate = app.add_subcommand("simulate", "Draw (u, v, y, x) from the Gaussian model");
  sim_flags.attach(simulate);
  std::optional<hpf::Index> count;
  simulate->add_option("--count", count, "Number of draws");
  auto* validate = app.add_subcommand("validate", "Run the validation oracles on a model");
  val_flags.attach(validate);
  auto* scale = app.add_subcommand("scale", "Hilbert-scale weights and scaled optimal smoother");
  scale_flags.attach(scale);

  hpf::cli::ExampleParams ex;
  double su_scale = 1.0, su_exp = 0.0, sv_scale = 1.0, sv_exp = 0.0;
  std::uint64_t ex_seed = 0;
  std::string ex_out = "example";
  auto* example = app.add_subcommand("example", "Write a closed-form example instance");
  example->add_option("--which", ex.which, "1: weighted shift on l2, 2: Dirichlet Laplacian")
      ->check(CLI::IsMember({1, 2}));
  example->add_option("--dim", ex.dim, "Truncation dimension")->check(CLI::PositiveNumber);
  example->add_option("--seed", ex_seed, "Seed for the sampled observation");
  example->add_option("--out", ex_out, "Output directory");
  example->add_option("--sigma-u-scale", su_scale, "sigma^u_j = scale * j^-exponent");
  example->add_option("--sigma-u-exponent", su_exp);
  example->add_option("--sigma-v-scale", sv_scale, "sigma^v_j = scale * j^-exponent");
  example->add_option("--sigma-v-exponent", sv_exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hpf::cli::kExitInputError;
  }

  try {
    if (*filter) return hpf::cli::cmd_filter(filter_flags.load());
    if (*bhat) return hpf::cli::cmd_optimal_b(bhat_flags.load());
    if (*simulate) {
      hpf::RunConfig c = sim_flags.load();
      if (count) c.simulate_count = *count;
      return hpf::cli::cmd_simulate(c);
    }
    if (*validate) {
      const int code = hpf::cli::cmd_validate(val_flags.load());
      if (code == hpf::cli::kExitValidationFail) std::cerr << "validation FAILED\n";
      return code;
    }
    if (*scale) return hpf::cli::cmd_scale(scale_flags.load());
    if (*example) {
      ex.seed = ex_seed;
      ex.out = ex_out;
      ex.sigma_u = {{"kind", "power_decay"}, {"scale", su_scale}, {"exponent", su_exp}};
      ex.sigma_v = {{"kind", "power_decay"}, {"scale", sv_scale}, {"exponent", sv_exp}};
      return hpf::cli::cmd_example(ex);
    }
  } catch (const hpf::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hpf::cli::kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return hpf::cli::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return hpf::cli::kExitInputError;
  }
  return hpf::cli::kExitOk;
}
