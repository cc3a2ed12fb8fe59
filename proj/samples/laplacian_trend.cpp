// Smooths a noisy function on [0,1] with the Dirichlet-Laplacian filter and
// the noise-to-signal ratio smoother, printing trend and observation side by side.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "hpfilter/hpfilter.hpp"

int main() {
  using namespace hpf;
  constexpr Index dim = 32;
  const QuadGrid grid = QuadGrid::trapezoid(257);

  Engine rng = make_engine(7);
  Eigen::VectorXd samples(grid.size());
  const Eigen::VectorXd noise = standard_normal(rng, grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double t = grid.nodes(i);
    samples(i) = std::sin(std::numbers::pi * t) + 0.3 * t * (1 - t) * std::sin(40 * t) + 0.05 * noise(i);
  }
  samples(0) = samples(grid.size() - 1) = 0.0;

  const OperatorRep a = examples::dirichlet_laplacian(dim);
  const double ratio = 1e-6;  // sigma_u / sigma_v
  const OperatorRep b = OperatorRep::diagonal(Eigen::VectorXd::Constant(dim, ratio), a.codomain_basis());
  const CoeffVector x(project_sine(grid, samples, dim), a.domain_basis());
  const CoeffVector y = solve_filter({a, x, b});
  const Eigen::VectorXd trend = synthesize_sine(y.coeffs(), grid.nodes);

  std::printf("t,observed,trend\n");
  for (Index i = 0; i < grid.size(); i += 16)
    std::printf("%.4f,%.6f,%.6f\n", grid.nodes(i), samples(i), trend(i));
  return 0;
}
