#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "hpfilter/basis.hpp"

namespace hpf {

/// SplitMix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `seed`. Chunk k of any sampler is drawn from
/// substream_seed(seed, k), so chunks can be generated in any order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(substream_seed(seed, stream));
}

inline Eigen::VectorXd standard_normal(Engine& rng, Index n) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out(i) = z(rng);
  return out;
}

inline Eigen::MatrixXd standard_normal(Engine& rng, Index rows, Index cols) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = z(rng);
  return out;
}

inline Eigen::VectorXd uniform(Engine& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out(i) = u(rng);
  return out;
}

}  // namespace hpf
