#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace oversmooth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Node representations X^(t), one row per node and one column per channel.
using FeatureMatrix = Matrix;

/// The single PRNG used for every random draw (graphs, features, weights).
/// mt19937_64 is fully specified by the standard, so edge sets are stable
/// across standard libraries; normal variates go through
/// std::normal_distribution and are only stable within one library.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream id
/// (splitmix64 finalizer). Used for per-trial and per-seed streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Matrix of i.i.d. N(mean, std^2) entries, filled column-major.
inline Matrix gaussian_matrix(Index rows, Index cols, double mean, double std,
                              Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = mean + std * dist(rng);
  return m;
}

}  // namespace oversmooth
