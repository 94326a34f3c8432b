#pragma once

#include <uwmmse/netgen.hpp>
#include <uwmmse/rng.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

namespace uwmmse::testing {

inline ChannelState random_channel(int m, std::uint64_t seed) {
  const auto topo = sample_topology(m, derive_seed(seed, 11));
  const std::uint64_t fading_seed = derive_seed(seed, 12);
  return channel_state(topo, sample_fading(m, fading_seed), fading_seed);
}

/// Dense positive gains without geometry, for small hand-checkable cases.
inline ChannelState random_gains(int m, std::uint64_t seed, double lo = 0.1, double hi = 2.0) {
  Rng rng(seed);
  Mat g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = rng.uniform(lo, hi);
  }
  return ChannelState(g);
}

inline std::vector<Eigen::Index> random_permutation(Eigen::Index m, std::uint64_t seed) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = m - 1; i > 0; --i) {
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
  return perm;
}

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.uniform(-scale, scale);
  }
  return out;
}

}  // namespace uwmmse::testing
