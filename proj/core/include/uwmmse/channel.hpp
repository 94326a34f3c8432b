#pragma once

#include "uwmmse/types.hpp"

#include <cstdint>
#include <vector>

namespace uwmmse {

/// Instantaneous channel gains of an m-pair interference network.
///
/// Orientation: `gain(i, j)` is the channel from transmitter j into receiver
/// r(i). Row i therefore holds everything receiver i hears, column j
/// everything transmitter j emits.
class ChannelState {
 public:
  ChannelState() = default;

  /// Validates finiteness, nonnegativity and a strictly positive diagonal.
  explicit ChannelState(Mat gains, std::uint64_t topology_seed = 0,
                        std::uint64_t fading_seed = 0);

  [[nodiscard]] Eigen::Index m() const noexcept { return gains_.rows(); }
  [[nodiscard]] const Mat& gains() const noexcept { return gains_; }
  [[nodiscard]] double gain(Eigen::Index i, Eigen::Index j) const { return gains_(i, j); }

  /// Squared gains, the quantity every SINR term uses.
  [[nodiscard]] const Mat& squared() const noexcept { return squared_; }
  /// Squared gains with the diagonal zeroed (interference only).
  [[nodiscard]] const Mat& interference_squared() const noexcept { return interference_sq_; }
  [[nodiscard]] const Vec& direct() const noexcept { return direct_; }

  [[nodiscard]] std::uint64_t topology_seed() const noexcept { return topology_seed_; }
  [[nodiscard]] std::uint64_t fading_seed() const noexcept { return fading_seed_; }

  /// Relabels nodes: returns Pi H Pi^T where node perm[i] of this channel
  /// becomes node i of the result.
  [[nodiscard]] ChannelState permuted(const std::vector<Eigen::Index>& perm) const;

 private:
  Mat gains_;
  Mat squared_;
  Mat interference_sq_;
  Vec direct_;
  std::uint64_t topology_seed_ = 0;
  std::uint64_t fading_seed_ = 0;
};

/// Applies the same relabeling convention as ChannelState::permuted to a vector.
Vec permute_vector(const Vec& x, const std::vector<Eigen::Index>& perm);
/// Applies the relabeling to the rows of a matrix.
Mat permute_rows(const Mat& x, const std::vector<Eigen::Index>& perm);

}  // namespace uwmmse
