#pragma once

#include "uwmmse/channel.hpp"
#include "uwmmse/metrics.hpp"

#include <cstdint>
#include <vector>

namespace uwmmse {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b) noexcept;

/// Planar transmitter/receiver drop. Receiver i lies inside the square of
/// half-width `gen_box_halfwidth` centred on transmitter i.
struct NetworkTopology {
  int m = 0;
  std::vector<Point> tx_pos;
  std::vector<Point> rx_pos;
  double gen_box_halfwidth = 0.0;
  std::uint64_t seed = 0;

  /// Half-width of the transmitter square, [-N, N]^2, that generated this
  /// family of topologies (four times the receiver box).
  [[nodiscard]] double tx_halfwidth() const noexcept { return 4.0 * gen_box_halfwidth; }
};

inline constexpr double kPathLossExponent = 2.2;
inline constexpr int kMaxGeometryAttempts = 100;

/// Transmitters uniform on [-m, m]^2, receivers uniform on tx +- m/4.
NetworkTopology sample_topology(int m, std::uint64_t seed);

/// gains(i, j) = |t_j - r_i|^-2.2 (transmitter j into receiver i).
Mat path_gains(const NetworkTopology& topo);

/// i.i.d. Rayleigh(1) draws.
Mat sample_fading(int m, std::uint64_t seed);

/// Elementwise product of path gains and fading.
ChannelState channel_state(const NetworkTopology& topo, const Mat& fading,
                           std::uint64_t fading_seed = 0);

/// Divides transmitter positions by d and re-drops every receiver inside the
/// original-size box around its moved transmitter.
NetworkTopology scale_density(const NetworkTopology& topo, double d, std::uint64_t seed);

/// Shrinks to a prefix of pairs (re-dropping their receivers) or appends new
/// pairs inside the original [-N, N]^2 area.
NetworkTopology resize_network(const NetworkTopology& topo, int m_new, std::uint64_t seed);

}  // namespace uwmmse
