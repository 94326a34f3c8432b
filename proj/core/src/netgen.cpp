#include "uwmmse/netgen.hpp"

#include "uwmmse/rng.hpp"

#include <cmath>
#include <string>

namespace uwmmse {

namespace {

bool has_coincidence(const NetworkTopology& topo) {
  for (const auto& t : topo.tx_pos) {
    for (const auto& r : topo.rx_pos) {
      if (t == r) return true;
    }
  }
  return false;
}

Point drop_in_box(Rng& rng, const Point& centre, double halfwidth) {
  const double x = rng.uniform(centre.x - halfwidth, centre.x + halfwidth);
  const double y = rng.uniform(centre.y - halfwidth, centre.y + halfwidth);
  return {x, y};
}

// Re-drops receivers [first, m) around their transmitters until no
// transmitter/receiver pair coincides.
void redrop_receivers(NetworkTopology& topo, std::size_t first, std::uint64_t seed) {
  for (int attempt = 0; attempt < kMaxGeometryAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    for (std::size_t i = first; i < topo.rx_pos.size(); ++i) {
      topo.rx_pos[i] = drop_in_box(rng, topo.tx_pos[i], topo.gen_box_halfwidth);
    }
    if (!has_coincidence(topo)) return;
  }
  throw DegenerateGeometry("could not place receivers away from transmitters");
}

}  // namespace

double distance(const Point& a, const Point& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

NetworkTopology sample_topology(int m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("sample_topology: m must be >= 1");
  const double extent = static_cast<double>(m);
  for (int attempt = 0; attempt < kMaxGeometryAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    NetworkTopology topo{m, {}, {}, extent / 4.0, seed};
    topo.tx_pos.reserve(m);
    topo.rx_pos.reserve(m);
    for (int i = 0; i < m; ++i) {
      const Point t = drop_in_box(rng, {0.0, 0.0}, extent);
      topo.tx_pos.push_back(t);
      topo.rx_pos.push_back(drop_in_box(rng, t, topo.gen_box_halfwidth));
    }
    if (!has_coincidence(topo)) return topo;
  }
  throw DegenerateGeometry("sample_topology: coincident transmitter/receiver after retries");
}

Mat path_gains(const NetworkTopology& topo) {
  const auto m = static_cast<Eigen::Index>(topo.m);
  if (topo.tx_pos.size() != static_cast<std::size_t>(m) || topo.rx_pos.size() != static_cast<std::size_t>(m)) {
    throw ShapeError("topology position lists do not match m");
  }
  Mat g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double dist = distance(topo.tx_pos[j], topo.rx_pos[i]);
      if (dist == 0.0) {
        throw DegenerateGeometry("transmitter " + std::to_string(j) + " coincides with receiver " +
                                 std::to_string(i));
      }
      g(i, j) = std::pow(dist, -kPathLossExponent);
    }
  }
  return g;
}

Mat sample_fading(int m, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("sample_fading: m must be >= 1");
  Rng rng(seed);
  Mat f(m, m);
  // Row-major draw order so the stream layout matches the serialized format.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) f(i, j) = rng.rayleigh();
  }
  return f;
}

ChannelState channel_state(const NetworkTopology& topo, const Mat& fading, std::uint64_t fading_seed) {
  if (fading.rows() != topo.m || fading.cols() != topo.m) {
    throw ShapeError("fading matrix shape does not match topology");
  }
  return ChannelState(path_gains(topo).cwiseProduct(fading), topo.seed, fading_seed);
}

NetworkTopology scale_density(const NetworkTopology& topo, double d, std::uint64_t seed) {
  if (!(d > 0.0)) throw InvalidArgument("scale_density: d must be > 0");
  NetworkTopology out = topo;
  out.seed = derive_seed(topo.seed, seed);
  for (auto& t : out.tx_pos) t = {t.x / d, t.y / d};
  redrop_receivers(out, 0, seed);
  return out;
}

NetworkTopology resize_network(const NetworkTopology& topo, int m_new, std::uint64_t seed) {
  if (m_new < 1) throw InvalidArgument("resize_network: m_new must be >= 1");
  if (m_new == topo.m) return topo;

  NetworkTopology out = topo;
  out.m = m_new;
  out.seed = derive_seed(topo.seed, seed);
  if (m_new < topo.m) {
    out.tx_pos.resize(static_cast<std::size_t>(m_new));
    out.rx_pos.resize(static_cast<std::size_t>(m_new));
    redrop_receivers(out, 0, seed);
    return out;
  }

  const double extent = topo.tx_halfwidth();
  for (int attempt = 0; attempt < kMaxGeometryAttempts; ++attempt) {
    Rng rng(derive_seed(seed, 0x5157ULL, static_cast<std::uint64_t>(attempt)));
    out.tx_pos.assign(topo.tx_pos.begin(), topo.tx_pos.end());
    out.rx_pos.assign(topo.rx_pos.begin(), topo.rx_pos.end());
    for (int i = topo.m; i < m_new; ++i) {
      const Point t = drop_in_box(rng, {0.0, 0.0}, extent);
      out.tx_pos.push_back(t);
      out.rx_pos.push_back(drop_in_box(rng, t, topo.gen_box_halfwidth));
    }
    if (!has_coincidence(out)) return out;
  }
  throw DegenerateGeometry("resize_network: coincident transmitter/receiver after retries");
}

}  // namespace uwmmse
