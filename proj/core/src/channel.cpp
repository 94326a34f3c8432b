#include "uwmmse/channel.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace uwmmse {

ChannelState::ChannelState(Mat gains, std::uint64_t topology_seed, std::uint64_t fading_seed)
    : gains_(std::move(gains)), topology_seed_(topology_seed), fading_seed_(fading_seed) {
  if (gains_.rows() != gains_.cols() || gains_.rows() == 0) {
    throw ShapeError("channel gains must be a nonempty square matrix");
  }
  for (Eigen::Index i = 0; i < gains_.rows(); ++i) {
    for (Eigen::Index j = 0; j < gains_.cols(); ++j) {
      const double g = gains_(i, j);
      if (!std::isfinite(g) || g < 0.0) {
        std::ostringstream msg;
        msg << "channel gain (" << i << ", " << j << ") = " << g << " is not finite and nonnegative";
        throw InvalidArgument(msg.str());
      }
    }
    if (gains_(i, i) <= 0.0) {
      throw InvalidArgument("direct channel gain of pair " + std::to_string(i) + " must be positive");
    }
  }
  squared_ = gains_.cwiseProduct(gains_);
  interference_sq_ = squared_;
  interference_sq_.diagonal().setZero();
  direct_ = gains_.diagonal();
}

ChannelState ChannelState::permuted(const std::vector<Eigen::Index>& perm) const {
  const Eigen::Index m = gains_.rows();
  if (static_cast<Eigen::Index>(perm.size()) != m) throw ShapeError("permutation length != m");
  Mat out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = gains_(perm[i], perm[j]);
  }
  return ChannelState(std::move(out), topology_seed_, fading_seed_);
}

Vec permute_vector(const Vec& x, const std::vector<Eigen::Index>& perm) {
  if (static_cast<Eigen::Index>(perm.size()) != x.size()) throw ShapeError("permutation length mismatch");
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = x(perm[i]);
  return out;
}

Mat permute_rows(const Mat& x, const std::vector<Eigen::Index>& perm) {
  if (static_cast<Eigen::Index>(perm.size()) != x.rows()) throw ShapeError("permutation length mismatch");
  Mat out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = x.row(perm[i]);
  return out;
}

}  // namespace uwmmse
