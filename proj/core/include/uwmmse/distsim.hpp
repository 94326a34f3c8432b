#pragma once

#include "uwmmse/channel.hpp"
#include "uwmmse/model.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwmmse::distsim {

/// Message phases of one unfolded layer.
enum class Phase : int {
  Features = 1,     // hidden GNN features for theta_a and theta_b
  Transmitter = 2,  // v^(k-1) pilots
  Receiver = 3,     // (u_i, w_i) feedback
};

struct MessageRecord {
  int layer = 0;
  Phase phase = Phase::Features;
  int sender = 0;
  std::string payload_kind;
  std::size_t bytes = 0;
};

struct MessageLog {
  std::vector<MessageRecord> records;

  [[nodiscard]] std::size_t broadcasts() const noexcept { return records.size(); }
  /// Each broadcast reaches the m - 1 other nodes.
  [[nodiscard]] std::size_t directed(std::size_t m) const noexcept { return records.size() * (m - 1); }
  [[nodiscard]] std::size_t total_bytes() const noexcept;
};

/// Instrumented view of the gain matrix. Every read is attributed to an agent
/// and must lie in that agent's row (receiver side) or column (transmitter
/// side).
class GainProbe {
 public:
  explicit GainProbe(const ChannelState& h) : h_(&h) {}

  /// Gain from transmitter j into receiver i, read by `agent`. Throws
  /// LocalityViolation when (i, j) is outside the agent's row and column.
  double read(Eigen::Index agent, Eigen::Index i, Eigen::Index j);

  [[nodiscard]] std::size_t reads() const noexcept { return reads_; }
  [[nodiscard]] std::size_t violations() const noexcept { return violations_; }

 private:
  const ChannelState* h_;
  std::size_t reads_ = 0;
  std::size_t violations_ = 0;
};

class LocalityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MessageCount {
  std::size_t broadcasts = 0;
  std::size_t directed = 0;
};

/// Closed-form schedule size for the GCN variant: 3 broadcasts per node per layer.
MessageCount message_count(std::size_t m, std::size_t depth);

/// Schedule size for any Psi: the feature phase needs one exchange round per
/// graph shift (1 for the GCN, layers x taps for the REGNN).
MessageCount message_count(std::size_t m, const model::ModelParams& theta);

struct DistributedResult {
  Vec p;
  MessageLog log;
  std::size_t gain_reads = 0;
  std::size_t locality_violations = 0;
};

/// Runs the trained unfolded model as m agents exchanging messages in
/// synchronous, lossless rounds. Node features are known to every agent.
DistributedResult run_distributed(const ChannelState& h, const Mat& q, const model::ModelParams& theta,
                                  const ProblemConfig& cfg);

}  // namespace uwmmse::distsim
