#pragma once

#include "uwmmse/channel.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace uwmmse {

enum class UtilityTag { SumRate, WeightedSumRate, SumSquaredRate, LogRate, HarmonicRate };

/// Per-node utility beta applied to a rate, together with the derived
/// gamma(z) = -beta(-ln z) and its derivative used by the generic w-update.
///
/// Construction runs a numerical concavity check of gamma on a log-spaced grid
/// over [1e-6, 1]; only variants that pass may drive the WMMSE-style updates
/// (see solver_enabled()).
class UtilityKind {
 public:
  UtilityKind() : UtilityKind(UtilityTag::SumRate, {}) {}

  static UtilityKind sum_rate() { return UtilityKind(UtilityTag::SumRate, {}); }
  static UtilityKind weighted_sum_rate(std::vector<double> weights);
  static UtilityKind sum_squared_rate() { return UtilityKind(UtilityTag::SumSquaredRate, {}); }
  static UtilityKind log_rate() { return UtilityKind(UtilityTag::LogRate, {}); }
  static UtilityKind harmonic_rate() { return UtilityKind(UtilityTag::HarmonicRate, {}); }

  /// Parses the config-file spelling ("sum_rate", "weighted_sum_rate", ...).
  static UtilityKind from_name(std::string_view name, std::vector<double> weights = {});

  [[nodiscard]] UtilityTag tag() const noexcept { return tag_; }
  [[nodiscard]] std::string_view name() const noexcept;
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] bool solver_enabled() const noexcept { return solver_enabled_; }

  /// Node weight alpha_i (1 for every unweighted variant).
  [[nodiscard]] double weight(Eigen::Index node) const;

  [[nodiscard]] double beta(Eigen::Index node, double rate) const;
  [[nodiscard]] double gamma(Eigen::Index node, double z) const;
  [[nodiscard]] double gamma_prime(Eigen::Index node, double z) const;

  /// Throws InvalidArgument unless the variant may be used inside the solver
  /// for an m-node network.
  void require_solver_support(Eigen::Index m) const;

 private:
  UtilityKind(UtilityTag tag, std::vector<double> weights);
  [[nodiscard]] bool gamma_is_concave() const;

  UtilityTag tag_;
  std::vector<double> weights_;
  bool solver_enabled_ = false;
};

/// Rate floor applied before the log utility.
inline constexpr double kLogRateFloor = 1e-9;

/// Achievable rates in bits per channel use.
Vec rates(const Vec& p, const ChannelState& h, double noise_std);

/// Sum over nodes of beta_i(c_i).
double sum_utility(const Vec& c, const UtilityKind& kind);

/// gamma'(z) for a homogeneous kind (node weight of node 0 for weighted sums).
double gamma_prime(const UtilityKind& kind, double z);

/// Problem constants shared by the solver and the unfolded model.
struct ProblemConfig {
  double noise_std = 1.0;
  double p_max = 1.0;
  UtilityKind utility;
  /// When false the w-update keeps the sum-rate form even if `utility` differs
  /// (the "unmodified update" ablation). The loss always uses `utility`.
  bool modified_w_update = true;

  void validate() const;
  /// Utility whose gamma' drives the w-update.
  [[nodiscard]] UtilityKind update_utility() const {
    return modified_w_update ? utility : UtilityKind::sum_rate();
  }
};

}  // namespace uwmmse
