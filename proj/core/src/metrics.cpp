#include "uwmmse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace uwmmse {

UtilityKind::UtilityKind(UtilityTag tag, std::vector<double> weights)
    : tag_(tag), weights_(std::move(weights)) {
  for (double a : weights_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("utility weights must be finite and > 0");
  }
  solver_enabled_ = gamma_is_concave();
}

UtilityKind UtilityKind::weighted_sum_rate(std::vector<double> weights) {
  if (weights.empty()) throw InvalidArgument("weighted_sum_rate needs one weight per node");
  return UtilityKind(UtilityTag::WeightedSumRate, std::move(weights));
}

UtilityKind UtilityKind::from_name(std::string_view name, std::vector<double> weights) {
  if (name == "sum_rate") return sum_rate();
  if (name == "weighted_sum_rate") return weighted_sum_rate(std::move(weights));
  if (name == "sum_squared_rate") return sum_squared_rate();
  if (name == "log_rate") return log_rate();
  if (name == "harmonic_rate") return harmonic_rate();
  throw InvalidArgument("unknown utility '" + std::string(name) + "'");
}

std::string_view UtilityKind::name() const noexcept {
  switch (tag_) {
    case UtilityTag::SumRate: return "sum_rate";
    case UtilityTag::WeightedSumRate: return "weighted_sum_rate";
    case UtilityTag::SumSquaredRate: return "sum_squared_rate";
    case UtilityTag::LogRate: return "log_rate";
    case UtilityTag::HarmonicRate: return "harmonic_rate";
  }
  return "unknown";
}

double UtilityKind::weight(Eigen::Index node) const {
  if (tag_ != UtilityTag::WeightedSumRate) return 1.0;
  if (node < 0 || static_cast<std::size_t>(node) >= weights_.size()) {
    throw ShapeError("no utility weight for node " + std::to_string(node));
  }
  return weights_[static_cast<std::size_t>(node)];
}

double UtilityKind::beta(Eigen::Index node, double rate) const {
  switch (tag_) {
    case UtilityTag::SumRate: return rate;
    case UtilityTag::WeightedSumRate: return weight(node) * rate;
    case UtilityTag::SumSquaredRate: return rate * rate;
    case UtilityTag::LogRate: return std::log(std::max(rate, kLogRateFloor));
    case UtilityTag::HarmonicRate:
      if (!(rate > 0.0)) throw DomainError("harmonic utility is undefined at zero rate");
      return -1.0 / rate;
  }
  return rate;
}

double UtilityKind::gamma(Eigen::Index node, double z) const {
  if (!(z > 0.0)) throw DomainError("gamma is defined for z > 0 only");
  const double t = -std::log(z);
  switch (tag_) {
    case UtilityTag::SumRate: return -t;
    case UtilityTag::WeightedSumRate: return -weight(node) * t;
    case UtilityTag::SumSquaredRate: return -t * t;
    case UtilityTag::LogRate: return -std::log(std::max(t, kLogRateFloor));
    case UtilityTag::HarmonicRate:
      return t > 0.0 ? 1.0 / t : std::numeric_limits<double>::infinity();
  }
  return -t;
}

double UtilityKind::gamma_prime(Eigen::Index node, double z) const {
  if (!(z > 0.0)) throw DomainError("gamma' is defined for z > 0 only");
  const double lz = std::log(z);
  switch (tag_) {
    case UtilityTag::SumRate: return 1.0 / z;
    case UtilityTag::WeightedSumRate: return weight(node) / z;
    case UtilityTag::SumSquaredRate: return -2.0 * lz / z;
    case UtilityTag::LogRate:
      return -lz > kLogRateFloor ? -1.0 / (z * lz) : 0.0;
    case UtilityTag::HarmonicRate:
      return lz != 0.0 ? 1.0 / (z * lz * lz) : std::numeric_limits<double>::infinity();
  }
  return 1.0 / z;
}

bool UtilityKind::gamma_is_concave() const {
  constexpr int kPoints = 241;
  const double lo = std::log(1e-6);
  const std::size_t nodes = tag_ == UtilityTag::WeightedSumRate ? weights_.size() : 1;
  for (std::size_t node = 0; node < nodes; ++node) {
    std::vector<double> z(kPoints), g(kPoints);
    for (int k = 0; k < kPoints; ++k) {
      z[k] = std::exp(lo * (1.0 - static_cast<double>(k) / (kPoints - 1)));
      g[k] = gamma(static_cast<Eigen::Index>(node), z[k]);
      if (!std::isfinite(g[k])) return false;
    }
    // Divided slopes of a concave function are non-increasing.
    for (int k = 1; k + 1 < kPoints; ++k) {
      const double left = (g[k] - g[k - 1]) / (z[k] - z[k - 1]);
      const double right = (g[k + 1] - g[k]) / (z[k + 1] - z[k]);
      const double scale = std::max({std::abs(left), std::abs(right), 1.0});
      if (right - left > 1e-9 * scale) return false;
    }
  }
  return true;
}

void UtilityKind::require_solver_support(Eigen::Index m) const {
  if (!solver_enabled_) {
    throw InvalidArgument("utility '" + std::string(name()) +
                          "' has non-concave gamma and cannot drive the w-update");
  }
  if (tag_ == UtilityTag::WeightedSumRate && static_cast<Eigen::Index>(weights_.size()) != m) {
    throw ShapeError("weighted_sum_rate has " + std::to_string(weights_.size()) +
                     " weights for a network of " + std::to_string(m) + " nodes");
  }
}

Vec rates(const Vec& p, const ChannelState& h, double noise_std) {
  const Eigen::Index m = h.m();
  if (p.size() != m) throw ShapeError("power vector length != m");
  if (!(noise_std > 0.0)) throw InvalidArgument("noise_std must be > 0");
  const Vec interference = h.interference_squared() * p;
  const double noise = noise_std * noise_std;
  Vec c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double signal = h.direct()(i) * h.direct()(i) * p(i);
    c(i) = std::log2(1.0 + signal / (noise + interference(i)));
  }
  return c;
}

double sum_utility(const Vec& c, const UtilityKind& kind) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double b = kind.beta(i, c(i));
    if (!std::isfinite(b)) throw DomainError("utility evaluated to a non-finite value");
    total += b;
  }
  return total;
}

double gamma_prime(const UtilityKind& kind, double z) { return kind.gamma_prime(0, z); }

void ProblemConfig::validate() const {
  if (!(noise_std > 0.0)) throw InvalidArgument("noise_std must be > 0");
  if (!(p_max > 0.0)) throw InvalidArgument("p_max must be > 0");
}

}  // namespace uwmmse
