#pragma once

#include <uwmmse/metrics.hpp>
#include <uwmmse/model.hpp>
#include <uwmmse/train.hpp>

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwmmse::tools {

/// Bad or inconsistent configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSigmaLow = 2.6e-5;
inline constexpr double kSigmaHigh = 1.0;

/// Seeds of every random stream an experiment touches, all derived from the
/// master seed.
struct SeedSet {
  std::uint64_t master = 0;
  std::uint64_t topology = 0;
  std::uint64_t test = 0;
  std::uint64_t init = 0;
  std::uint64_t train = 0;

  static SeedSet from_master(std::uint64_t master);
};

struct ExperimentConfig {
  int m = 20;
  int depth = 4;     // K
  int hidden = 4;    // F
  double p_max = 1.0;
  int test_samples = 6400;
  double sigma_low = kSigmaLow;
  double sigma_high = kSigmaHigh;
  std::string noise = "low";  // "low" | "high"
  std::string utility = "sum_rate";
  std::vector<double> weights;
  std::string variant = "gcn";
  std::string features = "ones";  // "ones" | "distance"
  bool modified_w_update = true;
  int wmmse_iterations = 100;
  double wmmse_tol = 1e-6;
  std::uint64_t seed = 0;

  train::TrainConfig train;
  std::string checkpoint;
  std::string robust_density_checkpoint;
  std::string robust_size_checkpoint;
  bool train_inline = false;

  int timing_samples = 1000;
  std::vector<int> depth_grid{2, 3, 4, 5, 6, 7};
  std::vector<int> width_grid{2, 5, 10, 15};
  std::vector<double> density_grid{0.5, 0.75, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<int> size_grid{10, 15, 20, 25, 30};
  int generalize_samples = 640;
  int trace_samples = 6400;
  int distsim_samples = 100;
  int threads = 0;  // 0: hardware concurrency

  std::string out = ".";

  [[nodiscard]] double noise_std() const;
  [[nodiscard]] SeedSet seeds() const { return SeedSet::from_master(seed); }
  [[nodiscard]] ProblemConfig problem() const;
  [[nodiscard]] model::PsiVariant psi_variant() const;
  void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Full resolved config, including derived seeds.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace uwmmse::tools
