#pragma once

#include "uwmmse_tools/config.hpp"

#include <uwmmse/io.hpp>
#include <uwmmse/netgen.hpp>
#include <uwmmse/train.hpp>

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace uwmmse::tools {

/// Failure while running an otherwise valid command; maps to exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What a command produced: files written under cfg.out and a JSON summary
/// (also written as <command>_summary.json).
struct CommandResult {
  std::vector<std::string> files;
  nlohmann::json summary;
};

CommandResult cmd_gen(const ExperimentConfig& cfg);
CommandResult cmd_train(const ExperimentConfig& cfg);
CommandResult cmd_compare(const ExperimentConfig& cfg);
CommandResult cmd_sweep(const ExperimentConfig& cfg);
CommandResult cmd_trace_ab(const ExperimentConfig& cfg);
CommandResult cmd_generalize(const ExperimentConfig& cfg);
CommandResult cmd_utility(const ExperimentConfig& cfg);
CommandResult cmd_distsim(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Building blocks shared by the commands (and the acceptance suite).

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0: hardware
/// concurrency). Results must be written to per-index slots.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// The experiment's fixed training/test topology.
NetworkTopology experiment_topology(const ExperimentConfig& cfg);

/// Node features for `topo` as selected by cfg.features. The distance
/// features are [1, |t_i - r_i|, min_{j != i} |t_i - r_j|] with the last two
/// columns standardized by `stats` (mean, std pairs).
struct FeatureStats {
  double mean_direct = 0.0;
  double std_direct = 1.0;
  double mean_cross = 0.0;
  double std_cross = 1.0;
};
FeatureStats distance_feature_stats(const NetworkTopology& topo);
Mat distance_features(const NetworkTopology& topo, const FeatureStats& stats);
Mat experiment_features(const ExperimentConfig& cfg, const NetworkTopology& topo);

/// Seeded test set on the experiment topology.
std::vector<train::Sample> test_set(const ExperimentConfig& cfg, const NetworkTopology& topo, int count);

struct MethodScores {
  std::vector<double> wmmse;
  std::vector<double> truncated;
  std::vector<double> uwmmse;
};

/// Per-sample sum-utilities of WMMSE(cfg.wmmse_iterations), Tr-WMMSE(K) and
/// the unfolded model. Classical baselines use cfg.problem().update_utility().
MethodScores evaluate_methods(const ExperimentConfig& cfg, const model::ModelParams& theta,
                              const std::vector<train::Sample>& samples);

/// Fixed-topology training on the experiment topology.
train::TrainReport train_fixed(const ExperimentConfig& cfg, int depth, int hidden);

/// Checkpoint from cfg.checkpoint, or a freshly trained one when
/// cfg.train_inline is set. Throws RuntimeFailure when neither is available.
io::Checkpoint obtain_checkpoint(const ExperimentConfig& cfg, const std::string& path);

io::Checkpoint make_checkpoint(const ExperimentConfig& cfg, const train::TrainReport& report);

double mean(const std::vector<double>& x);
double stddev(const std::vector<double>& x);

/// "# key: value" header lines followed by the CSV body. The timestamp sits on
/// its own line so bodies compare byte-for-byte across runs.
std::string csv_document(const std::string& command, const ExperimentConfig& cfg, const std::string& body);

}  // namespace uwmmse::tools
