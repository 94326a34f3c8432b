#pragma once

#include "uwmmse/grad.hpp"
#include "uwmmse/model.hpp"
#include "uwmmse/netgen.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace uwmmse::train {

/// One training or evaluation instance: a channel and its node features.
struct Sample {
  ChannelState h;
  Mat q;
};

enum class Regime { FixedTopology, DensityRobust, SizeRobust };

std::string_view to_string(Regime r) noexcept;
Regime regime_from_name(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_steps = 10000;
  int steps_per_epoch = 500;
  int max_epochs = 20;
  int patience = 3;
  int val_size = 256;
  Regime regime = Regime::FixedTopology;
  double d_lo = 0.5;
  double d_hi = 5.0;
  int m_lo = 10;
  int m_hi = 30;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Produces the sample for a given seed; must be deterministic in the seed.
using Sampler = std::function<Sample(std::uint64_t seed)>;

/// Fresh Rayleigh fading on a fixed topology, all-ones (or given) features.
Sampler fixed_topology_sampler(NetworkTopology topo, Mat features = {});

/// Fresh m-pair topology per sample, density factor uniform in [d_lo, d_hi].
Sampler density_sampler(int m, double d_lo, double d_hi);

/// Fresh base topology of n pairs per sample, resized to a uniform size in
/// [m_lo, m_hi].
Sampler size_sampler(int n, int m_lo, int m_hi);

struct OptimizerState {
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Mat> first_moment;
  std::vector<Mat> second_moment;

  static OptimizerState for_params(const model::ModelParams& theta);
};

/// Bias-corrected adaptive-moment update of every tensor of `theta`.
void adam_step(OptimizerState& state, model::ModelParams& theta, const grad::GradientMap& grads, double lr);

/// -(1/B) sum_batch sum_i beta_i(c_i(Phi(H; theta), H)) on a single tape.
grad::Var batch_loss(grad::Tape& tape, const model::TapeParams& params, const model::ModelParams& shape,
                     const std::vector<Sample>& batch, const ProblemConfig& cfg);

struct LossAndGradient {
  double loss = 0.0;
  grad::GradientMap gradient;
};

/// Same loss with one tape per sample; per-sample gradients are summed in
/// batch order.
LossAndGradient batch_loss_and_gradient(const model::ModelParams& theta, const std::vector<Sample>& batch,
                                        const ProblemConfig& cfg);

/// Mean sum-utility of the unfolded model over `samples`.
double mean_utility(const model::ModelParams& theta, const std::vector<Sample>& samples,
                    const ProblemConfig& cfg);

std::vector<Sample> draw_samples(const Sampler& sampler, std::uint64_t seed, int count);

struct TrainReport {
  std::vector<double> step_loss;
  std::vector<double> val_utility;
  model::ModelParams best;
  double best_val_utility = 0.0;
  int best_epoch = 0;
  int steps = 0;
  std::string stop_reason;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Sample batch -> loss -> backward -> adam, validating every epoch on a
/// fixed set and keeping the best-validation parameters.
TrainReport train(const TrainConfig& cfg, const Sampler& sampler, model::ModelParams theta0,
                  const ProblemConfig& problem);

/// Regime-randomized training: density-robust draws m-pair topologies at
/// random density, size-robust draws random sizes around a base of m pairs.
TrainReport train_robust(const TrainConfig& cfg, int m, model::ModelParams theta0, const ProblemConfig& problem);

}  // namespace uwmmse::train
