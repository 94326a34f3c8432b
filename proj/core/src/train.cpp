#include "uwmmse/train.hpp"

#include "uwmmse/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace uwmmse::train {

using grad::Tape;
using grad::Var;

namespace {

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kValidationStream = 2;

Var sample_utility(Tape& tape, const model::TapeParams& params, const model::ModelParams& shape,
                   const Sample& s, const ProblemConfig& cfg) {
  const auto ch = model::bind_channel(tape, s.h, s.q, cfg.noise_std, shape.regnn_taps);
  const auto fwd = model::forward_tape(ch, params, shape, cfg);
  return model::sum_utility_tape(ch, model::rates_tape(ch, fwd.p), cfg.utility);
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::FixedTopology: return "fixed_topology";
    case Regime::DensityRobust: return "density_robust";
    case Regime::SizeRobust: return "size_robust";
  }
  return "unknown";
}

Regime regime_from_name(std::string_view name) {
  if (name == "fixed_topology") return Regime::FixedTopology;
  if (name == "density_robust") return Regime::DensityRobust;
  if (name == "size_robust") return Regime::SizeRobust;
  throw InvalidArgument("unknown training regime '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (batch_size < 1 || max_steps < 1 || steps_per_epoch < 1 || max_epochs < 1 || val_size < 1) {
    throw InvalidArgument("training counts must be >= 1");
  }
  if (patience < 0) throw InvalidArgument("patience must be >= 0");
  if (regime == Regime::DensityRobust && !(d_lo > 0.0 && d_lo <= d_hi)) {
    throw InvalidArgument("density range must satisfy 0 < d_lo <= d_hi");
  }
  if (regime == Regime::SizeRobust && !(m_lo >= 1 && m_lo <= m_hi)) {
    throw InvalidArgument("size range must satisfy 1 <= m_lo <= m_hi");
  }
}

Sampler fixed_topology_sampler(NetworkTopology topo, Mat features) {
  if (features.size() == 0) features = model::default_features(topo.m);
  if (features.rows() != topo.m) throw ShapeError("feature rows must match the topology size");
  const Mat gains = path_gains(topo);
  return [topo = std::move(topo), features = std::move(features), gains](std::uint64_t seed) {
    const Mat fading = sample_fading(topo.m, seed);
    return Sample{ChannelState(gains.cwiseProduct(fading), topo.seed, seed), features};
  };
}

Sampler density_sampler(int m, double d_lo, double d_hi) {
  if (m < 1 || !(d_lo > 0.0 && d_lo <= d_hi)) throw InvalidArgument("invalid density sampler range");
  return [=](std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xD0ULL));
    const double d = rng.uniform(d_lo, d_hi);
    const auto base = sample_topology(m, derive_seed(seed, 1));
    const auto topo = scale_density(base, d, derive_seed(seed, 2));
    const std::uint64_t fading_seed = derive_seed(seed, 3);
    return Sample{channel_state(topo, sample_fading(m, fading_seed), fading_seed), model::default_features(m)};
  };
}

Sampler size_sampler(int n, int m_lo, int m_hi) {
  if (n < 1 || !(m_lo >= 1 && m_lo <= m_hi)) throw InvalidArgument("invalid size sampler range");
  return [=](std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x5EULL));
    const int m = static_cast<int>(rng.uniform_int(m_lo, m_hi));
    const auto base = sample_topology(n, derive_seed(seed, 1));
    const auto topo = resize_network(base, m, derive_seed(seed, 2));
    const std::uint64_t fading_seed = derive_seed(seed, 3);
    return Sample{channel_state(topo, sample_fading(m, fading_seed), fading_seed), model::default_features(m)};
  };
}

OptimizerState OptimizerState::for_params(const model::ModelParams& theta) {
  OptimizerState s;
  for (const Mat* t : theta.tensors()) {
    s.first_moment.push_back(Mat::Zero(t->rows(), t->cols()));
    s.second_moment.push_back(Mat::Zero(t->rows(), t->cols()));
  }
  return s;
}

void adam_step(OptimizerState& state, model::ModelParams& theta, const grad::GradientMap& grads, double lr) {
  auto tensors = theta.tensors();
  if (tensors.size() != state.first_moment.size()) throw ShapeError("optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Mat& m1 = state.first_moment[k];
    Mat& m2 = state.second_moment[k];
    const auto it = grads.find(static_cast<int>(k));
    const Mat g = it != grads.end() ? it->second : Mat::Zero(m1.rows(), m1.cols());
    if (g.rows() != m1.rows() || g.cols() != m1.cols()) throw ShapeError("gradient shape mismatch");
    m1 = state.beta1 * m1 + (1.0 - state.beta1) * g;
    m2 = state.beta2 * m2 + (1.0 - state.beta2) * g.cwiseProduct(g);
    Mat& t = *tensors[k];
    t.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + state.epsilon);
  }
}

Var batch_loss(Tape& tape, const model::TapeParams& params, const model::ModelParams& shape,
               const std::vector<Sample>& batch, const ProblemConfig& cfg) {
  if (batch.empty()) throw InvalidArgument("batch_loss: empty batch");
  Var total = sample_utility(tape, params, shape, batch.front(), cfg);
  for (std::size_t k = 1; k < batch.size(); ++k) total = total + sample_utility(tape, params, shape, batch[k], cfg);
  return (-1.0 / static_cast<double>(batch.size())) * total;
}

LossAndGradient batch_loss_and_gradient(const model::ModelParams& theta, const std::vector<Sample>& batch,
                                        const ProblemConfig& cfg) {
  if (batch.empty()) throw InvalidArgument("batch_loss: empty batch");
  const double scale = -1.0 / static_cast<double>(batch.size());
  LossAndGradient out;
  for (const Sample& s : batch) {
    Tape tape;
    const auto params = model::bind_params(tape, theta);
    const Var loss = scale * sample_utility(tape, params, theta, s, cfg);
    out.loss += loss.scalar();
    grad::accumulate(out.gradient, tape.backward(loss));
  }
  return out;
}

double mean_utility(const model::ModelParams& theta, const std::vector<Sample>& samples, const ProblemConfig& cfg) {
  if (samples.empty()) throw InvalidArgument("mean_utility: no samples");
  double total = 0.0;
  for (const Sample& s : samples) {
    const auto fwd = model::forward(s.h, s.q, theta, cfg);
    total += sum_utility(rates(fwd.p, s.h, cfg.noise_std), cfg.utility);
  }
  return total / static_cast<double>(samples.size());
}

std::vector<Sample> draw_samples(const Sampler& sampler, std::uint64_t seed, int count) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(sampler(derive_seed(seed, static_cast<std::uint64_t>(k))));
  return out;
}

TrainReport train(const TrainConfig& cfg, const Sampler& sampler, model::ModelParams theta0,
                  const ProblemConfig& problem) {
  cfg.validate();
  problem.validate();

  model::ModelParams theta = std::move(theta0);
  OptimizerState opt = OptimizerState::for_params(theta);
  const auto validation = draw_samples(sampler, derive_seed(cfg.seed, kValidationStream), cfg.val_size);

  TrainReport report;
  report.beta1 = opt.beta1;
  report.beta2 = opt.beta2;
  report.epsilon = opt.epsilon;
  report.best = theta;
  report.best_val_utility = -std::numeric_limits<double>::infinity();
  report.step_loss.reserve(static_cast<std::size_t>(cfg.max_steps));

  const std::uint64_t train_seed = derive_seed(cfg.seed, kTrainStream);
  int stale_epochs = 0;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto batch = draw_samples(sampler, derive_seed(train_seed, static_cast<std::uint64_t>(step)), cfg.batch_size);
    const auto lg = batch_loss_and_gradient(theta, batch, problem);
    report.step_loss.push_back(lg.loss);
    adam_step(opt, theta, lg.gradient, cfg.learning_rate);
    report.steps = step + 1;

    const bool epoch_end = (step + 1) % cfg.steps_per_epoch == 0 || step + 1 == cfg.max_steps;
    if (!epoch_end) continue;
    const double val = mean_utility(theta, validation, problem);
    report.val_utility.push_back(val);
    const int epoch = static_cast<int>(report.val_utility.size());
    if (val > report.best_val_utility) {
      report.best_val_utility = val;
      report.best_epoch = epoch;
      report.best = theta;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }
    if (stale_epochs >= cfg.patience) {
      report.stop_reason = "patience";
      return report;
    }
    if (epoch >= cfg.max_epochs) {
      report.stop_reason = "max_epochs";
      return report;
    }
  }
  report.stop_reason = "max_steps";
  return report;
}

TrainReport train_robust(const TrainConfig& cfg, int m, model::ModelParams theta0, const ProblemConfig& problem) {
  cfg.validate();
  switch (cfg.regime) {
    case Regime::DensityRobust:
      return train(cfg, density_sampler(m, cfg.d_lo, cfg.d_hi), std::move(theta0), problem);
    case Regime::SizeRobust:
      return train(cfg, size_sampler(m, cfg.m_lo, cfg.m_hi), std::move(theta0), problem);
    case Regime::FixedTopology:
      break;
  }
  throw InvalidArgument("train_robust requires a density- or size-robust regime");
}

}  // namespace uwmmse::train
