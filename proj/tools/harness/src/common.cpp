#include "uwmmse_tools/commands.hpp"

#include <uwmmse/rng.hpp>
#include <uwmmse/wmmse.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace uwmmse::tools {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, static_cast<unsigned>(n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

NetworkTopology experiment_topology(const ExperimentConfig& cfg) { return sample_topology(cfg.m, cfg.seeds().topology); }

FeatureStats distance_feature_stats(const NetworkTopology& topo) {
  std::vector<double> direct;
  std::vector<double> cross;
  for (int i = 0; i < topo.m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    direct.push_back(distance(topo.tx_pos[ui], topo.rx_pos[ui]));
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < topo.m; ++j) {
      if (j != i) best = std::min(best, distance(topo.tx_pos[ui], topo.rx_pos[static_cast<std::size_t>(j)]));
    }
    cross.push_back(topo.m > 1 ? best : 0.0);
  }
  FeatureStats s;
  s.mean_direct = mean(direct);
  s.std_direct = stddev(direct);
  s.mean_cross = mean(cross);
  s.std_cross = stddev(cross);
  if (!(s.std_direct > 0.0)) s.std_direct = 1.0;
  if (!(s.std_cross > 0.0)) s.std_cross = 1.0;
  return s;
}

Mat distance_features(const NetworkTopology& topo, const FeatureStats& stats) {
  Mat q(topo.m, 3);
  for (int i = 0; i < topo.m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < topo.m; ++j) {
      if (j != i) best = std::min(best, distance(topo.tx_pos[ui], topo.rx_pos[static_cast<std::size_t>(j)]));
    }
    if (topo.m == 1) best = 0.0;
    q(i, 0) = 1.0;
    q(i, 1) = (distance(topo.tx_pos[ui], topo.rx_pos[ui]) - stats.mean_direct) / stats.std_direct;
    q(i, 2) = (best - stats.mean_cross) / stats.std_cross;
  }
  return q;
}

Mat experiment_features(const ExperimentConfig& cfg, const NetworkTopology& topo) {
  if (cfg.features == "distance") return distance_features(topo, distance_feature_stats(topo));
  return model::default_features(topo.m);
}

std::vector<train::Sample> test_set(const ExperimentConfig& cfg, const NetworkTopology& topo, int count) {
  const auto sampler = train::fixed_topology_sampler(topo, experiment_features(cfg, topo));
  std::vector<train::Sample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(sampler(derive_seed(cfg.seeds().test, static_cast<std::uint64_t>(k))));
  return out;
}

MethodScores evaluate_methods(const ExperimentConfig& cfg, const model::ModelParams& theta,
                              const std::vector<train::Sample>& samples) {
  const ProblemConfig problem = cfg.problem();
  wmmse::SolveOptions opts;
  opts.max_iter = cfg.wmmse_iterations;
  opts.tol = cfg.wmmse_tol;
  opts.utility = problem.update_utility();
  opts.p_max = problem.p_max;
  opts.noise_std = problem.noise_std;
  const auto n = samples.size();
  MethodScores s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  parallel_for(static_cast<int>(n), cfg.threads, [&](int k) {
    const auto& x = samples[static_cast<std::size_t>(k)];
    const auto score = [&](const Vec& p) { return sum_utility(rates(p, x.h, problem.noise_std), problem.utility); };
    const auto uk = static_cast<std::size_t>(k);
    s.wmmse[uk] = score(wmmse::solve(x.h, opts).p);
    s.truncated[uk] = score(wmmse::solve_truncated(x.h, opts, theta.depth()).p);
    s.uwmmse[uk] = score(model::forward(x.h, x.q, theta, problem).p);
  });
  return s;
}

train::TrainReport train_fixed(const ExperimentConfig& cfg, int depth, int hidden) {
  const SeedSet seeds = cfg.seeds();
  const NetworkTopology topo = experiment_topology(cfg);
  const Mat q = experiment_features(cfg, topo);
  auto theta0 = model::init_params(seeds.init, hidden, static_cast<int>(q.cols()), depth, cfg.psi_variant());
  train::TrainConfig t = cfg.train;
  t.seed = seeds.train;
  t.regime = train::Regime::FixedTopology;
  return train::train(t, train::fixed_topology_sampler(topo, q), std::move(theta0), cfg.problem());
}

io::Checkpoint make_checkpoint(const ExperimentConfig& cfg, const train::TrainReport& report) {
  nlohmann::json meta;
  meta["config"] = config_to_json(cfg);
  meta["steps"] = report.steps;
  meta["stop_reason"] = report.stop_reason;
  meta["best_epoch"] = report.best_epoch;
  meta["best_val_utility"] = report.best_val_utility;
  meta["validation_monitor"] = "mean_sum_utility";
  if (cfg.features == "distance") {
    const FeatureStats s = distance_feature_stats(experiment_topology(cfg));
    meta["feature_standardization"] = {{"direct", {s.mean_direct, s.std_direct}}, {"cross", {s.mean_cross, s.std_cross}}};
  }
  return {report.best, meta.dump()};
}

io::Checkpoint obtain_checkpoint(const ExperimentConfig& cfg, const std::string& path) {
  if (!path.empty()) {
    try {
      return io::load_checkpoint(path);
    } catch (const std::exception& e) {
      throw RuntimeFailure("cannot load checkpoint: " + std::string(e.what()));
    }
  }
  if (!cfg.train_inline) throw RuntimeFailure("no checkpoint given (set \"checkpoint\" or \"train_inline\")");
  return make_checkpoint(cfg, train_fixed(cfg, cfg.depth, cfg.hidden));
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size()));
}

std::string csv_document(const std::string& command, const ExperimentConfig& cfg, const std::string& body) {
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::string out = "# uwmmse " + command + "\n";
  out += "# generated: " + std::string(stamp) + "\n";
  out += "# config: " + config_to_json(cfg).dump() + "\n";
  out += body;
  return out;
}

}  // namespace uwmmse::tools
