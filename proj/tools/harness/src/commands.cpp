#include "uwmmse_tools/commands.hpp"

#include <uwmmse/distsim.hpp>
#include <uwmmse/rng.hpp>
#include <uwmmse/wmmse.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

namespace uwmmse::tools {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

class Outputs {
 public:
  Outputs(const ExperimentConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw RuntimeFailure("cannot create output directory '" + cfg.out + "': " + ec.message());
  }

  std::string path(const std::string& name) const { return (fs::path(cfg_.out) / name).string(); }

  void csv(const std::string& name, const std::string& body) {
    write(name, csv_document(command_, cfg_, body));
  }

  void json_file(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void raw(const std::string& name, const std::string& text) { write(name, text); }

  CommandResult finish(json summary) {
    summary["schema_version"] = io::kSchemaVersion;
    summary["command"] = command_;
    summary["config"] = config_to_json(cfg_);
    std::string name = command_ + "_summary.json";
    for (char& c : name) {
      if (c == '-') c = '_';
    }
    json_file(name, summary);
    return {files_, std::move(summary)};
  }

 private:
  void write(const std::string& name, const std::string& text) {
    try {
      io::write_file(path(name), text);
    } catch (const std::exception& e) {
      throw RuntimeFailure(e.what());
    }
    files_.push_back(path(name));
  }

  const ExperimentConfig& cfg_;
  std::string command_;
  std::vector<std::string> files_;
};

std::string num(double x) { return io::format_double(x); }

json method_summary(const std::vector<double>& x) { return {{"mean", mean(x)}, {"std", stddev(x)}}; }

double fraction_below(const Vec& x, double threshold) {
  if (x.size() == 0) return 0.0;
  return static_cast<double>((x.array() < threshold).count()) / static_cast<double>(x.size());
}

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

io::Checkpoint robust_checkpoint(const ExperimentConfig& cfg, const std::string& path, train::Regime regime) {
  if (!path.empty()) return obtain_checkpoint(cfg, path);
  if (!cfg.train_inline) {
    throw RuntimeFailure(std::string("no ") + std::string(train::to_string(regime)) +
                         " checkpoint given (set the robust checkpoint path or \"train_inline\")");
  }
  ExperimentConfig c = cfg;
  c.train.regime = regime;
  const SeedSet seeds = cfg.seeds();
  train::TrainConfig t = c.train;
  t.seed = seeds.train;
  auto theta0 = model::init_params(seeds.init, cfg.hidden, 1, cfg.depth, cfg.psi_variant());
  return make_checkpoint(c, train::train_robust(t, cfg.m, std::move(theta0), cfg.problem()));
}

void require_ones_features(const ExperimentConfig& cfg, const char* what) {
  if (cfg.features != "ones") throw ConfigError(std::string(what) + " supports only features = \"ones\"");
}

}  // namespace

CommandResult cmd_gen(const ExperimentConfig& cfg) {
  cfg.validate();
  Outputs out(cfg, "gen");
  const NetworkTopology topo = experiment_topology(cfg);
  const auto samples = test_set(cfg, topo, cfg.test_samples);
  std::vector<io::ChannelRecord> records;
  records.reserve(samples.size());
  for (const auto& s : samples) records.push_back({topo, s.h, cfg.noise_std()});
  std::string text;
  for (const auto& r : records) text += io::channel_record_json(r) + "\n";
  out.raw("dataset.ndjson", text);
  return out.finish({{"samples", samples.size()}, {"m", cfg.m}, {"noise_std", cfg.noise_std()}});
}

CommandResult cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  Outputs out(cfg, "train");
  train::TrainReport report;
  io::Checkpoint ckpt;
  if (cfg.train.regime == train::Regime::FixedTopology) {
    report = train_fixed(cfg, cfg.depth, cfg.hidden);
    ckpt = make_checkpoint(cfg, report);
  } else {
    require_ones_features(cfg, "robust training");
    const SeedSet seeds = cfg.seeds();
    train::TrainConfig t = cfg.train;
    t.seed = seeds.train;
    auto theta0 = model::init_params(seeds.init, cfg.hidden, 1, cfg.depth, cfg.psi_variant());
    report = train::train_robust(t, cfg.m, std::move(theta0), cfg.problem());
    ckpt = make_checkpoint(cfg, report);
  }
  train::TrainConfig t = cfg.train;
  t.seed = cfg.seeds().train;
  out.raw("checkpoint.json", io::checkpoint_json(ckpt) + "\n");
  out.raw("train_report.json", io::train_report_json(report, t) + "\n");
  std::ostringstream loss;
  io::write_loss_csv(loss, report);
  out.csv("loss.csv", loss.str());
  std::ostringstream val;
  io::write_validation_csv(val, report);
  out.csv("validation.csv", val.str());
  return out.finish({{"steps", report.steps},
                     {"stop_reason", report.stop_reason},
                     {"best_epoch", report.best_epoch},
                     {"best_val_utility", report.best_val_utility},
                     {"checkpoint", out.path("checkpoint.json")}});
}

CommandResult cmd_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const io::Checkpoint ckpt = obtain_checkpoint(cfg, cfg.checkpoint);
  Outputs out(cfg, "compare");
  const NetworkTopology topo = experiment_topology(cfg);
  const auto samples = test_set(cfg, topo, cfg.test_samples);
  const MethodScores s = evaluate_methods(cfg, ckpt.theta, samples);

  std::string body = "sample,wmmse,tr_wmmse,uwmmse\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    body += std::to_string(k) + ',' + num(s.wmmse[k]) + ',' + num(s.truncated[k]) + ',' + num(s.uwmmse[k]) + '\n';
  }
  out.csv("compare_samples.csv", body);
  std::string table = "method,mean,std\n";
  table += "wmmse," + num(mean(s.wmmse)) + ',' + num(stddev(s.wmmse)) + '\n';
  table += "tr_wmmse," + num(mean(s.truncated)) + ',' + num(stddev(s.truncated)) + '\n';
  table += "uwmmse," + num(mean(s.uwmmse)) + ',' + num(stddev(s.uwmmse)) + '\n';
  out.csv("compare_table.csv", table);

  // Wall-clock per sample, measured sequentially on one thread.
  const ProblemConfig problem = cfg.problem();
  wmmse::SolveOptions opts;
  opts.max_iter = cfg.wmmse_iterations;
  opts.tol = cfg.wmmse_tol;
  opts.utility = problem.update_utility();
  opts.p_max = problem.p_max;
  opts.noise_std = problem.noise_std;
  const int timed = std::min<int>(cfg.timing_samples, static_cast<int>(samples.size()));
  double t_wmmse = 0.0;
  double t_tr = 0.0;
  double t_uw = 0.0;
  for (int k = 0; k < timed; ++k) {
    const auto& x = samples[static_cast<std::size_t>(k)];
    t_wmmse += time_ms([&] { (void)wmmse::solve(x.h, opts); });
    t_tr += time_ms([&] { (void)wmmse::solve_truncated(x.h, opts, ckpt.theta.depth()); });
    t_uw += time_ms([&] { (void)model::forward(x.h, x.q, ckpt.theta, problem); });
  }
  const double denom = timed > 0 ? timed : 1;
  json timing = {{"samples", timed},
                 {"wmmse_ms", t_wmmse / denom},
                 {"tr_wmmse_ms", t_tr / denom},
                 {"uwmmse_ms", t_uw / denom},
                 {"uwmmse_over_wmmse", t_wmmse > 0.0 ? t_uw / t_wmmse : 0.0}};
  return out.finish({{"wmmse", method_summary(s.wmmse)},
                     {"tr_wmmse", method_summary(s.truncated)},
                     {"uwmmse", method_summary(s.uwmmse)},
                     {"time_per_sample", timing},
                     {"training", json::parse(ckpt.training_json)}});
}

CommandResult cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.depth_grid.empty() && cfg.width_grid.empty()) throw ConfigError("sweep needs a non-empty depth or width grid");
  for (int k : cfg.depth_grid) {
    if (k < 1) throw ConfigError("depth_grid entries must be >= 1");
  }
  for (int f : cfg.width_grid) {
    if (f < 1) throw ConfigError("width_grid entries must be >= 1");
  }
  Outputs out(cfg, "sweep");
  const NetworkTopology topo = experiment_topology(cfg);
  const auto samples = test_set(cfg, topo, cfg.test_samples);

  std::map<std::pair<int, int>, MethodScores> results;
  auto run_point = [&](int depth, int hidden) -> const MethodScores& {
    const auto key = std::make_pair(depth, hidden);
    auto it = results.find(key);
    if (it == results.end()) {
      const auto report = train_fixed(cfg, depth, hidden);
      it = results.emplace(key, evaluate_methods(cfg, report.best, samples)).first;
    }
    return it->second;
  };

  std::string table = "axis,K,F,uwmmse_mean,uwmmse_std,tr_wmmse_mean,wmmse_mean\n";
  std::string dist = "axis,K,F,sample,uwmmse\n";
  json points = json::array();
  auto emit = [&](const char* axis, int depth, int hidden) {
    const MethodScores& s = run_point(depth, hidden);
    table += std::string(axis) + ',' + std::to_string(depth) + ',' + std::to_string(hidden) + ',' + num(mean(s.uwmmse)) +
             ',' + num(stddev(s.uwmmse)) + ',' + num(mean(s.truncated)) + ',' + num(mean(s.wmmse)) + '\n';
    for (std::size_t k = 0; k < s.uwmmse.size(); ++k) {
      dist += std::string(axis) + ',' + std::to_string(depth) + ',' + std::to_string(hidden) + ',' + std::to_string(k) +
              ',' + num(s.uwmmse[k]) + '\n';
    }
    points.push_back({{"axis", axis}, {"K", depth}, {"F", hidden}, {"uwmmse", method_summary(s.uwmmse)}});
  };
  for (int depth : cfg.depth_grid) emit("depth", depth, cfg.hidden);
  for (int hidden : cfg.width_grid) emit("width", cfg.depth, hidden);
  out.csv("sweep.csv", table);
  out.csv("sweep_samples.csv", dist);
  return out.finish({{"points", points}, {"trained_models", results.size()}});
}

CommandResult cmd_trace_ab(const ExperimentConfig& cfg) {
  cfg.validate();
  const io::Checkpoint ckpt = obtain_checkpoint(cfg, cfg.checkpoint);
  const model::ModelParams& theta = ckpt.theta;
  if (theta.depth() < 1) throw RuntimeFailure("checkpoint has no layers");
  Outputs out(cfg, "trace-ab");
  const NetworkTopology topo = experiment_topology(cfg);
  const auto samples = test_set(cfg, topo, cfg.trace_samples);
  const ProblemConfig problem = cfg.problem();
  wmmse::SolveOptions opts;
  opts.max_iter = cfg.wmmse_iterations;
  opts.tol = cfg.wmmse_tol;
  opts.utility = problem.update_utility();
  opts.p_max = problem.p_max;
  opts.noise_std = problem.noise_std;

  const auto n = samples.size();
  std::vector<model::UnfoldTrace> traces(n);
  std::vector<std::vector<Vec>> residuals(n);
  std::vector<std::vector<bool>> included(n);
  std::vector<char> converged(n, 0);
  parallel_for(static_cast<int>(n), cfg.threads, [&](int k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& x = samples[uk];
    traces[uk] = model::forward(x.h, x.q, theta, problem).trace;
    const auto fixed = wmmse::solve(x.h, opts);
    if (fixed.converged) {
      converged[uk] = 1;
      residuals[uk] = model::theorem1_residual(traces[uk], fixed, x.h);
      included[uk] = model::theorem1_included(fixed);
    }
  });

  const int depth = theta.depth();
  std::string ab = "sample,layer,node,a,b\n";
  std::string res = "sample,layer,node,included,residual\n";
  std::vector<double> frac_b(static_cast<std::size_t>(depth), 0.0);
  std::vector<double> frac_a(static_cast<std::size_t>(depth), 0.0);
  int last_exceeds_first = 0;
  int converged_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& layers = traces[k].layers;
    for (int l = 0; l < depth; ++l) {
      const auto& lt = layers[static_cast<std::size_t>(l)];
      for (Eigen::Index i = 0; i < lt.a.size(); ++i) {
        ab += std::to_string(k) + ',' + std::to_string(l + 1) + ',' + std::to_string(i) + ',' + num(lt.a(i)) + ',' +
              num(lt.b(i)) + '\n';
      }
      frac_b[static_cast<std::size_t>(l)] += fraction_below(lt.b, 0.1);
      frac_a[static_cast<std::size_t>(l)] += 1.0 - fraction_below(lt.a, 0.9);
      if (converged[k] != 0) {
        const Vec& r = residuals[k][static_cast<std::size_t>(l)];
        for (Eigen::Index i = 0; i < r.size(); ++i) {
          res += std::to_string(k) + ',' + std::to_string(l + 1) + ',' + std::to_string(i) + ',' +
                 (included[k][static_cast<std::size_t>(i)] ? "1" : "0") + ',' + num(r(i)) + '\n';
        }
      }
    }
    if (fraction_below(layers.back().b, 0.1) > fraction_below(layers.front().b, 0.1)) ++last_exceeds_first;
    converged_count += converged[k];
  }
  out.csv("trace_ab.csv", ab);
  out.csv("theorem1_residual.csv", res);

  json per_layer = json::array();
  for (int l = 0; l < depth; ++l) {
    per_layer.push_back({{"layer", l + 1},
                         {"fraction_b_below_0.1", frac_b[static_cast<std::size_t>(l)] / static_cast<double>(n)},
                         {"fraction_a_above_0.9", frac_a[static_cast<std::size_t>(l)] / static_cast<double>(n)}});
  }
  return out.finish({{"samples", n},
                     {"K", depth},
                     {"per_layer", per_layer},
                     {"share_last_b_below_exceeds_first", static_cast<double>(last_exceeds_first) / static_cast<double>(n)},
                     {"residual_samples", converged_count}});
}

CommandResult cmd_generalize(const ExperimentConfig& cfg) {
  cfg.validate();
  require_ones_features(cfg, "generalize");
  if (cfg.density_grid.empty() || cfg.size_grid.empty()) throw ConfigError("generalize needs density and size grids");
  for (double d : cfg.density_grid) {
    if (!(d > 0.0)) throw ConfigError("density_grid entries must be > 0");
  }
  for (int s : cfg.size_grid) {
    if (s < 1) throw ConfigError("size_grid entries must be >= 1");
  }
  const io::Checkpoint fixed = obtain_checkpoint(cfg, cfg.checkpoint);
  const io::Checkpoint ro_density =
      robust_checkpoint(cfg, cfg.robust_density_checkpoint, train::Regime::DensityRobust);
  const io::Checkpoint ro_size = robust_checkpoint(cfg, cfg.robust_size_checkpoint, train::Regime::SizeRobust);
  Outputs out(cfg, "generalize");

  const NetworkTopology base = experiment_topology(cfg);
  const ProblemConfig problem = cfg.problem();
  wmmse::SolveOptions opts;
  opts.max_iter = cfg.wmmse_iterations;
  opts.tol = cfg.wmmse_tol;
  opts.utility = problem.update_utility();
  opts.p_max = problem.p_max;
  opts.noise_std = problem.noise_std;
  const std::uint64_t test_seed = cfg.seeds().test;

  struct Row {
    double uw = 0.0;
    double ro = 0.0;
    double w = 0.0;
    double tr = 0.0;
  };
  // Every grid point draws its own receiver drops (and appended pairs) and
  // fading; all four methods see the same instances.
  auto evaluate = [&](const std::function<NetworkTopology(std::uint64_t)>& topology_for, const io::Checkpoint& ro,
                      std::uint64_t stream) {
    const int n = cfg.generalize_samples;
    std::vector<Row> rows(static_cast<std::size_t>(n));
    parallel_for(n, cfg.threads, [&](int k) {
      const std::uint64_t s = derive_seed(test_seed, stream, static_cast<std::uint64_t>(k));
      const NetworkTopology topo = topology_for(derive_seed(s, 1));
      const std::uint64_t fading_seed = derive_seed(s, 2);
      const ChannelState h = channel_state(topo, sample_fading(topo.m, fading_seed), fading_seed);
      const Mat q = model::default_features(topo.m);
      const auto score = [&](const Vec& p) { return sum_utility(rates(p, h, problem.noise_std), problem.utility); };
      Row& r = rows[static_cast<std::size_t>(k)];
      r.uw = score(model::forward(h, q, fixed.theta, problem).p);
      r.ro = score(model::forward(h, q, ro.theta, problem).p);
      r.w = score(wmmse::solve(h, opts).p);
      r.tr = score(wmmse::solve_truncated(h, opts, fixed.theta.depth()).p);
    });
    Row m;
    for (const Row& r : rows) {
      m.uw += r.uw / n;
      m.ro += r.ro / n;
      m.w += r.w / n;
      m.tr += r.tr / n;
    }
    return m;
  };
  auto row_json = [](const Row& r) { return json{{"uwmmse", r.uw}, {"ro_uwmmse", r.ro}, {"wmmse", r.w}, {"tr_wmmse", r.tr}}; };

  std::string density = "d,uwmmse,ro_uwmmse,wmmse,tr_wmmse\n";
  json density_json = json::array();
  for (std::size_t g = 0; g < cfg.density_grid.size(); ++g) {
    const double d = cfg.density_grid[g];
    const Row r = evaluate([&](std::uint64_t s) { return scale_density(base, d, s); }, ro_density, 0xD000 + g);
    density += num(d) + ',' + num(r.uw) + ',' + num(r.ro) + ',' + num(r.w) + ',' + num(r.tr) + '\n';
    json j = row_json(r);
    j["d"] = d;
    density_json.push_back(j);
  }
  std::string size = "M,uwmmse,ro_uwmmse,wmmse,tr_wmmse\n";
  json size_json = json::array();
  for (std::size_t g = 0; g < cfg.size_grid.size(); ++g) {
    const int m_new = cfg.size_grid[g];
    const Row r = evaluate([&](std::uint64_t s) { return resize_network(base, m_new, s); }, ro_size, 0x5000 + g);
    size += std::to_string(m_new) + ',' + num(r.uw) + ',' + num(r.ro) + ',' + num(r.w) + ',' + num(r.tr) + '\n';
    json j = row_json(r);
    j["M"] = m_new;
    size_json.push_back(j);
  }
  out.csv("generalize_density.csv", density);
  out.csv("generalize_size.csv", size);
  return out.finish({{"density", density_json},
                     {"size", size_json},
                     {"training",
                      {{"fixed", json::parse(fixed.training_json)},
                       {"robust_density", json::parse(ro_density.training_json)},
                       {"robust_size", json::parse(ro_size.training_json)}}}});
}

CommandResult cmd_utility(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.utility != "sum_squared_rate") throw ConfigError("utility command requires utility = \"sum_squared_rate\"");
  Outputs out(cfg, "utility");
  const NetworkTopology topo = experiment_topology(cfg);

  std::string table = "update,method,mean,std\n";
  json runs = json::array();
  for (const bool modified : {true, false}) {
    ExperimentConfig c = cfg;
    c.modified_w_update = modified;
    c.features = "ones";
    const auto samples = test_set(c, topo, c.test_samples);
    const auto full = train_fixed(c, c.depth, c.hidden);
    ExperimentConfig ld = c;
    ld.train.max_steps = std::max(1, c.train.max_steps / 2);
    const auto half = train_fixed(ld, c.depth, c.hidden);
    const MethodScores s = evaluate_methods(c, full.best, samples);
    const MethodScores s_ld = evaluate_methods(c, half.best, samples);
    const std::string tag = modified ? "modified" : "unmodified";
    const std::vector<std::pair<std::string, const std::vector<double>*>> rows = {
        {"uwmmse", &s.uwmmse}, {"wmmse", &s.wmmse}, {"tr_wmmse", &s.truncated}, {"uwmmse_ld", &s_ld.uwmmse}};
    json run = {{"update", tag}};
    for (const auto& [name, values] : rows) {
      table += tag + ',' + name + ',' + num(mean(*values)) + ',' + num(stddev(*values)) + '\n';
      run[name] = method_summary(*values);
    }
    runs.push_back(run);
  }
  out.csv("utility.csv", table);

  // Node-feature study on the sum-rate utility.
  std::string feat = "features,mean,std\n";
  json feature_runs = json::array();
  for (const char* features : {"ones", "distance"}) {
    ExperimentConfig c = cfg;
    c.utility = "sum_rate";
    c.modified_w_update = true;
    c.features = features;
    const auto samples = test_set(c, topo, c.test_samples);
    const auto report = train_fixed(c, c.depth, c.hidden);
    const MethodScores s = evaluate_methods(c, report.best, samples);
    feat += std::string(features) + ',' + num(mean(s.uwmmse)) + ',' + num(stddev(s.uwmmse)) + '\n';
    feature_runs.push_back({{"features", features}, {"uwmmse", method_summary(s.uwmmse)}});
  }
  out.csv("utility_features.csv", feat);
  const FeatureStats st = distance_feature_stats(topo);
  return out.finish({{"squared_rate", runs},
                     {"node_features", feature_runs},
                     {"feature_standardization",
                      {{"direct", {st.mean_direct, st.std_direct}}, {"cross", {st.mean_cross, st.std_cross}}}}});
}

CommandResult cmd_distsim(const ExperimentConfig& cfg) {
  cfg.validate();
  const io::Checkpoint ckpt = obtain_checkpoint(cfg, cfg.checkpoint);
  const model::ModelParams& theta = ckpt.theta;
  Outputs out(cfg, "distsim");
  const NetworkTopology topo = experiment_topology(cfg);
  const auto samples = test_set(cfg, topo, cfg.distsim_samples);
  const ProblemConfig problem = cfg.problem();

  const auto n = samples.size();
  std::vector<double> deviation(n);
  std::vector<distsim::DistributedResult> runs(n);
  parallel_for(static_cast<int>(n), cfg.threads, [&](int k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& x = samples[uk];
    runs[uk] = distsim::run_distributed(x.h, x.q, theta, problem);
    const Vec central = model::forward(x.h, x.q, theta, problem).p;
    deviation[uk] = (runs[uk].p - central).cwiseAbs().maxCoeff();
  });

  double max_dev = 0.0;
  std::size_t violations = 0;
  bool counts_match = true;
  const auto m = static_cast<std::size_t>(cfg.m);
  const distsim::MessageCount expected = distsim::message_count(m, theta);
  for (std::size_t k = 0; k < n; ++k) {
    max_dev = std::max(max_dev, deviation[k]);
    violations += runs[k].locality_violations;
    counts_match = counts_match && runs[k].log.broadcasts() == expected.broadcasts &&
                   runs[k].log.directed(m) == expected.directed;
  }

  std::string counts = "m,K,broadcasts,directed,expected_broadcasts,expected_directed,bytes\n";
  if (n > 0) {
    const auto& log = runs.front().log;
    counts += std::to_string(m) + ',' + std::to_string(theta.depth()) + ',' + std::to_string(log.broadcasts()) + ',' +
              std::to_string(log.directed(m)) + ',' + std::to_string(expected.broadcasts) + ',' +
              std::to_string(expected.directed) + ',' + std::to_string(log.total_bytes()) + '\n';
  }
  out.csv("distsim_counts.csv", counts);
  if (n > 0) {
    std::ostringstream log;
    io::write_message_log_csv(log, runs.front().log);
    out.csv("distsim_message_log.csv", log.str());
  }
  std::string dev = "sample,max_abs_deviation\n";
  for (std::size_t k = 0; k < n; ++k) dev += std::to_string(k) + ',' + num(deviation[k]) + '\n';
  out.csv("distsim_deviation.csv", dev);
  return out.finish({{"samples", n},
                     {"max_abs_deviation", max_dev},
                     {"locality_violations", violations},
                     {"counts_match", counts_match},
                     {"expected_broadcasts", expected.broadcasts},
                     {"expected_directed", expected.directed}});
}

}  // namespace uwmmse::tools
