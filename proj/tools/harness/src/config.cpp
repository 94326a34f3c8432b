#include "uwmmse_tools/config.hpp"

#include <uwmmse/io.hpp>
#include <uwmmse/rng.hpp>

#include <set>

namespace uwmmse::tools {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

void read_train(const json& j, train::TrainConfig& t) {
  if (!j.is_object()) throw ConfigError("config key 'train' must be an object");
  reject_unknown(j,
                 {"learning_rate", "batch_size", "max_steps", "steps_per_epoch", "max_epochs", "patience", "val_size",
                  "regime", "d_range", "m_range"},
                 "train.");
  take(j, "learning_rate", t.learning_rate);
  take(j, "batch_size", t.batch_size);
  take(j, "max_steps", t.max_steps);
  take(j, "steps_per_epoch", t.steps_per_epoch);
  take(j, "max_epochs", t.max_epochs);
  take(j, "patience", t.patience);
  take(j, "val_size", t.val_size);
  if (j.contains("regime")) {
    try {
      t.regime = train::regime_from_name(j.at("regime").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  std::vector<double> d;
  take(j, "d_range", d);
  if (!d.empty()) {
    if (d.size() != 2) throw ConfigError("train.d_range must be [lo, hi]");
    t.d_lo = d[0];
    t.d_hi = d[1];
  }
  std::vector<int> mr;
  take(j, "m_range", mr);
  if (!mr.empty()) {
    if (mr.size() != 2) throw ConfigError("train.m_range must be [lo, hi]");
    t.m_lo = mr[0];
    t.m_hi = mr[1];
  }
}

}  // namespace

SeedSet SeedSet::from_master(std::uint64_t master) {
  return {master, derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3), derive_seed(master, 4)};
}

double ExperimentConfig::noise_std() const {
  if (noise == "low") return sigma_low;
  if (noise == "high") return sigma_high;
  throw ConfigError("noise must be \"low\" or \"high\", got \"" + noise + "\"");
}

ProblemConfig ExperimentConfig::problem() const {
  ProblemConfig p;
  p.noise_std = noise_std();
  p.p_max = p_max;
  try {
    p.utility = UtilityKind::from_name(utility, weights);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  p.modified_w_update = modified_w_update;
  return p;
}

model::PsiVariant ExperimentConfig::psi_variant() const {
  try {
    return model::psi_variant_from_name(variant);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (depth < 1) throw ConfigError("K must be >= 1");
  if (hidden < 1) throw ConfigError("F must be >= 1");
  if (!(p_max > 0.0)) throw ConfigError("p_max must be > 0");
  if (test_samples < 1) throw ConfigError("test_samples must be >= 1");
  if (!(sigma_low > 0.0) || !(sigma_high > 0.0)) throw ConfigError("noise levels must be > 0");
  if (features != "ones" && features != "distance") throw ConfigError("features must be \"ones\" or \"distance\"");
  if (wmmse_iterations < 1) throw ConfigError("wmmse_iterations must be >= 1");
  if (timing_samples < 1 || generalize_samples < 1 || trace_samples < 1 || distsim_samples < 1) {
    throw ConfigError("sample counts must be >= 1");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
  (void)noise_std();
  (void)psi_variant();
  try {
    problem().validate();
    train.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"m", "K", "F", "p_max", "test_samples", "sigma_low", "sigma_high", "noise", "utility", "weights",
                  "variant", "features", "modified_w_update", "wmmse_iterations", "wmmse_tol", "seed", "train",
                  "checkpoint", "robust_density_checkpoint", "robust_size_checkpoint", "train_inline",
                  "timing_samples", "depth_grid", "width_grid", "density_grid", "size_grid", "generalize_samples",
                  "trace_samples", "distsim_samples", "threads", "out", "seeds", "schema_version"},
                 "");
  take(j, "m", c.m);
  take(j, "K", c.depth);
  take(j, "F", c.hidden);
  take(j, "p_max", c.p_max);
  take(j, "test_samples", c.test_samples);
  take(j, "sigma_low", c.sigma_low);
  take(j, "sigma_high", c.sigma_high);
  take(j, "noise", c.noise);
  take(j, "utility", c.utility);
  take(j, "weights", c.weights);
  take(j, "variant", c.variant);
  take(j, "features", c.features);
  take(j, "modified_w_update", c.modified_w_update);
  take(j, "wmmse_iterations", c.wmmse_iterations);
  take(j, "wmmse_tol", c.wmmse_tol);
  take(j, "seed", c.seed);
  if (j.contains("train")) read_train(j.at("train"), c.train);
  take(j, "checkpoint", c.checkpoint);
  take(j, "robust_density_checkpoint", c.robust_density_checkpoint);
  take(j, "robust_size_checkpoint", c.robust_size_checkpoint);
  take(j, "train_inline", c.train_inline);
  take(j, "timing_samples", c.timing_samples);
  take(j, "depth_grid", c.depth_grid);
  take(j, "width_grid", c.width_grid);
  take(j, "density_grid", c.density_grid);
  take(j, "size_grid", c.size_grid);
  take(j, "generalize_samples", c.generalize_samples);
  take(j, "trace_samples", c.trace_samples);
  take(j, "distsim_samples", c.distsim_samples);
  take(j, "threads", c.threads);
  take(j, "out", c.out);
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

json config_to_json(const ExperimentConfig& c) {
  const SeedSet s = c.seeds();
  const train::TrainConfig& t = c.train;
  return {{"schema_version", io::kSchemaVersion},
          {"m", c.m},
          {"K", c.depth},
          {"F", c.hidden},
          {"p_max", c.p_max},
          {"test_samples", c.test_samples},
          {"sigma_low", c.sigma_low},
          {"sigma_high", c.sigma_high},
          {"noise", c.noise},
          {"utility", c.utility},
          {"weights", c.weights},
          {"variant", c.variant},
          {"features", c.features},
          {"modified_w_update", c.modified_w_update},
          {"wmmse_iterations", c.wmmse_iterations},
          {"wmmse_tol", c.wmmse_tol},
          {"seed", c.seed},
          {"seeds", {{"topology", s.topology}, {"test", s.test}, {"init", s.init}, {"train", s.train}}},
          {"train",
           {{"learning_rate", t.learning_rate},
            {"batch_size", t.batch_size},
            {"max_steps", t.max_steps},
            {"steps_per_epoch", t.steps_per_epoch},
            {"max_epochs", t.max_epochs},
            {"patience", t.patience},
            {"val_size", t.val_size},
            {"regime", std::string(train::to_string(t.regime))},
            {"d_range", {t.d_lo, t.d_hi}},
            {"m_range", {t.m_lo, t.m_hi}}}},
          {"checkpoint", c.checkpoint},
          {"robust_density_checkpoint", c.robust_density_checkpoint},
          {"robust_size_checkpoint", c.robust_size_checkpoint},
          {"train_inline", c.train_inline},
          {"timing_samples", c.timing_samples},
          {"depth_grid", c.depth_grid},
          {"width_grid", c.width_grid},
          {"density_grid", c.density_grid},
          {"size_grid", c.size_grid},
          {"generalize_samples", c.generalize_samples},
          {"trace_samples", c.trace_samples},
          {"distsim_samples", c.distsim_samples},
          {"threads", c.threads},
          {"out", c.out}};
}

}  // namespace uwmmse::tools
