#include "uwmmse/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace uwmmse::io {

using nlohmann::json;

namespace {

json points_json(const std::vector<Point>& pts) {
  json out = json::array();
  for (const Point& p : pts) out.push_back({p.x, p.y});
  return out;
}

std::vector<Point> parse_points(const json& j) {
  std::vector<Point> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw FormatError("position must be an [x, y] pair");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json flatten(const Mat& x) {
  json out = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.push_back(x(i, j));
  }
  return out;
}

Mat unflatten(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows * cols)) {
    throw FormatError(std::string(what) + ": expected " + std::to_string(rows * cols) + " values");
  }
  Mat out(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj) out(i, jj) = j[k++].get<double>();
  }
  return out;
}

void check_schema(const json& j) {
  const int version = j.value("schema_version", 0);
  if (version != kSchemaVersion) {
    throw FormatError("unsupported schema_version " + std::to_string(version));
  }
}

json psi_json(const model::PsiParams& p) {
  if (const auto* g = std::get_if<model::GcnParams>(&p)) {
    return {{"w11", flatten(g->w11)}, {"w12", flatten(g->w12)}, {"w21", flatten(g->w21)}, {"w22", flatten(g->w22)}};
  }
  json taps = json::array();
  for (const Mat& t : std::get<model::RegnnParams>(p).taps) taps.push_back(flatten(t));
  return {{"taps", taps}};
}

model::PsiParams parse_psi(const json& j, const model::ModelParams& shape) {
  if (shape.variant == model::PsiVariant::Gcn) {
    model::GcnParams g;
    g.w11 = unflatten(j.at("w11"), shape.features, shape.hidden, "w11");
    g.w12 = unflatten(j.at("w12"), shape.features, shape.hidden, "w12");
    g.w21 = unflatten(j.at("w21"), shape.hidden, 1, "w21");
    g.w22 = unflatten(j.at("w22"), shape.hidden, 1, "w22");
    return g;
  }
  model::RegnnParams r;
  const json& taps = j.at("taps");
  if (taps.size() != static_cast<std::size_t>(shape.regnn_layers)) throw FormatError("wrong number of REGNN layers");
  for (const auto& t : taps) r.taps.push_back(unflatten(t, shape.regnn_taps + 1, 1, "taps"));
  return r;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string channel_record_json(const ChannelRecord& rec) {
  const Mat& g = rec.h.gains();
  json j;
  j["schema_version"] = kSchemaVersion;
  j["m"] = g.rows();
  j["tx_pos"] = points_json(rec.topology.tx_pos);
  j["rx_pos"] = points_json(rec.topology.rx_pos);
  j["gen_box_halfwidth"] = rec.topology.gen_box_halfwidth;
  j["gains"] = flatten(g);
  j["noise_std"] = rec.noise_std;
  j["seeds"] = {{"topology", rec.h.topology_seed()}, {"fading", rec.h.fading_seed()}};
  return j.dump();
}

ChannelRecord parse_channel_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed channel record: ") + e.what());
  }
  try {
    check_schema(j);
    const auto m = j.at("m").get<Eigen::Index>();
    if (m < 1) throw FormatError("m must be >= 1");
    NetworkTopology topo;
    topo.m = static_cast<int>(m);
    topo.tx_pos = parse_points(j.at("tx_pos"));
    topo.rx_pos = parse_points(j.at("rx_pos"));
    topo.gen_box_halfwidth = j.value("gen_box_halfwidth", 0.0);
    const auto& seeds = j.at("seeds");
    topo.seed = seeds.at("topology").get<std::uint64_t>();
    if (topo.tx_pos.size() != static_cast<std::size_t>(m) || topo.rx_pos.size() != static_cast<std::size_t>(m)) {
      throw FormatError("position lists must have m entries");
    }
    ChannelState h(unflatten(j.at("gains"), m, m, "gains"), topo.seed, seeds.at("fading").get<std::uint64_t>());
    return {std::move(topo), std::move(h), j.at("noise_std").get<double>()};
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid channel record: ") + e.what());
  }
}

void write_dataset(const std::string& path, const std::vector<ChannelRecord>& records) {
  std::string text;
  for (const auto& rec : records) {
    text += channel_record_json(rec);
    text += '\n';
  }
  write_file(path, text);
}

std::vector<ChannelRecord> read_dataset(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ChannelRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_channel_record(line));
  }
  return out;
}

std::string checkpoint_json(const Checkpoint& ckpt) {
  const model::ModelParams& t = ckpt.theta;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = std::string(model::to_string(t.variant));
  j["K"] = t.depth();
  j["F"] = t.hidden;
  j["F_in"] = t.features;
  j["regnn_layers"] = t.regnn_layers;
  j["regnn_taps"] = t.regnn_taps;
  j["seed"] = t.seed;
  json layers = json::array();
  for (const auto& layer : t.layers) layers.push_back({{"theta_a", psi_json(layer.theta_a)}, {"theta_b", psi_json(layer.theta_b)}});
  j["layers"] = layers;
  j["training"] = json::parse(ckpt.training_json);
  return j.dump(2);
}

Checkpoint parse_checkpoint(std::string_view text) {
  try {
    const json j = json::parse(text);
    check_schema(j);
    Checkpoint out;
    model::ModelParams& t = out.theta;
    t.variant = model::psi_variant_from_name(j.at("variant").get<std::string>());
    t.hidden = j.at("F").get<int>();
    t.features = j.at("F_in").get<int>();
    t.regnn_layers = j.value("regnn_layers", model::kDefaultRegnnLayers);
    t.regnn_taps = j.value("regnn_taps", model::kDefaultRegnnTaps);
    t.seed = j.at("seed").get<std::uint64_t>();
    const int depth = j.at("K").get<int>();
    const json& layers = j.at("layers");
    if (layers.size() != static_cast<std::size_t>(depth)) throw FormatError("layer count does not match K");
    for (const auto& layer : layers) {
      t.layers.push_back({parse_psi(layer.at("theta_a"), t), parse_psi(layer.at("theta_b"), t)});
    }
    out.training_json = j.value("training", json::object()).dump();
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) { write_file(path, checkpoint_json(ckpt) + "\n"); }

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

std::string train_report_json(const train::TrainReport& report, const train::TrainConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = {{"learning_rate", cfg.learning_rate},
                 {"batch_size", cfg.batch_size},
                 {"max_steps", cfg.max_steps},
                 {"steps_per_epoch", cfg.steps_per_epoch},
                 {"max_epochs", cfg.max_epochs},
                 {"patience", cfg.patience},
                 {"val_size", cfg.val_size},
                 {"regime", std::string(train::to_string(cfg.regime))},
                 {"d_range", {cfg.d_lo, cfg.d_hi}},
                 {"m_range", {cfg.m_lo, cfg.m_hi}},
                 {"seed", cfg.seed}};
  j["optimizer"] = {{"beta1", report.beta1}, {"beta2", report.beta2}, {"epsilon", report.epsilon}};
  j["steps"] = report.steps;
  j["stop_reason"] = report.stop_reason;
  j["best_epoch"] = report.best_epoch;
  j["best_val_utility"] = report.best_val_utility;
  j["val_utility"] = report.val_utility;
  j["step_loss"] = report.step_loss;
  j["validation_monitor"] = "mean_sum_utility";
  return j.dump(2);
}

void write_loss_csv(std::ostream& out, const train::TrainReport& report) {
  out << "step,loss\n";
  for (std::size_t i = 0; i < report.step_loss.size(); ++i) out << i + 1 << ',' << format_double(report.step_loss[i]) << '\n';
}

void write_validation_csv(std::ostream& out, const train::TrainReport& report) {
  out << "epoch,val_utility\n";
  for (std::size_t i = 0; i < report.val_utility.size(); ++i) {
    out << i + 1 << ',' << format_double(report.val_utility[i]) << '\n';
  }
}

void write_message_log_csv(std::ostream& out, const distsim::MessageLog& log) {
  out << "layer,phase,sender,bytes\n";
  for (const auto& r : log.records) {
    out << r.layer + 1 << ',' << static_cast<int>(r.phase) << ',' << r.sender << ',' << r.bytes << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace uwmmse::io
