#pragma once

#include "uwmmse/channel.hpp"
#include "uwmmse/distsim.hpp"
#include "uwmmse/model.hpp"
#include "uwmmse/netgen.hpp"
#include "uwmmse/train.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uwmmse::io {

inline constexpr int kSchemaVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of a double (%.17g).
std::string format_double(double x);

// ---------------------------------------------------------------------------
// Channel datasets: one JSON document per line.

struct ChannelRecord {
  NetworkTopology topology;
  ChannelState h;
  double noise_std = 1.0;
};

std::string channel_record_json(const ChannelRecord& rec);
ChannelRecord parse_channel_record(std::string_view line);

void write_dataset(const std::string& path, const std::vector<ChannelRecord>& records);
std::vector<ChannelRecord> read_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Model checkpoints.

struct Checkpoint {
  model::ModelParams theta;
  /// Free-form JSON object describing how the model was trained.
  std::string training_json = "{}";
};

std::string checkpoint_json(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws std::runtime_error if the file is missing.
Checkpoint load_checkpoint(const std::string& path);

// ---------------------------------------------------------------------------
// Training and simulation artifacts.

/// Report without the parameter arrays (those go to the checkpoint).
std::string train_report_json(const train::TrainReport& report, const train::TrainConfig& cfg);

/// "step,loss" rows, 1-based steps.
void write_loss_csv(std::ostream& out, const train::TrainReport& report);
/// "epoch,val_utility" rows, 1-based epochs.
void write_validation_csv(std::ostream& out, const train::TrainReport& report);

/// "layer,phase,sender,bytes" rows in log order.
void write_message_log_csv(std::ostream& out, const distsim::MessageLog& log);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace uwmmse::io
