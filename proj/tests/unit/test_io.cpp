#include "support.hpp"

#include <uwmmse/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace uwmmse::io {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("uwmmse_io_" + name)).string();
}

TEST(ChannelRecord, RoundTrip) {
  const auto topo = sample_topology(5, 3);
  const ChannelState h = channel_state(topo, sample_fading(5, 8), 8);
  const ChannelRecord rec{topo, h, 2.6e-5};
  const auto back = parse_channel_record(channel_record_json(rec));
  EXPECT_EQ(back.h.gains(), h.gains());
  EXPECT_EQ(back.topology.tx_pos, topo.tx_pos);
  EXPECT_EQ(back.topology.rx_pos, topo.rx_pos);
  EXPECT_EQ(back.noise_std, 2.6e-5);
  EXPECT_EQ(back.h.fading_seed(), 8u);
  EXPECT_EQ(back.h.topology_seed(), topo.seed);
  EXPECT_EQ(channel_record_json(rec).find('\n'), std::string::npos);
}

TEST(ChannelRecord, DatasetFile) {
  std::vector<ChannelRecord> recs;
  const auto topo = sample_topology(3, 1);
  for (std::uint64_t s = 0; s < 4; ++s) recs.push_back({topo, channel_state(topo, sample_fading(3, s), s), 1.0});
  const std::string path = temp_path("dataset.ndjson");
  write_dataset(path, recs);
  const auto back = read_dataset(path);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(back[k].h.gains(), recs[k].h.gains());
  std::filesystem::remove(path);
}

TEST(ChannelRecord, MalformedInputs) {
  EXPECT_THROW(parse_channel_record("not json"), FormatError);
  EXPECT_THROW(parse_channel_record(R"({"schema_version":1,"m":2})"), FormatError);
  EXPECT_THROW(parse_channel_record(R"({"schema_version":7})"), FormatError);
}

TEST(Checkpoint, RoundTripBothVariants) {
  for (auto variant : {model::PsiVariant::Gcn, model::PsiVariant::Regnn}) {
    Checkpoint c{model::init_params(5, 3, 2, 4, variant), R"({"steps":10})"};
    const Checkpoint back = parse_checkpoint(checkpoint_json(c));
    EXPECT_EQ(back.theta.variant, variant);
    EXPECT_EQ(back.theta.depth(), 4);
    EXPECT_EQ(back.theta.hidden, 3);
    EXPECT_EQ(back.theta.features, 2);
    EXPECT_EQ(back.theta.seed, 5u);
    const auto a = c.theta.tensors();
    const auto b = back.theta.tensors();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(*a[k], *b[k]);
    EXPECT_NE(back.training_json.find("\"steps\":10"), std::string::npos);
  }
}

TEST(Checkpoint, MissingFileAndBadShape) {
  EXPECT_THROW(load_checkpoint(temp_path("does_not_exist.json")), std::runtime_error);
  Checkpoint c{model::init_params(5, 3, 1, 1), "{}"};
  std::string text = checkpoint_json(c);
  text.replace(text.find("\"K\": 1"), 6, "\"K\": 2");
  EXPECT_THROW(parse_checkpoint(text), FormatError);
}

TEST(Artifacts, CsvWriters) {
  train::TrainReport r;
  r.step_loss = {-1.5, -2.0};
  r.val_utility = {3.0};
  std::ostringstream loss;
  write_loss_csv(loss, r);
  EXPECT_EQ(loss.str(), "step,loss\n1,-1.5\n2,-2\n");
  std::ostringstream val;
  write_validation_csv(val, r);
  EXPECT_EQ(val.str(), "epoch,val_utility\n1,3\n");
  distsim::MessageLog log;
  log.records.push_back({0, distsim::Phase::Receiver, 2, "u_w", 16});
  std::ostringstream ml;
  write_message_log_csv(ml, log);
  EXPECT_EQ(ml.str(), "layer,phase,sender,bytes\n1,3,2,16\n");
}

TEST(Artifacts, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 2.6e-5, -7.25e300}) EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace uwmmse::io
