#include "uwmmse_tools/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using uwmmse::tools::CommandResult;
using uwmmse::tools::ExperimentConfig;

struct Command {
  const char* name;
  const char* help;
  CommandResult (*run)(const ExperimentConfig&);
};

constexpr Command kCommands[] = {
    {"gen", "Generate a seeded channel dataset (NDJSON)", uwmmse::tools::cmd_gen},
    {"train", "Train an unfolded model and write a checkpoint", uwmmse::tools::cmd_train},
    {"compare", "Compare WMMSE, truncated WMMSE and the trained model", uwmmse::tools::cmd_compare},
    {"sweep", "Train and evaluate over depth and width grids", uwmmse::tools::cmd_sweep},
    {"trace-ab", "Export per-layer a, b values and the fixed-point residual", uwmmse::tools::cmd_trace_ab},
    {"generalize", "Density and size generalization sweeps", uwmmse::tools::cmd_generalize},
    {"utility", "Squared-rate utility and node-feature experiments", uwmmse::tools::cmd_utility},
    {"distsim", "Distributed execution equivalence and message counts", uwmmse::tools::cmd_distsim},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unfolded WMMSE power allocation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const Command* chosen = nullptr;
  for (const Command& c : kCommands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = uwmmse::tools::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out = *out_dir;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "uwmmse: config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const CommandResult result = chosen->run(cfg);
    for (const auto& f : result.files) std::cout << f << '\n';
    return 0;
  } catch (const uwmmse::tools::ConfigError& e) {
    std::cerr << "uwmmse: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "uwmmse " << chosen->name << ": " << e.what() << '\n';
    return 2;
  }
}
