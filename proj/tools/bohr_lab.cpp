// bohr-lab: runs one experiment described by a JSON config.
//
// Exit status: 0 success, 2 validation error, 3 capacity error, 1 anything else.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bohrlab/errors.hpp"
#include "bohrlab/harness.hpp"

namespace {

constexpr int kValidation = 2;
constexpr int kCapacity = 3;

bohrlab::Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bohrlab::ValidationError("cannot open config '" + path + "'");
  try {
    return bohrlab::Json::parse(in);
  } catch (const bohrlab::Json::parse_error& e) {
    throw bohrlab::ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification laboratory for random integer sequences"};
  app.set_version_flag("--version", bohrlab::tool_version());

  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  bool plot = false;

  app.add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(bohrlab::experiment_names()));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--out", out, std::string("Output directory (default: config, then $") + bohrlab::kOutputDirEnv + ")");
  app.add_flag("--plot", plot, "Also emit SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    auto config = bohrlab::ExperimentConfig::from_json(load_config(config_path));
    if (!config.experiment.empty() && config.experiment != experiment)
      std::cerr << "note: command line experiment '" << experiment << "' overrides config value '"
                << config.experiment << "'\n";
    config.experiment = experiment;
    if (seed) config.master_seed = *seed;
    if (workers) config.workers = *workers;
    config.plot = config.plot || plot;
    config.output_dir = bohrlab::resolve_output_dir(out, config.output_dir);

    const auto envelope = bohrlab::run(config);
    std::cout << "experiment:    " << config.experiment << "\n"
              << "config digest: " << envelope.digest << "\n"
              << "output:        " << config.output_dir << "\n"
              << envelope.summary.dump(2) << "\n";
    return 0;
  } catch (const bohrlab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const bohrlab::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
