#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bohrlab/io.hpp"
#include "bohrlab/plot.hpp"

namespace bohrlab {

/// Experiments understood by run().
const std::vector<std::string>& experiment_names();

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "BOHR_LAB_OUT";

/// One run, as read from a single JSON document.
///
/// Only experiment, weights, params and master_seed influence results; the
/// worker count and output settings never change any emitted byte apart from
/// timing.json.
struct ExperimentConfig {
  std::string experiment;
  std::optional<Json> weights;  ///< {kind, params, N}
  Json params = Json::object();
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::string output_dir;
  bool plot = false;

  /// Throws ValidationError on malformed documents or unknown fields.
  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  /// The result-bearing part of the config, as embedded in the envelope.
  Json reproducible_json() const;
  /// FNV-1a of reproducible_json().dump().
  std::string digest() const;
};

struct PlotRequest {
  std::string table;
  PlotSpec spec;
};

struct ResultEnvelope {
  std::string digest;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  Json config;
  Json summary = Json::object();
  std::vector<DataTable> tables;
  std::vector<std::pair<std::string, Json>> documents;  ///< extra JSON files, e.g. a sampled set
  std::vector<PlotRequest> plots;

  const DataTable& table(const std::string& name) const;
  /// envelope.json content: everything except wall-clock time.
  Json envelope_json() const;
};

std::string tool_version();

/// Executes the experiment and, when config.output_dir is set, writes its files.
/// Throws ValidationError for unknown experiments or bad parameters and
/// propagates CapacityError from the modules.
ResultEnvelope run(const ExperimentConfig& config);

/// Writes envelope.json, one CSV per table, extra documents, timing.json and,
/// with `plot`, one SVG per plot request. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ResultEnvelope& envelope, const std::filesystem::path& dir,
                                                 bool plot, unsigned workers = 1);

/// Emits the SVG for one table of an envelope; the envelope digest goes into the metadata.
std::string plot(const ResultEnvelope& envelope, const std::string& table, PlotKind kind);

/// --out flag, then the config, then $BOHR_LAB_OUT, then "bohr-lab-out".
std::string resolve_output_dir(const std::optional<std::string>& flag, const std::string& from_config);

}  // namespace bohrlab
