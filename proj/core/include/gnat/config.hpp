#pragma once

// Pipeline configuration: an INI file of [section] key = value pairs plus
// overrides given as "section.key=value". Every key has a default; unknown
// keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gnat/analogs.hpp"
#include "gnat/causal_graph.hpp"
#include "gnat/netsim.hpp"
#include "gnat/relations.hpp"

namespace gnat {

struct StimulusSettings {
  double poisson_rate_hz = 0.4;
  std::size_t pattern_neurons = 20;
  double pattern_rate_hz = 2.0;
  double pattern_window_ms = 5000.0;
  double pattern_period_ms = 10000.0;
  double bias_current = 0.0;
  std::uint64_t seed = 2;
};

struct RunSettings {
  double plastic_ms = 60000.0;
  double fixed_ms = 60000.0;
  double dt_ms = 0.5;
  bool plasticity = true;
  std::uint64_t seed = 3;
};

struct GraphSettings {
  OmegaConfig omega;
  bool auto_threshold = false;
  double histogram_bin = 0.1;
  std::uint64_t shuffle_seed = 4;
  ShuffleMethod shuffle_method = ShuffleMethod::Uniform;
};

struct ThreadSettings {
  double duration_bin_ms = 10.0;
  double overlap_bin_ms = 20.0;
};

struct AnalogSettings {
  std::size_t min_spikes = 15;
  bool self_mode = true;
  std::optional<double> lag_min_ms;
  std::optional<double> lag_max_ms;
  std::size_t quadtree_min_edges = 64;
};

struct RelationSettings {
  std::size_t top_k = 2000;
  ClassOptions classes;
  std::vector<double> trial_starts_ms;  // empty: pattern onsets in the fixed phase
  double trial_length_ms = 10000.0;
  std::size_t max_trials = 4;
};

struct IoSettings {
  std::filesystem::path out_dir = ".";
  std::filesystem::path spikes = "spikes.csv";     // relative to out_dir
  std::filesystem::path network = "network.json";  // relative to out_dir
  std::filesystem::path compare_spikes;             // second train when analogs.self is off
};

struct PlotSettings {
  bool enabled = true;
  double raster_start_ms = 0.0;
  double raster_length_ms = 2000.0;
  double width_px = 960.0;
  double height_px = 480.0;
};

struct PipelineConfig {
  NetworkParams network;
  StimulusSettings stimulus;
  StdpConfig stdp;
  RunSettings run;
  GraphSettings graph;
  ThreadSettings threads;
  AnalogSettings analogs;
  RelationSettings relations;
  IoSettings io;
  PlotSettings plot;
  unsigned workers = 1;
  bool verbose = false;

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;

  std::filesystem::path input_path(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : io.out_dir / p;
  }
  std::optional<LagWindow> lag_window() const;
  /// Trial starts for the overlay: configured ones, else onsets of the pattern
  /// within the fixed phase (the pattern clock keeps running across phases).
  std::vector<double> trial_starts() const;
};

/// Applies one "section.key" = value assignment.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses INI text on top of `base`.
PipelineConfig parse_config(std::string_view ini_text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Every key with its resolved value, in a fixed order.
std::vector<std::pair<std::string, std::string>> resolved_config(const PipelineConfig& cfg);

/// INI text that parses back to `cfg`.
std::string config_to_ini(const PipelineConfig& cfg);

}  // namespace gnat
