#pragma once

// Pipeline stages behind the gnatkit subcommands. Each stage reads its inputs
// from the output directory, writes its artifacts there and records a
// run_manifest.json.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gnat/config.hpp"
#include "gnat/plots.hpp"

namespace gnat {

namespace files {
inline constexpr const char* kPlasticSpikes = "plastic_spikes.csv";
inline constexpr const char* kPlasticNetwork = "plastic_network.json";
inline constexpr const char* kSpikes = "spikes.csv";
inline constexpr const char* kNetwork = "network.json";
inline constexpr const char* kEdges = "edges.csv";
inline constexpr const char* kHistogram = "neg_log_omega.csv";
inline constexpr const char* kShuffledHistogram = "neg_log_omega_shuffled.csv";
inline constexpr const char* kGraphSummary = "graph.json";
inline constexpr const char* kMembership = "gnats.csv";
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kDurations = "durations.csv";
inline constexpr const char* kSubthreads = "subthreads.jsonl";
inline constexpr const char* kAnalogSummary = "analogs.json";
inline constexpr const char* kMultigraph = "multigraph.csv";
inline constexpr const char* kClasses = "classes.json";
inline constexpr const char* kIntervals = "intervals.csv";
inline constexpr const char* kOverlay = "overlay.csv";
inline constexpr const char* kPlotDir = "plots";
inline constexpr const char* kManifest = "run_manifest.json";
}  // namespace files

/// Receives progress messages when verbose output is on.
using LogSink = std::function<void(std::string_view)>;

void cmd_simulate(const PipelineConfig& cfg, const LogSink& log = {});
void cmd_build_graph(const PipelineConfig& cfg, const LogSink& log = {});
void cmd_gnats(const PipelineConfig& cfg, const LogSink& log = {});
void cmd_analogs(const PipelineConfig& cfg, const LogSink& log = {});
void cmd_relations(const PipelineConfig& cfg, const LogSink& log = {});
/// build-graph, gnats, analogs and relations in sequence, then every plot
/// when plotting is enabled.
void cmd_analyze(const PipelineConfig& cfg, const LogSink& log = {});
/// Empty `kinds` draws every kind whose inputs exist.
void cmd_plot(const PipelineConfig& cfg, std::vector<PlotKind> kinds, const LogSink& log = {});
/// JSON summary of the artifacts present in the output directory.
std::string cmd_stats(const PipelineConfig& cfg);

}  // namespace gnat
