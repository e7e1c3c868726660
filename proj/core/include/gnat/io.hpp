#pragma once

// Text formats for every artifact the pipeline reads or writes. Numbers are
// written in shortest round-trip form, so load(save(x)) == x.

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnat/analogs.hpp"
#include "gnat/causal_graph.hpp"
#include "gnat/relations.hpp"
#include "gnat/threads.hpp"

namespace gnat::io {

namespace fs = std::filesystem;

std::string format_double(double value);

/// Writes via a temporary file in the same directory and renames it over `path`.
void write_file_atomic(const fs::path& path, std::string_view content);
/// Throws MissingInputError if the file does not exist, InputError if it cannot be read.
std::string read_file(const fs::path& path);

// Spike trains: `spike_id,neuron_id,time_ms`, preceded by a `# duration_ms=`
// line. Without that line the duration is the latest spike time.
std::string spikes_to_csv(const SpikeTrain& train);
SpikeTrain spikes_from_csv(std::string_view text, std::string_view source = "spikes");

std::string network_to_json(const Network& net);
Network network_from_json(std::string_view text, std::string_view source = "network");

std::string edges_to_csv(std::span<const ActivityEdge> edges);
std::vector<ActivityEdge> edges_from_csv(std::string_view text, std::string_view source = "edges");
/// Rebuilds a graph from an edge list, re-validating it against the train.
ActivityGraph activity_graph_from_csv(std::string_view text, std::shared_ptr<const SpikeTrain> train,
                                      const Network& net, std::string_view source = "edges");

std::string histogram_to_csv(const Histogram& hist);
Histogram histogram_from_csv(std::string_view text, double bin_width, std::string_view source = "histogram");

/// One row per vertex (excitatory) spike; isolated spikes carry -1.
std::string membership_to_csv(const GnatDecomposition& decomp);
/// Per-spike membership with kNotAVertex for spikes absent from the file.
std::vector<GnatId> membership_from_csv(std::string_view text, std::size_t spike_count,
                                        std::string_view source = "membership");

struct GraphSummary {
  std::size_t spikes = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double log_threshold = 5.0;
};

std::string stats_to_json(const GraphSummary& graph, const GnatDecomposition& decomp, const DurationStats& durations,
                          const OverlapStats& overlap);

/// JSON lines. gnat_a / gnat_b name the GNAT hosting each projection, or -1.
std::string subthreads_to_jsonl(std::span<const AnalogousSubthread> subs, const GnatDecomposition& decomp_a,
                                const GnatDecomposition& decomp_b);
std::vector<AnalogousSubthread> subthreads_from_jsonl(std::string_view text, bool self_mode,
                                                      std::string_view source = "subthreads");

std::string multigraph_to_csv(const GnatMultigraph& mg);
GnatMultigraph multigraph_from_csv(std::string_view text, std::size_t gnat_count,
                                   std::string_view source = "multigraph");

/// `{"<class_id>": [gnat ids]}`; subthread lists live in the multigraph file.
std::string classes_to_json(std::span<const GnatClass> classes);
std::vector<GnatClass> classes_from_json(std::string_view text, std::string_view source = "classes");

std::string intervals_to_csv(std::span<const ClassInterval> intervals);
std::vector<ClassInterval> intervals_from_csv(std::string_view text, std::string_view source = "intervals");

std::string overlay_to_csv(std::span<const TrialInterval> overlay);
std::vector<TrialInterval> overlay_from_csv(std::string_view text, std::string_view source = "overlay");

}  // namespace gnat::io
