#pragma once

// Causal activity graph: scores presynaptic -> postsynaptic spike pairs with the
// weight-normalized, delay-gated exponential kernel Omega and keeps pairs with
// -log(Omega) <= log_threshold as directed edges.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnat/model.hpp"

namespace gnat {

struct OmegaConfig {
  double tau = 5.0;  // ms
  NormKind norm = NormKind::L1;
  double log_threshold = 5.0;
  std::optional<double> window_multiplier;  // defaults to log_threshold

  double multiplier() const { return window_multiplier.value_or(log_threshold); }
  void validate() const;
};

/// Omega(t_post, t_pre) = (weight / norm) * H(lag) * exp(-lag / tau) with
/// lag = t_post - t_pre - delay and H(0) = 1. Returns 0 when norm is 0.
double compute_omega(double t_post, double t_pre, double weight, double norm, double delay, double tau);

struct ActivityEdge {
  SpikeId pre = 0;
  SpikeId post = 0;
  double omega = 0.0;

  friend bool operator==(const ActivityEdge&, const ActivityEdge&) = default;
};

/// DAG over the spikes of one train. Vertices are the excitatory spikes; edges
/// are sorted by (pre, post) with no duplicates and always point forward in
/// time by at least one conduction delay.
class ActivityGraph {
 public:
  ActivityGraph(std::shared_ptr<const SpikeTrain> train, std::vector<std::uint8_t> vertex_mask,
                std::vector<ActivityEdge> edges, std::uint64_t network_fingerprint);

  const SpikeTrain& train() const { return *train_; }
  const std::shared_ptr<const SpikeTrain>& train_ptr() const { return train_; }
  std::span<const ActivityEdge> edges() const { return edges_; }
  std::size_t spike_count() const { return train_->size(); }
  std::size_t vertex_count() const { return vertex_count_; }
  bool is_vertex(SpikeId id) const { return vertex_mask_[id] != 0; }
  std::span<const std::uint8_t> vertex_mask() const { return vertex_mask_; }
  std::uint64_t network_fingerprint() const { return fingerprint_; }

  std::span<const EdgeId> out_edges(SpikeId id) const;
  std::span<const EdgeId> in_edges(SpikeId id) const;
  std::optional<EdgeId> find_edge(SpikeId pre, SpikeId post) const;

 private:
  std::shared_ptr<const SpikeTrain> train_;
  std::vector<std::uint8_t> vertex_mask_;
  std::size_t vertex_count_ = 0;
  std::vector<ActivityEdge> edges_;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::uint32_t> out_offsets_, in_offsets_;
  std::vector<EdgeId> out_edges_, in_edges_;
};

/// 1 for spikes of excitatory neurons; throws InputError for spikes of neurons
/// absent from the network.
std::vector<std::uint8_t> excitatory_mask(const SpikeTrain& train, const Network& net);

/// Windowed join over synapses: for a presynaptic spike at t on a synapse with
/// delay d only postsynaptic spikes in [t + d, t + d + multiplier * tau] are
/// scored. Beyond that window -log(Omega) > log_threshold because the weight
/// ratio never exceeds 1 for either norm kind. The edge set does not depend
/// on `workers`.
ActivityGraph build_activity_graph(std::shared_ptr<const SpikeTrain> train, const Network& net,
                                   const OmegaConfig& cfg, unsigned workers = 1);

/// -log(Omega) for every connected excitatory pair with Omega > 0 whose lag
/// lies within three times the edge window.
std::vector<double> neg_log_omega_samples(const SpikeTrain& train, const Network& net, const OmegaConfig& cfg,
                                          unsigned workers = 1);

/// Dense fixed-width histogram. Bin i covers [origin + i w, origin + (i+1) w).
struct Histogram {
  double origin = 0.0;
  double bin_width = 0.1;
  std::vector<std::uint64_t> counts;

  double bin_left(std::size_t i) const { return origin + static_cast<double>(i) * bin_width; }
  std::uint64_t total() const;
  bool empty() const { return counts.empty(); }

  /// Histogram anchored at a multiple of bin_width. A value within 1e-9 bins
  /// below a bin edge is counted in the upper bin, so round-off in -log(e^-5)
  /// still lands in the bin starting at 5.0.
  static Histogram from_values(std::span<const double> values, double bin_width);
};

Histogram neg_log_omega_histogram(const SpikeTrain& train, const Network& net, const OmegaConfig& cfg,
                                  double bin_width = 0.1, unsigned workers = 1);

struct ThresholdSelection {
  double log_threshold = 5.0;
  bool fallback = false;
  std::string warning;
};

/// Knee of the -log(Omega) distribution: counts are smoothed with a centered
/// 5-bin moving average and the centre of the first strict local minimum
/// after the global peak is returned. Falls back to `fallback` (with a
/// warning) when there is no such minimum.
ThresholdSelection select_threshold(const Histogram& hist, double fallback = 5.0);

enum class ShuffleMethod { Uniform, InterSpikeInterval };

ShuffleMethod parse_shuffle_method(std::string_view text);

/// Per-neuron surrogate preserving spike counts. Uniform redraws each spike
/// time on [0, duration); InterSpikeInterval keeps each neuron's first spike
/// and permutes its inter-spike intervals.
SpikeTrain shuffle_train(const SpikeTrain& train, std::uint64_t seed, ShuffleMethod method = ShuffleMethod::Uniform);

/// Kahn topological sort over the graph's vertices.
bool is_acyclic(const ActivityGraph& graph);

}  // namespace gnat
