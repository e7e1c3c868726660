#pragma once

// Second-order activity graph and analogous subthreads.
//
// Vertices pair two spikes of the same neuron, one from each activity graph;
// an edge (u_a, u_b) -> (v_a, v_b) exists when u_a -> v_a is an edge of the
// first graph and u_b -> v_b an edge of the second. Both first-order edges
// then run along the same synapse, so the graph is built per synapse as the
// cross product of that synapse's edge lists. Weakly connected components of
// it are the analogous subthreads.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gnat/causal_graph.hpp"

namespace gnat {

struct SecondOrderVertex {
  NeuronId neuron = 0;
  SpikeId spike_a = 0;
  SpikeId spike_b = 0;

  friend bool operator==(const SecondOrderVertex&, const SecondOrderVertex&) = default;
  friend auto operator<=>(const SecondOrderVertex& l, const SecondOrderVertex& r) {
    return std::pair(l.spike_a, l.spike_b) <=> std::pair(r.spike_a, r.spike_b);
  }
};

/// In self mode vertices are unordered spike pairs stored earlier-spike first,
/// which folds each component together with its mirror image. `crossed` marks
/// an edge whose target pair is stored in the opposite orientation to its
/// source pair.
struct SecondOrderEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  EdgeId edge_first = 0;   // leaves vertices[from].spike_a
  EdgeId edge_second = 0;  // leaves vertices[from].spike_b
  bool crossed = false;

  friend bool operator==(const SecondOrderEdge&, const SecondOrderEdge&) = default;
};

/// Restricts second-order edges to instance pairs shifted by a lag in
/// [min_lag, max_lag] ms, measured between the presynaptic spikes and between
/// the postsynaptic spikes of the two first-order edges (second minus first).
struct LagWindow {
  double min_lag = 0.0;
  double max_lag = 0.0;
};

struct SecondOrderOptions {
  bool self_mode = true;
  std::optional<LagWindow> lag_window;
  /// With a lag window, synapses carrying at least this many edges are
  /// searched through a quadtree over (t_pre, t_post) instead of a scan.
  std::size_t quadtree_min_edges = 64;
  unsigned workers = 1;
};

struct SecondOrderGraph {
  bool self_mode = true;
  std::vector<SecondOrderVertex> vertices;  // edge-bearing vertices, sorted
  std::vector<SecondOrderEdge> edges;       // sorted by (from, to, crossed)
  std::uint64_t singleton_vertices = 0;     // vertices without incident edges (not stored)

  std::uint64_t total_vertices() const { return vertices.size() + singleton_vertices; }
};

/// Self mode requires `a` and `b` to be the same graph; it drops pairs of a
/// spike with itself and keeps one of each mirrored pair. Throws InputError
/// for graphs built over networks with different structure.
SecondOrderGraph build_second_order_graph(const ActivityGraph& a, const ActivityGraph& b,
                                          const SecondOrderOptions& opts = {});

struct PairedEdge {
  EdgeId edge_a = 0;  // in graph a
  EdgeId edge_b = 0;  // in graph b

  friend bool operator==(const PairedEdge&, const PairedEdge&) = default;
  friend auto operator<=>(const PairedEdge&, const PairedEdge&) = default;
};

struct AnalogousSubthread {
  std::uint32_t id = 0;
  std::vector<SecondOrderVertex> vertices;  // oriented: spike_a lies in projection a
  std::vector<PairedEdge> edges;
  std::vector<SpikeId> spikes_a, spikes_b;  // projections, ascending
  std::vector<EdgeId> edges_a, edges_b;
  bool overlapping = false;  // projections share a spike
  bool self_mirror = false;  // component contains both orientations of a pair

  std::size_t size() const { return vertices.size(); }
};

/// Weakly connected components with at least `min_spikes` vertices, largest
/// first (ties by smallest vertex). In self mode each component is oriented so
/// that its two projections are the two instances of the repeated motif; a
/// self-mirror component cannot be split that way and gets the union of its
/// spikes as both projections.
std::vector<AnalogousSubthread> extract_analogous_subthreads(const SecondOrderGraph& graph, const ActivityGraph& a,
                                                             const ActivityGraph& b, std::size_t min_spikes = 15);

/// Sorts vertices and edges and recomputes the projections and the
/// overlapping flag from them.
void fill_projections(AnalogousSubthread& sub, bool self_mode);

/// Whether the subthread's vertex pairing is a bijection between its
/// projections that maps the induced subgraph of `a` exactly onto the induced
/// subgraph of `b`.
bool is_exactly_isomorphic(const AnalogousSubthread& sub, const ActivityGraph& a, const ActivityGraph& b);

/// Fraction of subthreads for which is_exactly_isomorphic holds (0 if none).
double isomorphic_fraction(std::span<const AnalogousSubthread> subs, const ActivityGraph& a, const ActivityGraph& b);

}  // namespace gnat
