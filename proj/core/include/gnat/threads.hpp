#pragma once

// Decomposition of an activity graph into GNATs: its weakly connected
// components with at least one edge. Spikes without any incident edge are
// reported as isolated.

#include <cstdint>
#include <span>
#include <vector>

#include "gnat/causal_graph.hpp"

namespace gnat {

using GnatId = std::int32_t;
inline constexpr GnatId kIsolated = -1;
inline constexpr GnatId kNotAVertex = -2;  // inhibitory spike

struct Gnat {
  GnatId id = 0;
  std::vector<SpikeId> spikes;  // ascending
  std::vector<EdgeId> edges;    // ascending
  double t_start = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
  std::size_t size() const { return spikes.size(); }
};

struct GnatDecomposition {
  std::vector<Gnat> gnats;
  std::vector<SpikeId> isolated;       // ascending
  std::vector<GnatId> spike_to_gnat;   // per spike: gnat id, kIsolated or kNotAVertex

  GnatId gnat_of(SpikeId id) const { return spike_to_gnat[id]; }
};

/// Union-find over edge endpoints. Ids follow (t_start, -size, smallest spike id).
GnatDecomposition extract_gnats(const ActivityGraph& graph);

/// Rebuilds a decomposition from a per-spike membership list (as stored in the
/// GNAT membership file), checking it against the graph: every edge must stay
/// inside one GNAT and every GNAT id must be dense.
GnatDecomposition decomposition_from_membership(const ActivityGraph& graph, std::span<const GnatId> membership);

struct DurationStats {
  Histogram histogram;  // of t_end - t_start, origin 0
  std::size_t count = 0;
  double mean = 0.0;
  double max = 0.0;
};

DurationStats duration_stats(const GnatDecomposition& decomp, double bin_width = 10.0);

struct OverlapStats {
  double bin_width = 20.0;
  std::vector<std::uint32_t> gnats_per_bin;  // distinct GNATs with a spike in the bin
  std::size_t nonempty_bins = 0;
  std::size_t multi_bins = 0;                // bins with >= 2 distinct GNATs

  double multi_fraction() const {
    return nonempty_bins == 0 ? 0.0 : static_cast<double>(multi_bins) / static_cast<double>(nonempty_bins);
  }
};

/// Bins [k w, (k+1) w) cover [0, duration]; only GNAT member spikes count.
OverlapStats bin_overlap_stats(const GnatDecomposition& decomp, const SpikeTrain& train, double bin_width = 20.0);

}  // namespace gnat
