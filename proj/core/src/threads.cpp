#include "gnat/threads.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "gnat/union_find.hpp"

namespace gnat {

namespace {

// Sorts GNATs into canonical order, assigns ids and fills the spike map.
GnatDecomposition finalize(const ActivityGraph& graph, std::vector<Gnat> gnats) {
  const auto& train = graph.train();
  for (auto& g : gnats) {
    std::sort(g.spikes.begin(), g.spikes.end());
    std::sort(g.edges.begin(), g.edges.end());
    g.t_start = train[g.spikes.front()].time;
    g.t_end = train[g.spikes.back()].time;
  }
  std::sort(gnats.begin(), gnats.end(), [](const Gnat& a, const Gnat& b) {
    return std::tuple(a.t_start, -static_cast<std::int64_t>(a.size()), a.spikes.front()) <
           std::tuple(b.t_start, -static_cast<std::int64_t>(b.size()), b.spikes.front());
  });

  GnatDecomposition out;
  out.spike_to_gnat.assign(graph.spike_count(), kNotAVertex);
  for (SpikeId id = 0; id < graph.spike_count(); ++id) {
    if (graph.is_vertex(id)) out.spike_to_gnat[id] = kIsolated;
  }
  for (std::size_t i = 0; i < gnats.size(); ++i) {
    gnats[i].id = static_cast<GnatId>(i);
    for (SpikeId s : gnats[i].spikes) out.spike_to_gnat[s] = gnats[i].id;
  }
  for (SpikeId id = 0; id < graph.spike_count(); ++id) {
    if (out.spike_to_gnat[id] == kIsolated) out.isolated.push_back(id);
  }
  out.gnats = std::move(gnats);
  return out;
}

}  // namespace

GnatDecomposition extract_gnats(const ActivityGraph& graph) {
  const std::size_t n = graph.spike_count();
  UnionFind uf(n);
  for (const auto& e : graph.edges()) uf.unite(e.pre, e.post);

  std::vector<std::int64_t> slot(n, -1);
  std::vector<Gnat> gnats;
  const auto edges = graph.edges();
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const std::uint32_t root = uf.find(edges[id].pre);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(gnats.size());
      gnats.emplace_back();
    }
    gnats[static_cast<std::size_t>(slot[root])].edges.push_back(id);
  }
  for (SpikeId s = 0; s < n; ++s) {
    const std::int64_t k = slot[uf.find(s)];
    if (k >= 0) gnats[static_cast<std::size_t>(k)].spikes.push_back(s);
  }
  return finalize(graph, std::move(gnats));
}

GnatDecomposition decomposition_from_membership(const ActivityGraph& graph, std::span<const GnatId> membership) {
  if (membership.size() != graph.spike_count()) {
    throw InputError("GNAT membership does not cover the spike train");
  }
  GnatId max_id = -1;
  for (SpikeId id = 0; id < membership.size(); ++id) {
    const GnatId g = membership[id];
    if (g < kNotAVertex || (g == kNotAVertex) == graph.is_vertex(id)) {
      throw InputError("GNAT membership entry for spike " + std::to_string(id) + " is inconsistent with the graph");
    }
    max_id = std::max(max_id, g);
  }
  std::vector<Gnat> gnats(static_cast<std::size_t>(max_id + 1));
  for (SpikeId id = 0; id < membership.size(); ++id) {
    if (membership[id] >= 0) gnats[static_cast<std::size_t>(membership[id])].spikes.push_back(id);
  }
  const auto edges = graph.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const GnatId a = membership[edges[e].pre];
    if (a < 0 || a != membership[edges[e].post]) {
      throw InputError("GNAT membership splits edge " + std::to_string(edges[e].pre) + "->" +
                       std::to_string(edges[e].post));
    }
    gnats[static_cast<std::size_t>(a)].edges.push_back(e);
  }
  for (std::size_t g = 0; g < gnats.size(); ++g) {
    if (gnats[g].edges.empty()) throw InputError("GNAT " + std::to_string(g) + " has no edges");
  }
  auto out = finalize(graph, std::move(gnats));
  for (SpikeId id = 0; id < membership.size(); ++id) {
    if (out.spike_to_gnat[id] != membership[id]) {
      throw InputError("GNAT ids in the membership file are not in canonical order");
    }
  }
  return out;
}

DurationStats duration_stats(const GnatDecomposition& decomp, double bin_width) {
  DurationStats stats;
  stats.histogram.bin_width = bin_width;
  if (!(bin_width > 0.0)) throw ConfigError("threads.duration_bin_ms must be > 0");
  stats.count = decomp.gnats.size();
  if (decomp.gnats.empty()) return stats;
  double sum = 0.0;
  for (const auto& g : decomp.gnats) {
    sum += g.duration();
    stats.max = std::max(stats.max, g.duration());
  }
  stats.mean = sum / static_cast<double>(stats.count);
  stats.histogram.counts.assign(static_cast<std::size_t>(std::floor(stats.max / bin_width)) + 1, 0);
  for (const auto& g : decomp.gnats) ++stats.histogram.counts[static_cast<std::size_t>(std::floor(g.duration() / bin_width))];
  return stats;
}

OverlapStats bin_overlap_stats(const GnatDecomposition& decomp, const SpikeTrain& train, double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("threads.overlap_bin_ms must be > 0");
  OverlapStats stats;
  stats.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::floor(train.duration() / bin_width)) + 1;
  stats.gnats_per_bin.assign(train.empty() ? 0 : bins, 0);
  // Spikes are time-ordered, so each bin's members arrive contiguously.
  std::vector<GnatId> members;
  std::size_t current = 0;
  auto close_bin = [&]() {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty()) {
      stats.gnats_per_bin[current] = static_cast<std::uint32_t>(members.size());
      ++stats.nonempty_bins;
      if (members.size() >= 2) ++stats.multi_bins;
    }
    members.clear();
  };
  for (SpikeId id = 0; id < train.size(); ++id) {
    const GnatId g = decomp.spike_to_gnat[id];
    if (g < 0) continue;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(std::floor(train[id].time / bin_width)));
    if (bin != current) {
      close_bin();
      current = bin;
    }
    members.push_back(g);
  }
  close_bin();
  return stats;
}

}  // namespace gnat
