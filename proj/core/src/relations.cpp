#include "gnat/relations.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "gnat/union_find.hpp"

namespace gnat {

namespace {

GnatId host_gnat(const GnatDecomposition& decomp, std::span<const SpikeId> spikes, std::uint32_t subthread) {
  if (spikes.empty()) throw InternalError("subthread " + std::to_string(subthread) + " has an empty projection");
  const GnatId host = decomp.gnat_of(spikes.front());
  for (SpikeId s : spikes) {
    if (s >= decomp.spike_to_gnat.size() || decomp.gnat_of(s) < 0 || decomp.gnat_of(s) != host) {
      throw InternalError("subthread " + std::to_string(subthread) + " projects outside a single GNAT");
    }
  }
  return host;
}

std::vector<std::vector<GnatId>> modularity_communities(const std::vector<GnatId>& nodes,
                                                        const std::vector<const MultigraphEdge*>& kept) {
  // Weight-aggregated symmetric adjacency over community indices.
  std::map<GnatId, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  const std::size_t n = nodes.size();
  std::vector<std::map<std::size_t, double>> e(n);
  std::vector<double> a(n, 0.0);
  double total = 0.0;
  for (const auto* edge : kept) {
    const std::size_t i = index.at(edge->gnat_a);
    const std::size_t j = index.at(edge->gnat_b);
    const double w = static_cast<double>(edge->weight);
    total += w;
    if (i == j) {
      e[i][i] += w;
    } else {
      e[i][j] += w;
      e[j][i] += w;
    }
  }
  if (total <= 0.0) return {};
  // Normalise: e_ij = fraction of edge ends, a_i = sum_j e_ij.
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& [j, w] : e[i]) {
      w /= (i == j ? total : 2.0 * total);
      a[i] += w;
    }
  }
  std::vector<std::vector<GnatId>> members(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {nodes[i]};

  while (true) {
    double best = 0.0;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto& [j, w] : e[i]) {
        if (j <= i) continue;
        const double dq = 2.0 * (w - a[i] * a[j]);
        if (dq > best) {
          best = dq;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) break;
    // Merge bj into bi.
    for (const auto& [k, w] : e[bj]) {
      if (k == bj) {
        e[bi][bi] += w;
      } else if (k == bi) {
        e[bi][bi] += 2.0 * w;
      } else {
        e[bi][k] += w;
        e[k][bi] += w;
        e[k].erase(bj);
      }
    }
    e[bi].erase(bj);
    e[bj].clear();
    a[bi] += a[bj];
    a[bj] = 0.0;
    alive[bj] = false;
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
  }
  std::vector<std::vector<GnatId>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(std::move(members[i]));
  }
  return out;
}

}  // namespace

GnatMultigraph build_multigraph(const GnatDecomposition& decomp, std::span<const AnalogousSubthread> subthreads,
                                std::size_t top_k) {
  GnatMultigraph mg;
  mg.gnat_count = decomp.gnats.size();
  const std::size_t take = std::min(top_k, subthreads.size());
  for (std::size_t i = 0; i < take; ++i) {
    const auto& sub = subthreads[i];
    MultigraphEdge edge;
    edge.gnat_a = host_gnat(decomp, sub.spikes_a, sub.id);
    edge.gnat_b = host_gnat(decomp, sub.spikes_b, sub.id);
    edge.subthread_id = sub.id;
    edge.weight = sub.size();
    edge.self_loop = edge.gnat_a == edge.gnat_b;
    mg.edges.push_back(edge);
  }
  return mg;
}

ClassMethod parse_class_method(std::string_view text) {
  if (text == "components") return ClassMethod::Components;
  if (text == "modularity") return ClassMethod::Modularity;
  throw ConfigError("relations.method: unknown method '" + std::string(text) + "' (components|modularity)");
}

std::string_view to_string(ClassMethod method) {
  return method == ClassMethod::Components ? "components" : "modularity";
}

std::vector<GnatClass> extract_classes(const GnatMultigraph& mg, const ClassOptions& opts) {
  std::vector<const MultigraphEdge*> kept;
  for (const auto& e : mg.edges) {
    if (e.weight < opts.min_edge_weight) continue;
    if (e.self_loop && !opts.include_self_loops) continue;
    if (e.gnat_a < 0 || e.gnat_b < 0 || static_cast<std::size_t>(e.gnat_a) >= mg.gnat_count ||
        static_cast<std::size_t>(e.gnat_b) >= mg.gnat_count) {
      throw InternalError("multigraph edge references an unknown GNAT");
    }
    kept.push_back(&e);
  }
  std::vector<GnatId> nodes;
  for (const auto* e : kept) {
    nodes.push_back(e->gnat_a);
    nodes.push_back(e->gnat_b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<std::vector<GnatId>> groups;
  if (opts.method == ClassMethod::Components) {
    UnionFind uf(mg.gnat_count);
    for (const auto* e : kept) uf.unite(static_cast<std::uint32_t>(e->gnat_a), static_cast<std::uint32_t>(e->gnat_b));
    std::map<std::uint32_t, std::size_t> slot;
    for (GnatId g : nodes) {
      const auto root = uf.find(static_cast<std::uint32_t>(g));
      auto [it, fresh] = slot.emplace(root, groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(g);
    }
  } else {
    groups = modularity_communities(nodes, kept);
  }

  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& l, const auto& r) { return l.front() < r.front(); });

  std::vector<GnatId> class_of(mg.gnat_count, -1);
  std::vector<GnatClass> classes(groups.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    classes[c].id = static_cast<std::uint32_t>(c);
    classes[c].gnats = std::move(groups[c]);
    for (GnatId g : classes[c].gnats) class_of[static_cast<std::size_t>(g)] = static_cast<GnatId>(c);
  }
  for (const auto* e : kept) {
    const GnatId c = class_of[static_cast<std::size_t>(e->gnat_a)];
    if (c >= 0 && c == class_of[static_cast<std::size_t>(e->gnat_b)]) {
      classes[static_cast<std::size_t>(c)].subthreads.push_back(e->subthread_id);
    }
  }
  for (auto& c : classes) {
    std::sort(c.subthreads.begin(), c.subthreads.end());
    c.subthreads.erase(std::unique(c.subthreads.begin(), c.subthreads.end()), c.subthreads.end());
  }
  return classes;
}

std::vector<ClassInterval> class_intervals(std::span<const GnatClass> classes, const GnatDecomposition& decomp) {
  std::vector<ClassInterval> out;
  for (const auto& c : classes) {
    for (GnatId g : c.gnats) {
      if (g < 0 || static_cast<std::size_t>(g) >= decomp.gnats.size()) {
        throw InternalError("class " + std::to_string(c.id) + " references unknown GNAT " + std::to_string(g));
      }
      const auto& gnat = decomp.gnats[static_cast<std::size_t>(g)];
      out.push_back({g, c.id, gnat.t_start, gnat.t_end});
    }
  }
  std::sort(out.begin(), out.end(), [](const ClassInterval& l, const ClassInterval& r) {
    return std::pair(l.t_start, l.gnat_id) < std::pair(r.t_start, r.gnat_id);
  });
  return out;
}

std::vector<TrialInterval> trial_overlay(std::span<const ClassInterval> intervals, std::span<const double> trial_starts,
                                         double trial_length) {
  if (!(trial_length > 0.0)) throw ConfigError("trial_length: must be positive");
  std::vector<TrialInterval> out;
  for (std::size_t t = 0; t < trial_starts.size(); ++t) {
    const double lo = trial_starts[t];
    const double hi = lo + trial_length;
    for (const auto& iv : intervals) {
      if (iv.t_end < lo || iv.t_start >= hi) continue;
      TrialInterval ti;
      ti.trial_index = t;
      ti.interval = iv;
      ti.clipped = iv.t_start < lo || iv.t_end > hi;
      ti.rel_start = std::max(iv.t_start, lo) - lo;
      ti.rel_end = std::min(iv.t_end, hi) - lo;
      out.push_back(ti);
    }
  }
  return out;
}

}  // namespace gnat
