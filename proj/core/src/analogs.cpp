#include "gnat/analogs.hpp"

#include <algorithm>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "gnat/quadtree.hpp"
#include "gnat/union_find.hpp"

namespace gnat {

namespace {

struct RawEdge {
  SpikeId fa, fb, ta, tb;
  EdgeId first, second;
  bool crossed;

  auto key() const { return std::tuple(fa, fb, ta, tb, crossed); }
};

// Edge ids of a graph ordered by the synapse (pre neuron, post neuron) they run along.
std::vector<std::pair<std::uint64_t, EdgeId>> edges_by_synapse(const ActivityGraph& g) {
  const auto& train = g.train();
  std::vector<std::pair<std::uint64_t, EdgeId>> out;
  out.reserve(g.edges().size());
  const auto edges = g.edges();
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const std::uint64_t key = (std::uint64_t{train[edges[id].pre].neuron} << 32) | train[edges[id].post].neuron;
    out.emplace_back(key, id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct GroupPair {
  std::size_t a_begin, a_end, b_begin, b_end;
};

class PairEmitter {
 public:
  PairEmitter(const ActivityGraph& a, const ActivityGraph& b, const SecondOrderOptions& opts)
      : a_(a), b_(b), opts_(opts) {}

  bool in_window(double lag_pre, double lag_post) const {
    if (!opts_.lag_window) return true;
    const auto& w = *opts_.lag_window;
    return lag_pre >= w.min_lag && lag_pre <= w.max_lag && lag_post >= w.min_lag && lag_post <= w.max_lag;
  }

  void cross(EdgeId e1, EdgeId e2, std::vector<RawEdge>& out) const {
    const auto& x = a_.edges()[e1];
    const auto& y = b_.edges()[e2];
    const auto& ta = a_.train();
    const auto& tb = b_.train();
    if (!in_window(tb[y.pre].time - ta[x.pre].time, tb[y.post].time - ta[x.post].time)) return;
    out.push_back({x.pre, y.pre, x.post, y.post, e1, e2, false});
  }

  void self(EdgeId e1, EdgeId e2, std::vector<RawEdge>& out) const {
    const auto edges = a_.edges();
    const auto& train = a_.train();
    if (edges[e1].pre == edges[e2].pre || edges[e1].post == edges[e2].post) return;
    if (edges[e1].pre > edges[e2].pre) std::swap(e1, e2);
    const auto& x = edges[e1];
    const auto& y = edges[e2];
    if (!in_window(train[y.pre].time - train[x.pre].time, train[y.post].time - train[x.post].time)) return;
    const bool swapped_to = x.post > y.post;
    out.push_back({x.pre, y.pre, std::min(x.post, y.post), std::max(x.post, y.post), e1, e2, swapped_to});
  }

  void scan(std::span<const EdgeId> la, std::span<const EdgeId> lb, std::vector<RawEdge>& out) const {
    if (opts_.self_mode) {
      for (std::size_t i = 0; i < la.size(); ++i) {
        for (std::size_t j = i + 1; j < la.size(); ++j) self(la[i], la[j], out);
      }
      return;
    }
    for (EdgeId e1 : la) {
      for (EdgeId e2 : lb) cross(e1, e2, out);
    }
  }

  void indexed(std::span<const EdgeId> la, std::span<const EdgeId> lb, std::vector<RawEdge>& out) const {
    const auto& train_b = b_.train();
    const auto& train_a = a_.train();
    Rect bounds{1e300, 1e300, -1e300, -1e300};
    for (EdgeId e : lb) {
      const double x = train_b[b_.edges()[e].pre].time;
      const double y = train_b[b_.edges()[e].post].time;
      bounds = {std::min(bounds.x0, x), std::min(bounds.y0, y), std::max(bounds.x1, x), std::max(bounds.y1, y)};
    }
    PointQuadtree<EdgeId> tree(bounds);
    for (EdgeId e : lb) tree.insert(train_b[b_.edges()[e].pre].time, train_b[b_.edges()[e].post].time, e);

    const auto& w = *opts_.lag_window;
    std::vector<EdgeId> hits;
    for (EdgeId e1 : la) {
      const double x = train_a[a_.edges()[e1].pre].time;
      const double y = train_a[a_.edges()[e1].post].time;
      hits.clear();
      tree.query(Rect{x + w.min_lag, y + w.min_lag, x + w.max_lag, y + w.max_lag},
                 [&hits](double, double, EdgeId e2) { hits.push_back(e2); });
      std::sort(hits.begin(), hits.end());
      for (EdgeId e2 : hits) {
        if (opts_.self_mode) {
          if (e2 != e1) self(e1, e2, out);
        } else {
          cross(e1, e2, out);
        }
      }
    }
  }

  void run(std::span<const EdgeId> la, std::span<const EdgeId> lb, std::vector<RawEdge>& out) const {
    if (opts_.lag_window && lb.size() >= opts_.quadtree_min_edges) {
      indexed(la, lb, out);
    } else {
      scan(la, lb, out);
    }
  }

 private:
  const ActivityGraph& a_;
  const ActivityGraph& b_;
  const SecondOrderOptions& opts_;
};

std::vector<std::uint64_t> vertices_per_neuron(const ActivityGraph& g) {
  const auto& train = g.train();
  std::vector<std::uint64_t> counts(train.neuron_span(), 0);
  for (SpikeId id = 0; id < train.size(); ++id) {
    if (g.is_vertex(id)) ++counts[train[id].neuron];
  }
  return counts;
}

}  // namespace

SecondOrderGraph build_second_order_graph(const ActivityGraph& a, const ActivityGraph& b,
                                          const SecondOrderOptions& opts) {
  if (a.network_fingerprint() != b.network_fingerprint()) {
    throw InputError("second-order graph: activity graphs were built over different networks");
  }
  if (opts.self_mode && (a.train_ptr() != b.train_ptr() || a.edges().size() != b.edges().size())) {
    throw InputError("second-order graph: self mode compares one activity graph with itself");
  }
  if (opts.lag_window && opts.lag_window->min_lag > opts.lag_window->max_lag) {
    throw ConfigError("analogs: lag window needs min_lag <= max_lag");
  }

  const auto keyed_a = edges_by_synapse(a);
  const auto keyed_b = opts.self_mode ? keyed_a : edges_by_synapse(b);
  std::vector<EdgeId> ids_a(keyed_a.size()), ids_b(keyed_b.size());
  for (std::size_t i = 0; i < keyed_a.size(); ++i) ids_a[i] = keyed_a[i].second;
  for (std::size_t i = 0; i < keyed_b.size(); ++i) ids_b[i] = keyed_b[i].second;

  std::vector<GroupPair> groups;
  for (std::size_t i = 0, j = 0; i < keyed_a.size() && j < keyed_b.size();) {
    const auto ka = keyed_a[i].first;
    const auto kb = keyed_b[j].first;
    if (ka < kb) {
      ++i;
    } else if (kb < ka) {
      ++j;
    } else {
      GroupPair g{i, i, j, j};
      while (g.a_end < keyed_a.size() && keyed_a[g.a_end].first == ka) ++g.a_end;
      while (g.b_end < keyed_b.size() && keyed_b[g.b_end].first == kb) ++g.b_end;
      groups.push_back(g);
      i = g.a_end;
      j = g.b_end;
    }
  }

  const PairEmitter emitter(a, b, opts);
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(std::max<std::size_t>(groups.size(), 1))));
  std::vector<std::vector<RawEdge>> sinks(workers);
  auto work = [&](unsigned w) {
    for (std::size_t g = w; g < groups.size(); g += workers) {
      const auto& gp = groups[g];
      emitter.run(std::span(ids_a).subspan(gp.a_begin, gp.a_end - gp.a_begin),
                  std::span(ids_b).subspan(gp.b_begin, gp.b_end - gp.b_begin), sinks[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<RawEdge> raw;
  for (auto& s : sinks) {
    raw.insert(raw.end(), s.begin(), s.end());
    std::vector<RawEdge>().swap(s);
  }
  std::sort(raw.begin(), raw.end(), [](const RawEdge& l, const RawEdge& r) {
    return std::tuple(l.fa, l.fb, l.ta, l.tb, l.crossed, l.first, l.second) <
           std::tuple(r.fa, r.fb, r.ta, r.tb, r.crossed, r.first, r.second);
  });
  raw.erase(std::unique(raw.begin(), raw.end(), [](const RawEdge& l, const RawEdge& r) { return l.key() == r.key(); }),
            raw.end());

  SecondOrderGraph out;
  out.self_mode = opts.self_mode;
  std::vector<std::pair<SpikeId, SpikeId>> keys;
  keys.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    keys.emplace_back(e.fa, e.fb);
    keys.emplace_back(e.ta, e.tb);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  if (keys.size() > std::size_t{UINT32_MAX}) throw InputError("second-order graph exceeds 2^32 vertices");
  out.vertices.reserve(keys.size());
  for (const auto& [sa, sb] : keys) out.vertices.push_back({a.train()[sa].neuron, sa, sb});

  auto index_of = [&keys](SpikeId x, SpikeId y) {
    return static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), std::pair(x, y)) - keys.begin());
  };
  out.edges.reserve(raw.size());
  for (const auto& e : raw) out.edges.push_back({index_of(e.fa, e.fb), index_of(e.ta, e.tb), e.first, e.second, e.crossed});
  std::sort(out.edges.begin(), out.edges.end(), [](const SecondOrderEdge& l, const SecondOrderEdge& r) {
    return std::tuple(l.from, l.to, l.crossed) < std::tuple(r.from, r.to, r.crossed);
  });

  const auto ka = vertices_per_neuron(a);
  const auto kb = opts.self_mode ? ka : vertices_per_neuron(b);
  std::uint64_t total = 0;
  for (std::size_t n = 0; n < std::min(ka.size(), kb.size()); ++n) {
    total += opts.self_mode ? ka[n] * (ka[n] - (ka[n] > 0 ? 1 : 0)) / 2 : ka[n] * kb[n];
  }
  out.singleton_vertices = total - out.vertices.size();
  return out;
}

void fill_projections(AnalogousSubthread& sub, bool self_mode) {
  std::sort(sub.vertices.begin(), sub.vertices.end());
  std::sort(sub.edges.begin(), sub.edges.end());
  sub.spikes_a.clear();
  sub.spikes_b.clear();
  sub.edges_a.clear();
  sub.edges_b.clear();
  for (const auto& v : sub.vertices) {
    sub.spikes_a.push_back(v.spike_a);
    sub.spikes_b.push_back(v.spike_b);
  }
  for (const auto& e : sub.edges) {
    sub.edges_a.push_back(e.edge_a);
    sub.edges_b.push_back(e.edge_b);
  }
  if (sub.self_mirror) {
    sub.spikes_a.insert(sub.spikes_a.end(), sub.spikes_b.begin(), sub.spikes_b.end());
    sub.edges_a.insert(sub.edges_a.end(), sub.edges_b.begin(), sub.edges_b.end());
  }
  for (auto* list : {&sub.spikes_a, &sub.spikes_b, &sub.edges_a, &sub.edges_b}) {
    std::sort(list->begin(), list->end());
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }
  if (sub.self_mirror) {
    sub.spikes_b = sub.spikes_a;
    sub.edges_b = sub.edges_a;
  }
  sub.overlapping = false;
  if (self_mode) {
    std::vector<SpikeId> shared;
    std::set_intersection(sub.spikes_a.begin(), sub.spikes_a.end(), sub.spikes_b.begin(), sub.spikes_b.end(),
                          std::back_inserter(shared));
    sub.overlapping = !shared.empty();
  }
}

std::vector<AnalogousSubthread> extract_analogous_subthreads(const SecondOrderGraph& graph, const ActivityGraph& /*a*/,
                                                             const ActivityGraph& /*b*/, std::size_t min_spikes) {
  const std::size_t n = graph.vertices.size();
  ParityUnionFind uf(n);
  for (const auto& e : graph.edges) uf.unite(e.from, e.to, e.crossed ? 1 : 0);

  std::vector<std::uint32_t> root(n);
  std::vector<std::uint8_t> parity(n);
  std::vector<std::uint32_t> size(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    root[v] = uf.find(v, parity[v]);
    ++size[root[v]];
  }

  const std::size_t threshold = std::max<std::size_t>(min_spikes, 1);
  std::vector<std::int64_t> slot(n, -1);
  std::vector<AnalogousSubthread> subs;
  std::vector<std::uint32_t> first_vertex;
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto r = root[v];
    if (size[r] < threshold) continue;
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(subs.size());
      subs.emplace_back();
      subs.back().self_mirror = uf.conflicted(r);
      first_vertex.push_back(v);
    }
    auto& sub = subs[static_cast<std::size_t>(slot[r])];
    auto vertex = graph.vertices[v];
    if (!sub.self_mirror && parity[v] == 1) std::swap(vertex.spike_a, vertex.spike_b);
    sub.vertices.push_back(vertex);
  }
  for (const auto& e : graph.edges) {
    const auto k = slot[root[e.from]];
    if (k < 0) continue;
    auto& sub = subs[static_cast<std::size_t>(k)];
    const bool flip = !sub.self_mirror && parity[e.from] == 1;
    sub.edges.push_back(flip ? PairedEdge{e.edge_second, e.edge_first} : PairedEdge{e.edge_first, e.edge_second});
  }

  for (auto& sub : subs) fill_projections(sub, graph.self_mode);

  std::vector<std::size_t> order(subs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::pair(subs[r].size(), first_vertex[l]) < std::pair(subs[l].size(), first_vertex[r]);
  });
  std::vector<AnalogousSubthread> sorted;
  sorted.reserve(subs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.push_back(std::move(subs[order[i]]));
    sorted.back().id = static_cast<std::uint32_t>(i);
  }
  return sorted;
}

bool is_exactly_isomorphic(const AnalogousSubthread& sub, const ActivityGraph& a, const ActivityGraph& b) {
  if (sub.self_mirror) return false;
  if (sub.spikes_a.size() != sub.vertices.size() || sub.spikes_b.size() != sub.vertices.size()) return false;
  std::unordered_map<SpikeId, SpikeId> to_b;
  for (const auto& v : sub.vertices) to_b.emplace(v.spike_a, v.spike_b);

  auto induced_count = [](const ActivityGraph& g, const std::vector<SpikeId>& members) {
    std::size_t count = 0;
    for (SpikeId s : members) {
      for (EdgeId e : g.out_edges(s)) {
        if (std::binary_search(members.begin(), members.end(), g.edges()[e].post)) ++count;
      }
    }
    return count;
  };
  std::size_t mapped = 0;
  for (SpikeId s : sub.spikes_a) {
    for (EdgeId e : a.out_edges(s)) {
      const SpikeId t = a.edges()[e].post;
      if (!std::binary_search(sub.spikes_a.begin(), sub.spikes_a.end(), t)) continue;
      if (!b.find_edge(to_b.at(s), to_b.at(t))) return false;
      ++mapped;
    }
  }
  return mapped == induced_count(b, sub.spikes_b);
}

double isomorphic_fraction(std::span<const AnalogousSubthread> subs, const ActivityGraph& a, const ActivityGraph& b) {
  if (subs.empty()) return 0.0;
  std::size_t exact = 0;
  for (const auto& s : subs) exact += is_exactly_isomorphic(s, a, b) ? 1 : 0;
  return static_cast<double>(exact) / static_cast<double>(subs.size());
}

}  // namespace gnat
