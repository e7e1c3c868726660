#pragma once

// Random instance generators and slow reference implementations used by the
// unit and acceptance tests. The oracles deliberately avoid the library's
// indexes: they loop over everything.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <tuple>
#include <vector>

#include "gnat/analogs.hpp"
#include "gnat/causal_graph.hpp"
#include "gnat/model.hpp"
#include "gnat/random.hpp"

namespace gnat::testing {

struct RandomNetSpec {
  std::size_t neurons = 20;
  double excitatory_fraction = 0.8;
  double connection_p = 0.2;
  double max_weight = 10.0;
  double min_delay = kMinDelayMs;
  double max_delay = 10.0;
};

inline Network random_network(Rng& rng, const RandomNetSpec& spec) {
  Network net;
  net.width = 100.0;
  net.height = 100.0;
  for (std::size_t i = 0; i < spec.neurons; ++i) {
    Neuron n;
    n.position = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    n.excitatory = rng.uniform() < spec.excitatory_fraction;
    net.neurons.push_back(n);
  }
  for (NeuronId pre = 0; pre < spec.neurons; ++pre) {
    for (NeuronId post = 0; post < spec.neurons; ++post) {
      if (pre == post || !rng.bernoulli(spec.connection_p)) continue;
      Synapse s;
      s.pre = pre;
      s.post = post;
      const double w = rng.uniform(0.0, spec.max_weight);
      s.weight = net.neurons[pre].excitatory ? w : -w;
      s.delay = rng.uniform(spec.min_delay, spec.max_delay);
      net.synapses.push_back(s);
    }
  }
  return net;
}

/// Uniform spike times on [0, duration). With `grid` > 0 times are snapped to
/// multiples of it, which produces exact ties and exact-delay lags.
inline SpikeTrain random_train(Rng& rng, std::size_t neurons, std::size_t spikes, double duration, double grid = 0.0) {
  std::vector<Spike> events;
  events.reserve(spikes);
  for (std::size_t i = 0; i < spikes; ++i) {
    double t = rng.uniform(0.0, duration);
    if (grid > 0.0) t = std::floor(t / grid) * grid;
    events.push_back({static_cast<NeuronId>(rng.below(neurons)), t});
  }
  return sort_and_index_spikes(std::move(events), duration);
}

/// All-pairs evaluation of Omega over every spike pair.
inline std::vector<ActivityEdge> brute_force_edges(const SpikeTrain& train, const Network& net,
                                                   const OmegaConfig& cfg) {
  const std::size_t n = net.size();
  std::vector<double> norm(n, 0.0);
  for (const auto& s : net.synapses) {
    if (!net.neurons[s.pre].excitatory) continue;
    norm[s.post] += cfg.norm == NormKind::L1 ? s.weight : s.weight * s.weight;
  }
  if (cfg.norm == NormKind::L2) {
    for (auto& v : norm) v = std::sqrt(v);
  }
  std::vector<const Synapse*> syn(n * n, nullptr);
  for (const auto& s : net.synapses) syn[s.pre * n + s.post] = &s;

  std::vector<ActivityEdge> out;
  const auto spikes = train.spikes();
  for (SpikeId i = 0; i < spikes.size(); ++i) {
    for (SpikeId j = 0; j < spikes.size(); ++j) {
      const Synapse* sp = syn[spikes[i].neuron * n + spikes[j].neuron];
      if (sp == nullptr) continue;
      const Synapse& s = *sp;
      if (!net.neurons[s.pre].excitatory || !net.neurons[s.post].excitatory) continue;
      if (norm[s.post] == 0.0) continue;
      const double lag = spikes[j].time - spikes[i].time - s.delay;
      if (lag < 0.0) continue;
      const double omega = (s.weight / norm[s.post]) * std::exp(-lag / cfg.tau);
      if (omega > 0.0 && -std::log(omega) <= cfg.log_threshold) out.push_back({i, j, omega});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ActivityEdge& a, const ActivityEdge& b) { return std::pair(a.pre, a.post) < std::pair(b.pre, b.post); });
  return out;
}

/// Breadth-first search over an undirected adjacency list. Returns the
/// components with at least one edge, each sorted, the list sorted.
inline std::vector<std::vector<std::uint32_t>> bfs_components(std::size_t n,
                                                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s] || adj[s].empty()) continue;
    std::vector<std::uint32_t> comp;
    std::deque<std::uint32_t> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Second-order edge as (from spike pair, to spike pair, crossed).
using PairKey = std::pair<SpikeId, SpikeId>;
using SecondOrderKey = std::tuple<PairKey, PairKey, bool>;

/// Quadratic evaluation over all ordered pairs of same-neuron spike pairs.
/// In self mode vertices are unordered pairs stored smaller id first; an edge
/// is "crossed" when it joins u.first to v.second and u.second to v.first.
inline std::set<SecondOrderKey> nested_loop_second_order(const ActivityGraph& a, const ActivityGraph& b, bool self_mode,
                                                         const std::optional<LagWindow>& window = std::nullopt) {
  std::vector<PairKey> vertices;
  const auto& ta = a.train();
  const auto& tb = b.train();
  for (SpikeId x = 0; x < ta.size(); ++x) {
    if (!a.is_vertex(x)) continue;
    for (SpikeId y = 0; y < tb.size(); ++y) {
      if (!b.is_vertex(y) || ta[x].neuron != tb[y].neuron) continue;
      if (self_mode && !(x < y)) continue;
      vertices.emplace_back(x, y);
    }
  }
  auto admissible = [&](SpikeId p1, SpikeId q1, SpikeId p2, SpikeId q2) {
    if (!window) return true;
    const double lag_pre = tb[p2].time - ta[p1].time;
    const double lag_post = tb[q2].time - ta[q1].time;
    return lag_pre >= window->min_lag && lag_pre <= window->max_lag && lag_post >= window->min_lag &&
           lag_post <= window->max_lag;
  };
  std::set<SecondOrderKey> out;
  for (const auto& u : vertices) {
    for (const auto& v : vertices) {
      if (a.find_edge(u.first, v.first) && b.find_edge(u.second, v.second) &&
          admissible(u.first, v.first, u.second, v.second)) {
        out.emplace(u, v, false);
      }
      if (self_mode && a.find_edge(u.first, v.second) && a.find_edge(u.second, v.first) &&
          admissible(u.first, v.second, u.second, v.first)) {
        out.emplace(u, v, true);
      }
    }
  }
  return out;
}

inline std::set<SecondOrderKey> keys_of(const SecondOrderGraph& g) {
  std::set<SecondOrderKey> out;
  for (const auto& e : g.edges) {
    const auto& f = g.vertices[e.from];
    const auto& t = g.vertices[e.to];
    out.emplace(PairKey{f.spike_a, f.spike_b}, PairKey{t.spike_a, t.spike_b}, e.crossed);
  }
  return out;
}

/// A train with one causal motif repeated at several onsets amid Poisson
/// background, on a network that carries the motif's synapses.
struct MotifFixture {
  Network net;
  SpikeTrain train;
  std::vector<std::vector<SpikeId>> instances;  // instances[k][i]: spike id of motif spike i in copy k
};

struct MotifSpec {
  std::size_t neurons = 200;
  std::size_t motif_spikes = 20;
  std::size_t copies = 10;
  double jitter_ms = 1.0;
  double background_hz = 1.0;
  double copy_spacing_ms = 1000.0;
  double background_p = 0.05;
  double motif_weight = 8.0;
  std::uint64_t seed = 1;
};

inline MotifFixture make_motif_fixture(const MotifSpec& spec) {
  Rng rng(spec.seed);
  MotifFixture fx;
  auto& net = fx.net;
  net.width = net.height = 100.0;
  for (std::size_t i = 0; i < spec.neurons; ++i) net.neurons.push_back({{rng.uniform(0, 100), rng.uniform(0, 100)}, true});

  // Motif neurons and a random tree over the motif spikes; child i fires
  // base_lag after its parent's arrival, so jitter never breaks causality.
  std::vector<NeuronId> pool(spec.neurons);
  for (NeuronId i = 0; i < spec.neurons; ++i) pool[i] = i;
  for (std::size_t i = 0; i < spec.motif_spikes; ++i) std::swap(pool[i], pool[i + rng.below(spec.neurons - i)]);
  std::vector<NeuronId> motif_neuron(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.motif_spikes));
  const double base_lag = 2.0 * spec.jitter_ms + 0.5;
  std::vector<double> rel(spec.motif_spikes, 0.0);
  std::set<std::pair<NeuronId, NeuronId>> motif_synapses;
  for (std::size_t i = 1; i < spec.motif_spikes; ++i) {
    const std::size_t parent = rng.below(i);
    const double delay = rng.uniform(1.0, 8.0);
    rel[i] = rel[parent] + delay + base_lag;
    motif_synapses.insert({motif_neuron[parent], motif_neuron[i]});
    net.synapses.push_back({motif_neuron[parent], motif_neuron[i], spec.motif_weight, delay});
  }
  for (NeuronId pre = 0; pre < spec.neurons; ++pre) {
    for (NeuronId post = 0; post < spec.neurons; ++post) {
      if (pre == post || motif_synapses.count({pre, post}) || !rng.bernoulli(spec.background_p)) continue;
      net.synapses.push_back({pre, post, rng.uniform(0.0, 4.0), rng.uniform(1.0, 20.0)});
    }
  }

  const double duration = spec.copy_spacing_ms * static_cast<double>(spec.copies + 1);
  std::vector<Spike> events;
  std::vector<std::vector<Spike>> motif_events(spec.copies);
  for (std::size_t k = 0; k < spec.copies; ++k) {
    const double onset = spec.copy_spacing_ms * static_cast<double>(k + 1) - 0.5 * spec.copy_spacing_ms;
    for (std::size_t i = 0; i < spec.motif_spikes; ++i) {
      const Spike s{motif_neuron[i], onset + rel[i] + rng.uniform(-spec.jitter_ms, spec.jitter_ms)};
      motif_events[k].push_back(s);
      events.push_back(s);
    }
  }
  for (NeuronId n = 0; n < spec.neurons; ++n) {
    for (double t = rng.exponential(spec.background_hz / 1000.0); t < duration;
         t += rng.exponential(spec.background_hz / 1000.0)) {
      events.push_back({n, t});
    }
  }
  fx.train = sort_and_index_spikes(std::move(events), duration);

  std::map<std::pair<NeuronId, double>, SpikeId> index;
  for (SpikeId id = 0; id < fx.train.size(); ++id) index[{fx.train[id].neuron, fx.train[id].time}] = id;
  for (const auto& copy : motif_events) {
    std::vector<SpikeId> ids;
    for (const auto& s : copy) ids.push_back(index.at({s.neuron, s.time}));
    fx.instances.push_back(std::move(ids));
  }
  return fx;
}

/// Fraction of motif correspondences (instance k spike i with instance l spike
/// i) contained as vertices of the best single subthread.
inline double best_pair_coverage(std::span<const AnalogousSubthread> subs, const std::vector<SpikeId>& k,
                                 const std::vector<SpikeId>& l) {
  double best = 0.0;
  for (const auto& sub : subs) {
    std::set<PairKey> have;
    for (const auto& v : sub.vertices) have.emplace(std::min(v.spike_a, v.spike_b), std::max(v.spike_a, v.spike_b));
    std::size_t hit = 0;
    for (std::size_t i = 0; i < k.size(); ++i) hit += have.count({std::min(k[i], l[i]), std::max(k[i], l[i])});
    best = std::max(best, static_cast<double>(hit) / static_cast<double>(k.size()));
  }
  return best;
}

}  // namespace gnat::testing
