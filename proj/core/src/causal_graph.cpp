#include "gnat/causal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gnat/random.hpp"

namespace gnat {

void OmegaConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("graph.tau_ms: must be > 0");
  if (!(log_threshold > 0.0) || !std::isfinite(log_threshold)) throw ConfigError("graph.log_threshold: must be > 0");
  if (window_multiplier && !(*window_multiplier > 0.0)) throw ConfigError("graph.window_multiplier: must be > 0");
}

double compute_omega(double t_post, double t_pre, double weight, double norm, double delay, double tau) {
  if (norm == 0.0) return 0.0;
  const double lag = t_post - t_pre - delay;
  if (lag < 0.0) return 0.0;
  return (weight / norm) * std::exp(-lag / tau);
}

ActivityGraph::ActivityGraph(std::shared_ptr<const SpikeTrain> train, std::vector<std::uint8_t> vertex_mask,
                             std::vector<ActivityEdge> edges, std::uint64_t network_fingerprint)
    : train_(std::move(train)),
      vertex_mask_(std::move(vertex_mask)),
      edges_(std::move(edges)),
      fingerprint_(network_fingerprint) {
  if (!train_) throw InputError("activity graph needs a spike train");
  const std::size_t n = train_->size();
  if (vertex_mask_.size() != n) throw InputError("activity graph vertex mask does not match the spike train");
  vertex_count_ = static_cast<std::size_t>(std::count(vertex_mask_.begin(), vertex_mask_.end(), 1));

  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.pre >= n || e.post >= n || !vertex_mask_[e.pre] || !vertex_mask_[e.post]) {
      throw InputError("edge " + std::to_string(e.pre) + "->" + std::to_string(e.post) +
                       " references a spike that is not an excitatory vertex of the train");
    }
    if (!((*train_)[e.pre].time < (*train_)[e.post].time)) {
      throw InputError("edge " + std::to_string(e.pre) + "->" + std::to_string(e.post) + " does not point forward in time");
    }
    if (i > 0) {
      const auto& p = edges_[i - 1];
      if (std::pair(p.pre, p.post) >= std::pair(e.pre, e.post)) {
        throw InputError("activity graph edges must be sorted by (pre, post) without duplicates");
      }
    }
  }

  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.pre + 1];
    ++in_offsets_[e.post + 1];
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  out_edges_.resize(edges_.size());
  in_edges_.resize(edges_.size());
  auto out_cursor = out_offsets_;
  auto in_cursor = in_offsets_;
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    out_edges_[out_cursor[edges_[id].pre]++] = id;
    in_edges_[in_cursor[edges_[id].post]++] = id;
  }
}

std::span<const EdgeId> ActivityGraph::out_edges(SpikeId id) const {
  return {out_edges_.data() + out_offsets_[id], out_edges_.data() + out_offsets_[id + 1]};
}

std::span<const EdgeId> ActivityGraph::in_edges(SpikeId id) const {
  return {in_edges_.data() + in_offsets_[id], in_edges_.data() + in_offsets_[id + 1]};
}

std::optional<EdgeId> ActivityGraph::find_edge(SpikeId pre, SpikeId post) const {
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair(pre, post),
                                   [](const ActivityEdge& e, const std::pair<SpikeId, SpikeId>& key) {
                                     return std::pair(e.pre, e.post) < key;
                                   });
  if (it == edges_.end() || it->pre != pre || it->post != post) return std::nullopt;
  return static_cast<EdgeId>(it - edges_.begin());
}

std::vector<std::uint8_t> excitatory_mask(const SpikeTrain& train, const Network& net) {
  std::vector<std::uint8_t> mask(train.size());
  for (SpikeId id = 0; id < train.size(); ++id) {
    const NeuronId n = train[id].neuron;
    if (n >= net.size()) {
      throw InputError("spike " + std::to_string(id) + " references neuron " + std::to_string(n) +
                       " absent from the network (" + std::to_string(net.size()) + " neurons)");
    }
    mask[id] = net.neurons[n].excitatory ? 1 : 0;
  }
  return mask;
}

namespace {

struct NeuronSpikes {
  std::vector<SpikeId> ids;
  std::vector<double> times;
};

std::vector<NeuronSpikes> group_spikes(const SpikeTrain& train, std::size_t neuron_count) {
  std::vector<NeuronSpikes> out(neuron_count);
  for (SpikeId id = 0; id < train.size(); ++id) {
    auto& slot = out[train[id].neuron];
    slot.ids.push_back(id);
    slot.times.push_back(train[id].time);
  }
  return out;
}

// Calls visit(pre_spike, post_spike, omega) for every pair on an
// excitatory->excitatory synapse whose lag lies in [0, window]. Presynaptic
// neurons are split into `workers` contiguous blocks; each block's output goes
// to its own sink, so concatenating sinks in order is deterministic.
template <typename Sink, typename Visit>
std::vector<Sink> join_pairs(const SpikeTrain& train, const Network& net, const OmegaConfig& cfg, double window,
                             unsigned workers, Visit visit) {
  cfg.validate();
  (void)excitatory_mask(train, net);
  const auto spikes = group_spikes(train, net.size());
  const auto norms = incoming_norms(net, cfg.norm);
  const auto outgoing = outgoing_index(net);

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(net.size(), 1))));
  std::vector<Sink> sinks(workers);
  auto run = [&](unsigned w) {
    const std::size_t begin = net.size() * w / workers;
    const std::size_t end = net.size() * (w + 1) / workers;
    for (NeuronId pre = static_cast<NeuronId>(begin); pre < end; ++pre) {
      if (!net.neurons[pre].excitatory || spikes[pre].ids.empty()) continue;
      const auto& pre_spikes = spikes[pre];
      for (SynapseId sid : outgoing[pre]) {
        const auto& syn = net.synapses[sid];
        if (!net.neurons[syn.post].excitatory || !(syn.weight > 0.0) || norms[syn.post] == 0.0) continue;
        const auto& post_spikes = spikes[syn.post];
        if (post_spikes.ids.empty()) continue;
        std::size_t first = 0;
        for (std::size_t i = 0; i < pre_spikes.ids.size(); ++i) {
          const double t_pre = pre_spikes.times[i];
          const double lo = t_pre + syn.delay;
          const double hi = lo + window;
          while (first < post_spikes.times.size() && post_spikes.times[first] < lo) ++first;
          for (std::size_t j = first; j < post_spikes.times.size() && post_spikes.times[j] <= hi; ++j) {
            const double omega =
                compute_omega(post_spikes.times[j], t_pre, syn.weight, norms[syn.post], syn.delay, cfg.tau);
            if (omega > 0.0) visit(sinks[w], pre_spikes.ids[i], post_spikes.ids[j], omega);
          }
        }
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return sinks;
}

}  // namespace

ActivityGraph build_activity_graph(std::shared_ptr<const SpikeTrain> train, const Network& net,
                                   const OmegaConfig& cfg, unsigned workers) {
  if (!train) throw InputError("build_activity_graph: null spike train");
  auto mask = excitatory_mask(*train, net);
  const double threshold = cfg.log_threshold;
  auto sinks = join_pairs<std::vector<ActivityEdge>>(
      *train, net, cfg, cfg.multiplier() * cfg.tau, workers,
      [threshold](std::vector<ActivityEdge>& out, SpikeId pre, SpikeId post, double omega) {
        if (-std::log(omega) <= threshold) out.push_back({pre, post, omega});
      });

  std::vector<ActivityEdge> edges;
  std::size_t total = 0;
  for (const auto& s : sinks) total += s.size();
  edges.reserve(total);
  for (auto& s : sinks) edges.insert(edges.end(), s.begin(), s.end());
  std::sort(edges.begin(), edges.end(),
            [](const ActivityEdge& a, const ActivityEdge& b) { return std::pair(a.pre, a.post) < std::pair(b.pre, b.post); });
  // A synapse is unique per (pre, post) neuron pair, so (pre, post) spike
  // pairs are unique as well.
  if (edges.size() > std::size_t{UINT32_MAX}) throw InputError("activity graph exceeds 2^32 edges");
  return ActivityGraph(std::move(train), std::move(mask), std::move(edges), structural_fingerprint(net));
}

std::vector<double> neg_log_omega_samples(const SpikeTrain& train, const Network& net, const OmegaConfig& cfg,
                                          unsigned workers) {
  auto sinks = join_pairs<std::vector<double>>(
      train, net, cfg, 3.0 * cfg.multiplier() * cfg.tau, workers,
      [](std::vector<double>& out, SpikeId, SpikeId, double omega) { out.push_back(-std::log(omega)); });
  std::vector<double> values;
  for (auto& s : sinks) values.insert(values.end(), s.begin(), s.end());
  return values;
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

Histogram Histogram::from_values(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be > 0");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  constexpr double kEdgeSlack = 1e-9;
  auto bin_of = [&](double x) { return std::floor(x / bin_width + kEdgeSlack); };
  const double lo = bin_of(*std::min_element(values.begin(), values.end()));
  const double hi = bin_of(*std::max_element(values.begin(), values.end()));
  h.origin = lo * bin_width;
  h.counts.assign(static_cast<std::size_t>(hi - lo) + 1, 0);
  for (double x : values) ++h.counts[static_cast<std::size_t>(bin_of(x) - lo)];
  return h;
}

Histogram neg_log_omega_histogram(const SpikeTrain& train, const Network& net, const OmegaConfig& cfg,
                                  double bin_width, unsigned workers) {
  const auto values = neg_log_omega_samples(train, net, cfg, workers);
  return Histogram::from_values(values, bin_width);
}

ThresholdSelection select_threshold(const Histogram& hist, double fallback) {
  ThresholdSelection out;
  const std::size_t n = hist.counts.size();
  if (n == 0) {
    out = {fallback, true, "empty -log(Omega) histogram; using default threshold"};
    return out;
  }
  constexpr std::size_t kHalfWidth = 2;
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= kHalfWidth ? i - kHalfWidth : 0;
    const std::size_t hi = std::min(n - 1, i + kHalfWidth);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += static_cast<double>(hist.counts[j]);
    smooth[i] = sum / static_cast<double>(hi - lo + 1);
  }
  const auto peak = static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  for (std::size_t i = peak + 1; i + 1 < n; ++i) {
    if (smooth[i] <= smooth[i - 1] && smooth[i] < smooth[i + 1]) {
      out.log_threshold = hist.bin_left(i) + 0.5 * hist.bin_width;
      return out;
    }
  }
  out = {fallback, true, "no local minimum after the -log(Omega) peak; using default threshold"};
  return out;
}

ShuffleMethod parse_shuffle_method(std::string_view text) {
  if (text == "uniform") return ShuffleMethod::Uniform;
  if (text == "isi") return ShuffleMethod::InterSpikeInterval;
  throw ConfigError("graph.shuffle_method: expected uniform or isi, got '" + std::string(text) + "'");
}

SpikeTrain shuffle_train(const SpikeTrain& train, std::uint64_t seed, ShuffleMethod method) {
  const auto groups = train.by_neuron(0);
  const std::uint64_t base = splitmix64(seed ^ rng_tag::kShuffle);
  std::vector<Spike> out;
  out.reserve(train.size());
  for (NeuronId n = 0; n < groups.size(); ++n) {
    const auto& ids = groups[n];
    if (ids.empty()) continue;
    Rng rng = Rng::stream(base, n);
    if (method == ShuffleMethod::Uniform) {
      for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({n, rng.uniform() * train.duration()});
      continue;
    }
    std::vector<double> gaps;
    for (std::size_t i = 1; i < ids.size(); ++i) gaps.push_back(train[ids[i]].time - train[ids[i - 1]].time);
    for (std::size_t i = gaps.size(); i > 1; --i) std::swap(gaps[i - 1], gaps[rng.below(i)]);
    double t = train[ids.front()].time;
    out.push_back({n, t});
    for (double g : gaps) {
      t = std::min(t + g, train.duration());
      out.push_back({n, t});
    }
  }
  return sort_and_index_spikes(std::move(out), train.duration());
}

bool is_acyclic(const ActivityGraph& graph) {
  const std::size_t n = graph.spike_count();
  std::vector<std::uint32_t> indegree(n, 0);
  for (const auto& e : graph.edges()) ++indegree[e.post];
  std::vector<SpikeId> ready;
  for (SpikeId id = 0; id < n; ++id) {
    if (graph.is_vertex(id) && indegree[id] == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const SpikeId id = ready.back();
    ready.pop_back();
    ++visited;
    for (EdgeId e : graph.out_edges(id)) {
      if (--indegree[graph.edges()[e].post] == 0) ready.push_back(graph.edges()[e].post);
    }
  }
  return visited == graph.vertex_count();
}

}  // namespace gnat
