#include "gnat/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace gnat {

std::size_t SpikeTrain::neuron_span() const {
  std::size_t span = 0;
  for (const auto& s : spikes_) span = std::max<std::size_t>(span, std::size_t{s.neuron} + 1);
  return span;
}

std::vector<std::vector<SpikeId>> SpikeTrain::by_neuron(std::size_t neuron_count) const {
  std::vector<std::vector<SpikeId>> lists(std::max(neuron_count, neuron_span()));
  for (SpikeId id = 0; id < spikes_.size(); ++id) lists[spikes_[id].neuron].push_back(id);
  return lists;
}

SpikeTrain sort_and_index_spikes(std::vector<Spike> events, std::optional<double> duration) {
  if (duration && (!std::isfinite(*duration) || *duration < 0.0)) {
    throw InputError("spike train duration must be finite and >= 0");
  }
  double latest = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.time) || e.time < 0.0) {
      std::ostringstream msg;
      msg << "spike event " << i << " (neuron " << e.neuron << ", time " << e.time
          << " ms): time must be finite and >= 0";
      throw InputError(msg.str());
    }
    if (duration && e.time > *duration) {
      std::ostringstream msg;
      msg << "spike event " << i << " (neuron " << e.neuron << ", time " << e.time
          << " ms) lies past the train duration " << *duration << " ms";
      throw InputError(msg.str());
    }
    latest = std::max(latest, e.time);
  }
  std::sort(events.begin(), events.end(), spike_before);
  if (events.size() > std::size_t{UINT32_MAX}) throw InputError("spike train exceeds 2^32 spikes");

  SpikeTrain train;
  train.spikes_ = std::move(events);
  train.duration_ = duration.value_or(latest);
  return train;
}

std::string_view to_string(Violation::Kind kind) {
  using K = Violation::Kind;
  switch (kind) {
    case K::BadDimensions: return "bad dimensions";
    case K::PositionOutOfBounds: return "position out of bounds";
    case K::NeuronOutOfRange: return "neuron out of range";
    case K::SelfSynapse: return "self synapse";
    case K::DuplicateSynapse: return "duplicate synapse";
    case K::DelayBelowMinimum: return "delay below minimum";
    case K::WeightSign: return "weight sign mismatch";
    case K::NonFinite: return "non-finite value";
  }
  return "unknown";
}

namespace {

std::string describe(std::size_t index, const Synapse& s) {
  std::ostringstream out;
  out << "synapse " << index << " (" << s.pre << "->" << s.post << ")";
  return out.str();
}

}  // namespace

std::vector<Violation> validate_network(const Network& net) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  auto report = [&out](K kind, std::string subject) {
    out.push_back({kind, std::move(subject) + ": " + std::string(to_string(kind))});
  };

  if (!(std::isfinite(net.width) && net.width > 0.0 && std::isfinite(net.height) && net.height > 0.0)) {
    report(K::BadDimensions, "network");
  }
  for (std::size_t n = 0; n < net.neurons.size(); ++n) {
    const auto& p = net.neurons[n].position;
    const std::string who = "neuron " + std::to_string(n);
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      report(K::NonFinite, who);
    } else if (p.x < 0.0 || p.x >= net.width || p.y < 0.0 || p.y >= net.height) {
      report(K::PositionOutOfBounds, who);
    }
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(net.synapses.size());
  const auto count = net.neurons.size();
  for (std::size_t i = 0; i < net.synapses.size(); ++i) {
    const auto& s = net.synapses[i];
    if (s.pre >= count || s.post >= count) {
      report(K::NeuronOutOfRange, describe(i, s));
      continue;
    }
    if (s.pre == s.post) report(K::SelfSynapse, describe(i, s));
    if (!seen.insert((std::uint64_t{s.pre} << 32) | s.post).second) {
      report(K::DuplicateSynapse, describe(i, s));
    }
    if (!std::isfinite(s.weight) || !std::isfinite(s.delay)) {
      report(K::NonFinite, describe(i, s));
      continue;
    }
    if (s.delay < kMinDelayMs) report(K::DelayBelowMinimum, describe(i, s));
    const bool exc = net.neurons[s.pre].excitatory;
    if ((exc && s.weight < 0.0) || (!exc && s.weight > 0.0)) report(K::WeightSign, describe(i, s));
  }
  return out;
}

void require_valid(const Network& net) {
  const auto violations = validate_network(net);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid network (" << violations.size() << " violations)";
  for (std::size_t i = 0; i < violations.size() && i < 5; ++i) msg << "; " << violations[i].message;
  throw InputError(msg.str());
}

std::string_view to_string(NormKind kind) { return kind == NormKind::L1 ? "l1" : "l2"; }

NormKind parse_norm_kind(std::string_view text) {
  if (text == "l1" || text == "L1") return NormKind::L1;
  if (text == "l2" || text == "L2") return NormKind::L2;
  throw ConfigError("norm: expected l1 or l2, got '" + std::string(text) + "'");
}

namespace {

double finish_norm(double accumulated, NormKind kind) {
  return kind == NormKind::L1 ? accumulated : std::sqrt(accumulated);
}

double norm_term(double weight, NormKind kind) {
  return kind == NormKind::L1 ? weight : weight * weight;
}

// Terms are summed in ascending order so the result does not depend on how
// the synapse list happens to be arranged.
double sorted_norm(std::vector<double>& terms, NormKind kind) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return finish_norm(acc, kind);
}

}  // namespace

double incoming_norm(const Network& net, NeuronId neuron, NormKind kind) {
  std::vector<double> terms;
  for (const auto& s : net.synapses) {
    if (s.post == neuron && s.pre < net.size() && net.neurons[s.pre].excitatory) terms.push_back(norm_term(s.weight, kind));
  }
  return sorted_norm(terms, kind);
}

std::vector<double> incoming_norms(const Network& net, NormKind kind) {
  const auto incoming = incoming_index(net);
  std::vector<double> norms(net.size(), 0.0);
  std::vector<double> terms;
  for (NeuronId n = 0; n < net.size(); ++n) {
    terms.clear();
    for (SynapseId id : incoming[n]) {
      const auto& s = net.synapses[id];
      if (net.neurons[s.pre].excitatory) terms.push_back(norm_term(s.weight, kind));
    }
    norms[n] = sorted_norm(terms, kind);
  }
  return norms;
}

namespace {

SynapseIndex build_index(const Network& net, bool by_pre) {
  SynapseIndex index;
  index.offsets.assign(net.size() + 1, 0);
  for (const auto& s : net.synapses) {
    if (s.pre >= net.size() || s.post >= net.size()) {
      throw InputError("synapse " + std::to_string(s.pre) + "->" + std::to_string(s.post) +
                       " references a neuron outside the network");
    }
    ++index.offsets[(by_pre ? s.pre : s.post) + 1];
  }
  for (std::size_t n = 0; n < net.size(); ++n) index.offsets[n + 1] += index.offsets[n];
  index.synapses.resize(net.synapses.size());
  auto cursor = index.offsets;
  for (SynapseId id = 0; id < net.synapses.size(); ++id) {
    const auto& s = net.synapses[id];
    index.synapses[cursor[by_pre ? s.pre : s.post]++] = id;
  }
  return index;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::uint64_t value) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (value >> (8 * byte)) & 0xFFU;
    h *= kFnvPrime;
  }
}

}  // namespace

SynapseIndex outgoing_index(const Network& net) { return build_index(net, true); }
SynapseIndex incoming_index(const Network& net) { return build_index(net, false); }

std::uint64_t structural_fingerprint(const Network& net) {
  struct Key {
    NeuronId pre, post;
    double delay;
    auto operator<=>(const Key&) const = default;
  };
  std::vector<Key> keys;
  keys.reserve(net.synapses.size());
  for (const auto& s : net.synapses) keys.push_back({s.pre, s.post, s.delay});
  std::sort(keys.begin(), keys.end());

  std::uint64_t h = kFnvOffset;
  mix(h, net.neurons.size());
  for (const auto& n : net.neurons) mix(h, n.excitatory ? 1 : 0);
  mix(h, keys.size());
  for (const auto& k : keys) {
    mix(h, (std::uint64_t{k.pre} << 32) | k.post);
    mix(h, std::bit_cast<std::uint64_t>(k.delay));
  }
  return h;
}

}  // namespace gnat
