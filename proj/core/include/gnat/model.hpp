#pragma once

// Shared data model: spikes, spike trains, networks and their validation.
// Times are milliseconds, positions micrometers, everything double precision.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnat {

using NeuronId = std::uint32_t;
using SpikeId = std::uint32_t;
using EdgeId = std::uint32_t;
using SynapseId = std::uint32_t;

/// Base of every error the toolkit throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A required input file is absent, typically because an earlier pipeline
/// stage has not been run.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-finite state) during simulation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Minimum axonal conduction delay of every network, in ms.
inline constexpr double kMinDelayMs = 1.0;

struct Spike {
  NeuronId neuron = 0;
  double time = 0.0;

  friend bool operator==(const Spike&, const Spike&) = default;
};

/// Canonical (time, neuron) ordering.
inline bool spike_before(const Spike& a, const Spike& b) {
  return a.time < b.time || (a.time == b.time && a.neuron < b.neuron);
}

/// Time-sorted spike list. A spike's SpikeId is its position in the sorted
/// sequence, so ids are dense and increase with time.
class SpikeTrain {
 public:
  SpikeTrain() = default;

  std::span<const Spike> spikes() const { return spikes_; }
  const Spike& operator[](SpikeId id) const { return spikes_[id]; }
  std::size_t size() const { return spikes_.size(); }
  bool empty() const { return spikes_.empty(); }
  double duration() const { return duration_; }

  /// Largest neuron index referenced plus one (0 for an empty train).
  std::size_t neuron_span() const;

  /// Spike ids grouped per neuron, ascending in time. Neurons beyond the
  /// train's span get empty lists.
  std::vector<std::vector<SpikeId>> by_neuron(std::size_t neuron_count) const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  friend SpikeTrain sort_and_index_spikes(std::vector<Spike>, std::optional<double>);
  std::vector<Spike> spikes_;
  double duration_ = 0.0;
};

/// Sorts events into canonical order and assigns SpikeIds. Throws InputError
/// naming the offending event for negative or non-finite times, or for times
/// past `duration`. Without a duration, the latest spike time is used.
SpikeTrain sort_and_index_spikes(std::vector<Spike> events,
                                 std::optional<double> duration = std::nullopt);

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Neuron {
  Position position;
  bool excitatory = true;

  friend bool operator==(const Neuron&, const Neuron&) = default;
};

struct Synapse {
  NeuronId pre = 0;
  NeuronId post = 0;
  double weight = 0.0;
  double delay = kMinDelayMs;  // ms

  friend bool operator==(const Synapse&, const Synapse&) = default;
};

/// Neurons on a periodic width x height rectangle plus sparse weighted,
/// delayed synapses. Plain value type; see validate_network for invariants.
struct Network {
  double width = 0.0;
  double height = 0.0;
  std::vector<Neuron> neurons;
  std::vector<Synapse> synapses;

  std::size_t size() const { return neurons.size(); }
  bool is_excitatory(NeuronId n) const { return neurons[n].excitatory; }

  friend bool operator==(const Network&, const Network&) = default;
};

struct Violation {
  enum class Kind {
    BadDimensions,
    PositionOutOfBounds,
    NeuronOutOfRange,
    SelfSynapse,
    DuplicateSynapse,
    DelayBelowMinimum,
    WeightSign,
    NonFinite,
  };
  Kind kind;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

/// Reports every broken Network invariant; empty iff the network is valid.
std::vector<Violation> validate_network(const Network& net);

/// Throws InputError carrying the first few violations if the network is invalid.
void require_valid(const Network& net);

enum class NormKind { L1, L2 };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view text);

/// Norm of the incoming excitatory weights onto `neuron`; 0 when there are none.
double incoming_norm(const Network& net, NeuronId neuron, NormKind kind);

/// incoming_norm for every neuron in one pass over the synapse list.
std::vector<double> incoming_norms(const Network& net, NormKind kind);

/// Compressed adjacency: ids of synapses per neuron, in synapse-list order.
struct SynapseIndex {
  std::vector<std::uint32_t> offsets;  // size() + 1 entries
  std::vector<SynapseId> synapses;

  std::span<const SynapseId> operator[](NeuronId n) const {
    return {synapses.data() + offsets[n], synapses.data() + offsets[n + 1]};
  }
};

SynapseIndex outgoing_index(const Network& net);
SynapseIndex incoming_index(const Network& net);

/// Hash of the network's structure (neuron count, E/I tags, synapse pre/post
/// pairs and delays). Weights are excluded: activity graphs built from the
/// plastic and fixed phases share a structure.
std::uint64_t structural_fingerprint(const Network& net);

}  // namespace gnat
