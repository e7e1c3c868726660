#pragma once

// Network construction and spiking simulation: Izhikevich RS/FS neurons on a
// torus with distance-dependent connectivity, delayed delta-current synapses,
// forced stimulation spikes and optional pair-based STDP.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gnat/model.hpp"

namespace gnat {

/// Two-variable Izhikevich model constants.
struct IzhikevichParams {
  double a = 0.02;
  double b = 0.2;
  double c = -65.0;
  double d = 8.0;

  static constexpr IzhikevichParams regular_spiking() { return {0.02, 0.2, -65.0, 8.0}; }
  static constexpr IzhikevichParams fast_spiking() { return {0.1, 0.2, -65.0, 2.0}; }
};

/// Sigmoidal fall-off of connection probability with distance:
///   p(r) = p_max * (1 - 1 / (1 + exp(-sigma * (r - mu))))
struct ConnectivityProfile {
  double p_max = 0.4;
  double mu = 10.0;     // um
  double sigma = 1.0;   // 1/um

  double probability(double r) const;
};

/// Euclidean distance with wrap-around on a width x height torus.
double torus_distance(Position a, Position b, double width, double height);

struct NetworkParams {
  std::size_t n_excitatory = 800;
  std::size_t n_inhibitory = 200;
  double width = 44.72136;   // um; density of 5000 neurons on 100 x 100
  double height = 44.72136;
  ConnectivityProfile excitatory_profile{0.4, 10.0, 1.0};  // E -> E,I
  ConnectivityProfile inhibitory_profile{0.5, 10.0, 1.0};  // I -> E
  double exc_delay_min = 1.0;   // ms
  double exc_delay_max = 20.0;  // ms
  double inh_delay = 1.0;       // ms
  double exc_weight = 6.0;
  double inh_weight = -5.0;
  std::uint64_t seed = 1;
};

/// Places neurons uniformly on the torus (excitatory first, ids 0..n_exc-1)
/// and connects each ordered pair independently with the profile's p(r).
/// Inhibitory neurons project to excitatory neurons only.
Network build_network(const NetworkParams& params);

struct StimulusConfig {
  double poisson_rate_hz = 0.4;             // independent forced spikes, every neuron
  std::vector<NeuronId> pattern_neurons;
  std::vector<Spike> pattern_spikes;        // times within [0, pattern_period_ms)
  double pattern_period_ms = 10000.0;
  double pattern_phase_ms = 0.0;            // pattern time at simulation t = 0
  double bias_current = 0.0;                // constant input to every neuron
  std::vector<Spike> extra_forced;          // one-off forced spikes
  std::uint64_t seed = 2;
};

/// Fixed random pattern: `n_pattern_neurons` distinct neurons drawn from
/// [0, n_candidates), each firing as a Poisson process of `rate_hz` during
/// [0, active_window_ms) and silent for the rest of the period. Only the
/// pattern fields of the returned config are meaningful.
StimulusConfig make_pattern(std::size_t n_pattern_neurons, std::size_t n_candidates, double rate_hz,
                            double active_window_ms, double period_ms, std::uint64_t seed);

struct StdpConfig {
  double a_plus = 0.1;
  double a_minus = 0.12;
  double tau_plus = 20.0;    // ms
  double tau_minus = 20.0;   // ms
  double w_max = 10.0;
  double update_interval = 0.0;  // ms; 0 applies every pair immediately
  double drift_per_s = 0.0;      // activity-independent increment, applied once per second

  void validate() const;
};

/// Trace-based all-to-all pair STDP on excitatory (E->E, E->I) synapses.
///
/// A presynaptic spike "arrives" at its synapse after the conduction delay.
/// A postsynaptic spike at t potentiates every plastic input by
/// a_plus * sum(exp(-(t - arrival) / tau_plus)) over earlier arrivals; an
/// arrival at t depresses by a_minus * sum(exp(-(t - post) / tau_minus)) over
/// earlier postsynaptic spikes. Events at equal times are fed arrivals first,
/// so an arrival coinciding with a postsynaptic spike counts as pre-before-post.
/// Weights are clipped to [0, w_max] after each change (or each flush when
/// update_interval > 0). With drift_per_s > 0 every plastic weight also
/// grows by that amount at each whole second of simulated time.
class StdpRule {
 public:
  StdpRule(const Network& net, const StdpConfig& cfg, std::vector<double> weights);

  void on_arrival(SynapseId synapse, double t);
  void on_post_spike(NeuronId neuron, double t);
  /// Applies changes accumulated in batched mode; no-op otherwise.
  void flush();
  /// Adds drift_per_s to every plastic weight (clipped).
  void drift();

  bool is_plastic(SynapseId synapse) const { return plastic_[synapse] != 0; }
  std::span<const double> weights() const { return weights_; }
  std::vector<double> take_weights() && { return std::move(weights_); }

 private:
  void change(SynapseId synapse, double delta);

  StdpConfig cfg_;
  std::vector<double> weights_;
  std::vector<double> pending_;
  std::vector<std::uint8_t> plastic_;
  std::vector<NeuronId> post_of_;
  SynapseIndex incoming_;
  std::vector<double> pre_trace_;
  std::vector<double> pre_trace_time_;
  std::vector<double> post_trace_;
  std::vector<double> post_trace_time_;
};

/// Replays a spike history through StdpRule with exact (unrounded) arrival
/// times t_pre + delay and returns the updated weights, indexed like
/// net.synapses.
std::vector<double> stdp_step(const Network& net, std::span<const double> weights,
                              const SpikeTrain& history, const StdpConfig& cfg);

struct SimulationOptions {
  double duration_ms = 1000.0;
  double dt_ms = 0.5;
  std::optional<StdpConfig> plasticity;
  IzhikevichParams excitatory = IzhikevichParams::regular_spiking();
  IzhikevichParams inhibitory = IzhikevichParams::fast_spiking();
  std::uint64_t seed = 3;  // Poisson background
};

struct SimulationResult {
  SpikeTrain train;
  Network network;  // input network with final weights
};

/// All forced spikes of a run in [0, duration): per-neuron Poisson background,
/// periodic pattern repetitions and extra_forced, canonically sorted.
std::vector<Spike> forced_spikes(std::size_t neuron_count, const StimulusConfig& stim,
                                 double duration_ms, std::uint64_t seed);

/// Forward-Euler integration at step dt with v advanced in two half-steps.
///
/// Step k covers [k dt, (k+1) dt). In order: synaptic arrivals due at step k
/// are summed into the input current (a spike of weight w delivers charge
/// w * 1 ms, i.e. current w / dt for one step); neurons with v >= 30 mV fire at
/// k dt and reset; forced spikes scheduled in the step fire at their exact
/// scheduled time and reset (a natural crossing in the same step merges into
/// the forced spike); then v, u are integrated. Arrival steps are
/// round((t_spike + delay) / dt). Throws NumericalError on non-finite state.
SimulationResult simulate(const Network& net, const StimulusConfig& stim, const SimulationOptions& opts);

}  // namespace gnat
