#include <algorithm>
#include <cmath>
#include <tuple>

#include "gnat/netsim.hpp"

namespace gnat {

void StdpConfig::validate() const {
  if (!(a_plus >= 0.0) || !(a_minus >= 0.0)) throw ConfigError("stdp.a_plus, stdp.a_minus: must be >= 0");
  if (!(tau_plus > 0.0) || !(tau_minus > 0.0)) throw ConfigError("stdp.tau_plus_ms, stdp.tau_minus_ms: must be > 0");
  if (!(w_max > 0.0)) throw ConfigError("stdp.w_max: must be > 0");
  if (!(update_interval >= 0.0)) throw ConfigError("stdp.update_interval_ms: must be >= 0");
  if (!(drift_per_s >= 0.0) || !std::isfinite(drift_per_s)) throw ConfigError("stdp.drift_per_s: must be >= 0");
}

StdpRule::StdpRule(const Network& net, const StdpConfig& cfg, std::vector<double> weights)
    : cfg_(cfg), weights_(std::move(weights)), incoming_(incoming_index(net)) {
  cfg_.validate();
  if (weights_.size() != net.synapses.size()) {
    throw InputError("stdp: weight vector size does not match the synapse list");
  }
  const auto n_syn = net.synapses.size();
  pending_.assign(n_syn, 0.0);
  plastic_.resize(n_syn);
  post_of_.resize(n_syn);
  for (std::size_t s = 0; s < n_syn; ++s) {
    plastic_[s] = net.neurons[net.synapses[s].pre].excitatory ? 1 : 0;
    post_of_[s] = net.synapses[s].post;
  }
  pre_trace_.assign(n_syn, 0.0);
  pre_trace_time_.assign(n_syn, 0.0);
  post_trace_.assign(net.size(), 0.0);
  post_trace_time_.assign(net.size(), 0.0);
}

void StdpRule::change(SynapseId synapse, double delta) {
  if (cfg_.update_interval > 0.0) {
    pending_[synapse] += delta;
  } else {
    weights_[synapse] = std::clamp(weights_[synapse] + delta, 0.0, cfg_.w_max);
  }
}

void StdpRule::on_arrival(SynapseId synapse, double t) {
  if (!plastic_[synapse]) return;
  const NeuronId post = post_of_[synapse];
  const double post_trace = post_trace_[post] * std::exp(-(t - post_trace_time_[post]) / cfg_.tau_minus);
  if (post_trace > 0.0) change(synapse, -cfg_.a_minus * post_trace);
  pre_trace_[synapse] = pre_trace_[synapse] * std::exp(-(t - pre_trace_time_[synapse]) / cfg_.tau_plus) + 1.0;
  pre_trace_time_[synapse] = t;
}

void StdpRule::on_post_spike(NeuronId neuron, double t) {
  for (SynapseId s : incoming_[neuron]) {
    if (!plastic_[s] || pre_trace_[s] == 0.0) continue;
    change(s, cfg_.a_plus * pre_trace_[s] * std::exp(-(t - pre_trace_time_[s]) / cfg_.tau_plus));
  }
  post_trace_[neuron] = post_trace_[neuron] * std::exp(-(t - post_trace_time_[neuron]) / cfg_.tau_minus) + 1.0;
  post_trace_time_[neuron] = t;
}

void StdpRule::flush() {
  if (cfg_.update_interval <= 0.0) return;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if (pending_[s] == 0.0) continue;
    weights_[s] = std::clamp(weights_[s] + pending_[s], 0.0, cfg_.w_max);
    pending_[s] = 0.0;
  }
}

void StdpRule::drift() {
  if (cfg_.drift_per_s == 0.0) return;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if (plastic_[s]) weights_[s] = std::clamp(weights_[s] + cfg_.drift_per_s, 0.0, cfg_.w_max);
  }
}

std::vector<double> stdp_step(const Network& net, std::span<const double> weights, const SpikeTrain& history,
                              const StdpConfig& cfg) {
  StdpRule rule(net, cfg, std::vector<double>(weights.begin(), weights.end()));
  const auto outgoing = outgoing_index(net);

  // (time, kind, id): kind 0 = arrival at synapse id, 1 = spike of neuron id.
  std::vector<std::tuple<double, int, std::uint32_t>> events;
  for (const auto& spike : history.spikes()) {
    if (spike.neuron >= net.size()) {
      throw InputError("stdp: spike of neuron " + std::to_string(spike.neuron) + " outside the network");
    }
    events.emplace_back(spike.time, 1, spike.neuron);
    for (SynapseId s : outgoing[spike.neuron]) events.emplace_back(spike.time + net.synapses[s].delay, 0, s);
  }
  std::sort(events.begin(), events.end());

  double next_flush = cfg.update_interval;
  double next_second = 1000.0;
  for (const auto& [t, kind, id] : events) {
    while (cfg.update_interval > 0.0 && t >= next_flush) {
      rule.flush();
      next_flush += cfg.update_interval;
    }
    while (cfg.drift_per_s > 0.0 && t >= next_second) {
      rule.drift();
      next_second += 1000.0;
    }
    if (kind == 0) {
      rule.on_arrival(id, t);
    } else {
      rule.on_post_spike(id, t);
    }
  }
  rule.flush();
  return std::move(rule).take_weights();
}

}  // namespace gnat
