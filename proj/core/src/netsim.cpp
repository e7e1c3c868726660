#include "gnat/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gnat/random.hpp"

namespace gnat {

double ConnectivityProfile::probability(double r) const {
  return p_max * (1.0 - 1.0 / (1.0 + std::exp(-sigma * (r - mu))));
}

double torus_distance(Position a, Position b, double width, double height) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  dx = std::min(dx, width - dx);
  dy = std::min(dy, height - dy);
  return std::hypot(dx, dy);
}

namespace {

void check_profile(const ConnectivityProfile& p, const char* name) {
  if (!(p.p_max >= 0.0 && p.p_max <= 1.0)) {
    throw ConfigError(std::string(name) + ".p_max must lie in [0, 1]");
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.mu)) {
    throw ConfigError(std::string(name) + ": sigma must be > 0 and mu finite");
  }
}

double place(Rng& rng, double extent) {
  const double x = rng.uniform(0.0, extent);
  return x < extent ? x : std::nextafter(extent, 0.0);
}

}  // namespace

Network build_network(const NetworkParams& params) {
  if (params.n_excitatory == 0 || params.n_inhibitory == 0) {
    throw ConfigError("network: neuron counts must be > 0");
  }
  if (!(params.width > 0.0) || !(params.height > 0.0)) throw ConfigError("network: width/height must be > 0");
  check_profile(params.excitatory_profile, "network.excitatory_profile");
  check_profile(params.inhibitory_profile, "network.inhibitory_profile");
  if (!(params.exc_delay_min >= kMinDelayMs && params.exc_delay_max >= params.exc_delay_min)) {
    throw ConfigError("network: excitatory delay range must satisfy 1 <= min <= max");
  }
  if (!(params.inh_delay >= kMinDelayMs)) throw ConfigError("network.inh_delay must be >= 1 ms");
  if (params.exc_weight < 0.0 || params.inh_weight > 0.0) {
    throw ConfigError("network: exc_weight must be >= 0 and inh_weight <= 0");
  }

  Network net;
  net.width = params.width;
  net.height = params.height;
  const std::size_t total = params.n_excitatory + params.n_inhibitory;
  net.neurons.resize(total);
  Rng placement = Rng::stream(params.seed, rng_tag::kPlacement);
  for (std::size_t n = 0; n < total; ++n) {
    net.neurons[n].position.x = place(placement, net.width);
    net.neurons[n].position.y = place(placement, net.height);
    net.neurons[n].excitatory = n < params.n_excitatory;
  }

  Rng connect = Rng::stream(params.seed, rng_tag::kConnectivity);
  Rng delays = Rng::stream(params.seed, rng_tag::kDelays);
  for (NeuronId pre = 0; pre < total; ++pre) {
    const bool exc = net.neurons[pre].excitatory;
    const auto& profile = exc ? params.excitatory_profile : params.inhibitory_profile;
    for (NeuronId post = 0; post < total; ++post) {
      if (post == pre || (!exc && !net.neurons[post].excitatory)) continue;
      const double r = torus_distance(net.neurons[pre].position, net.neurons[post].position, net.width, net.height);
      if (!connect.bernoulli(profile.probability(r))) continue;
      const double delay = exc ? delays.uniform(params.exc_delay_min, params.exc_delay_max) : params.inh_delay;
      net.synapses.push_back({pre, post, exc ? params.exc_weight : params.inh_weight, delay});
    }
  }
  return net;
}

StimulusConfig make_pattern(std::size_t n_pattern_neurons, std::size_t n_candidates, double rate_hz,
                            double active_window_ms, double period_ms, std::uint64_t seed) {
  if (!(period_ms > 0.0) || !(active_window_ms >= 0.0) || active_window_ms > period_ms) {
    throw ConfigError("stimulus: pattern window must satisfy 0 <= window <= period, period > 0");
  }
  if (!(rate_hz >= 0.0)) throw ConfigError("stimulus.pattern_rate_hz must be >= 0");
  if (n_pattern_neurons > n_candidates) {
    throw ConfigError("stimulus.pattern_neurons exceeds the number of candidate neurons");
  }

  StimulusConfig cfg;
  cfg.pattern_period_ms = period_ms;
  cfg.seed = seed;
  Rng rng = Rng::stream(seed, rng_tag::kPattern);

  std::vector<NeuronId> pool(n_candidates);
  std::iota(pool.begin(), pool.end(), NeuronId{0});
  for (std::size_t i = 0; i < n_pattern_neurons; ++i) {
    std::swap(pool[i], pool[i + rng.below(n_candidates - i)]);
  }
  cfg.pattern_neurons.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_pattern_neurons));
  std::sort(cfg.pattern_neurons.begin(), cfg.pattern_neurons.end());

  if (rate_hz > 0.0) {
    const double per_ms = rate_hz / 1000.0;
    for (NeuronId n : cfg.pattern_neurons) {
      for (double t = rng.exponential(per_ms); t < active_window_ms; t += rng.exponential(per_ms)) {
        cfg.pattern_spikes.push_back({n, t});
      }
    }
  }
  std::sort(cfg.pattern_spikes.begin(), cfg.pattern_spikes.end(), spike_before);
  return cfg;
}

std::vector<Spike> forced_spikes(std::size_t neuron_count, const StimulusConfig& stim, double duration_ms,
                                 std::uint64_t seed) {
  std::vector<Spike> out;
  if (stim.poisson_rate_hz > 0.0) {
    const double per_ms = stim.poisson_rate_hz / 1000.0;
    const std::uint64_t base = splitmix64(seed ^ rng_tag::kPoisson);
    for (NeuronId n = 0; n < neuron_count; ++n) {
      Rng rng = Rng::stream(base, n);
      for (double t = rng.exponential(per_ms); t < duration_ms; t += rng.exponential(per_ms)) out.push_back({n, t});
    }
  }
  if (!stim.pattern_spikes.empty()) {
    const double phase = std::fmod(stim.pattern_phase_ms, stim.pattern_period_ms);
    for (double start = -phase; start < duration_ms; start += stim.pattern_period_ms) {
      for (const auto& s : stim.pattern_spikes) {
        const double t = start + s.time;
        if (t >= 0.0 && t < duration_ms) out.push_back({s.neuron, t});
      }
    }
  }
  for (const auto& s : stim.extra_forced) {
    if (s.time >= 0.0 && s.time < duration_ms) out.push_back(s);
  }
  for (const auto& s : out) {
    if (s.neuron >= neuron_count) {
      throw InputError("forced spike targets neuron " + std::to_string(s.neuron) + " outside the network");
    }
  }
  std::sort(out.begin(), out.end(), spike_before);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

constexpr double kSpikeThresholdMv = 30.0;
// A delivered spike of weight w injects charge w * 1 ms, independent of dt.
constexpr double kChargeWindowMs = 1.0;

}  // namespace

SimulationResult simulate(const Network& net, const StimulusConfig& stim, const SimulationOptions& opts) {
  if (!(opts.dt_ms > 0.0) || !std::isfinite(opts.dt_ms)) throw ConfigError("run.dt_ms must be > 0");
  if (!(opts.duration_ms > 0.0) || !std::isfinite(opts.duration_ms)) throw ConfigError("run.duration_ms must be > 0");
  if (!(opts.excitatory.a > 0.0) || !(opts.inhibitory.a > 0.0)) throw ConfigError("izhikevich: a must be > 0");
  if (opts.plasticity) opts.plasticity->validate();
  require_valid(net);

  const std::size_t n_neurons = net.size();
  const double dt = opts.dt_ms;
  const auto steps = static_cast<std::int64_t>(std::ceil(opts.duration_ms / dt - 1e-9));
  const auto outgoing = outgoing_index(net);

  double max_delay = kMinDelayMs;
  for (const auto& s : net.synapses) max_delay = std::max(max_delay, s.delay);
  const auto ring_size = static_cast<std::size_t>(std::ceil(max_delay / dt)) + 3;
  std::vector<std::vector<SynapseId>> ring(ring_size);

  std::vector<double> weights(net.synapses.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = net.synapses[i].weight;
  std::optional<StdpRule> rule;
  if (opts.plasticity) rule.emplace(net, *opts.plasticity, weights);
  const double flush_every = opts.plasticity ? opts.plasticity->update_interval : 0.0;
  double next_flush = flush_every;
  double next_second = 1000.0;

  std::vector<IzhikevichParams> params(n_neurons);
  std::vector<double> v(n_neurons), u(n_neurons), input(n_neurons);
  for (std::size_t n = 0; n < n_neurons; ++n) {
    params[n] = net.neurons[n].excitatory ? opts.excitatory : opts.inhibitory;
    v[n] = params[n].c;
    u[n] = params[n].b * v[n];
  }

  const auto forced = forced_spikes(n_neurons, stim, opts.duration_ms, opts.seed);
  std::size_t next_forced = 0;

  std::vector<Spike> emitted;
  std::vector<Spike> step_spikes;
  std::vector<std::uint8_t> fired(n_neurons, 0);

  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    std::fill(input.begin(), input.end(), stim.bias_current);
    auto& slot = ring[static_cast<std::size_t>(k) % ring_size];
    for (SynapseId s : slot) {
      const double w = rule ? rule->weights()[s] : weights[s];
      input[net.synapses[s].post] += w * (kChargeWindowMs / dt);
      if (rule) rule->on_arrival(s, t);
    }
    slot.clear();

    step_spikes.clear();
    for (NeuronId n = 0; n < n_neurons; ++n) {
      if (v[n] >= kSpikeThresholdMv) {
        fired[n] = 1;
        step_spikes.push_back({n, t});
      }
    }
    const double step_end = t + dt;
    for (; next_forced < forced.size() && forced[next_forced].time < step_end; ++next_forced) {
      const auto& f = forced[next_forced];
      if (fired[f.neuron] == 1) {
        // Natural crossing in the same step merges into the forced spike.
        auto it = std::find(step_spikes.begin(), step_spikes.end(), Spike{f.neuron, t});
        it->time = f.time;
        fired[f.neuron] = 2;
        continue;
      }
      fired[f.neuron] = 2;
      step_spikes.push_back(f);
    }

    for (const auto& s : step_spikes) {
      const NeuronId n = s.neuron;
      if (fired[n] != 0) {
        v[n] = params[n].c;
        u[n] += params[n].d;
        fired[n] = 0;
      }
      for (SynapseId id : outgoing[n]) {
        auto arrival = std::llround((s.time + net.synapses[id].delay) / dt);
        arrival = std::max<long long>(arrival, k + 1);
        ring[static_cast<std::size_t>(arrival) % ring_size].push_back(id);
      }
      if (rule) rule->on_post_spike(n, s.time);
      emitted.push_back(s);
    }

    for (NeuronId n = 0; n < n_neurons; ++n) {
      const double i_n = input[n];
      double vn = v[n];
      const double un = u[n];
      vn += 0.5 * dt * (0.04 * vn * vn + 5.0 * vn + 140.0 - un + i_n);
      vn += 0.5 * dt * (0.04 * vn * vn + 5.0 * vn + 140.0 - un + i_n);
      const double un_next = un + dt * params[n].a * (params[n].b * vn - un);
      if (!std::isfinite(vn) || !std::isfinite(un_next)) {
        std::ostringstream msg;
        msg << "non-finite membrane state for neuron " << n << " at t = " << t << " ms";
        throw NumericalError(msg.str());
      }
      v[n] = std::min(vn, kSpikeThresholdMv);
      u[n] = un_next;
    }

    if (rule && flush_every > 0.0 && step_end >= next_flush) {
      rule->flush();
      next_flush += flush_every;
    }
    if (rule && step_end >= next_second) {
      rule->drift();
      next_second += 1000.0;
    }
  }

  SimulationResult result;
  result.network = net;
  if (rule) {
    rule->flush();
    const auto final_weights = rule->weights();
    for (std::size_t i = 0; i < final_weights.size(); ++i) result.network.synapses[i].weight = final_weights[i];
  }
  result.train = sort_and_index_spikes(std::move(emitted), opts.duration_ms);
  return result;
}

}  // namespace gnat
