#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>

#include "gnat/analogs.hpp"
#include "gnat/netsim.hpp"
#include "gnat/random.hpp"
#include "gnat/threads.hpp"

namespace {

using namespace gnat;

// Full-density network and independent Poisson spiking at `rate_hz`.
struct Fixture {
  Network net;
  std::shared_ptr<const SpikeTrain> train;
};

const Fixture& fixture(std::size_t neurons, double duration_ms) {
  static std::map<std::pair<std::size_t, double>, Fixture> cache;
  auto& fx = cache[{neurons, duration_ms}];
  if (fx.train) return fx;
  NetworkParams p;
  p.n_excitatory = neurons * 4 / 5;
  p.n_inhibitory = neurons - p.n_excitatory;
  p.width = p.height = 100.0 * std::sqrt(static_cast<double>(neurons) / 5000.0);
  fx.net = build_network(p);
  Rng rng(7);
  std::vector<Spike> events;
  for (NeuronId n = 0; n < fx.net.size(); ++n) {
    for (double t = rng.exponential(0.002); t < duration_ms; t += rng.exponential(0.002)) events.push_back({n, t});
  }
  fx.train = std::make_shared<const SpikeTrain>(sort_and_index_spikes(std::move(events), duration_ms));
  return fx;
}

void BM_BuildActivityGraph(benchmark::State& state) {
  const auto& fx = fixture(5000, static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto g = build_activity_graph(fx.train, fx.net, {}, static_cast<unsigned>(state.range(1)));
    benchmark::DoNotOptimize(g.edges().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * fx.train->size()));
}
BENCHMARK(BM_BuildActivityGraph)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4})->Unit(benchmark::kMillisecond);

void BM_ExtractGnats(benchmark::State& state) {
  const auto& fx = fixture(5000, static_cast<double>(state.range(0)));
  const auto g = build_activity_graph(fx.train, fx.net, {});
  for (auto _ : state) {
    auto d = extract_gnats(g);
    benchmark::DoNotOptimize(d.gnats.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.edges().size()));
}
BENCHMARK(BM_ExtractGnats)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SecondOrderSelf(benchmark::State& state) {
  const auto& fx = fixture(5000, static_cast<double>(state.range(0)));
  const auto g = build_activity_graph(fx.train, fx.net, {});
  SecondOrderOptions opts;
  if (state.range(1) > 0) opts.lag_window = LagWindow{0.0, static_cast<double>(state.range(1))};
  for (auto _ : state) {
    auto so = build_second_order_graph(g, g, opts);
    benchmark::DoNotOptimize(so.edges.data());
  }
}
BENCHMARK(BM_SecondOrderSelf)->Args({100000, 0})->Args({100000, 2000})->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  NetworkParams p;
  const auto net = build_network(p);
  StimulusConfig stim = make_pattern(20, net.size(), 2.0, 5000.0, 10000.0, 2);
  SimulationOptions opts;
  opts.duration_ms = 1000.0;
  if (state.range(0)) opts.plasticity = StdpConfig{};
  for (auto _ : state) {
    auto r = simulate(net, stim, opts);
    benchmark::DoNotOptimize(r.train.size());
  }
  state.SetLabel(state.range(0) ? "1 s, plastic" : "1 s, fixed");
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
