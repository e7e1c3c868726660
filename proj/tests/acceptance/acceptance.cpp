// Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <sys/resource.h>

#include <CLI11.hpp>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>

#include "gnat/config.hpp"
#include "gnat/io.hpp"
#include "gnat/manifest.hpp"
#include "gnat/modular_product.hpp"
#include "gnat/netsim.hpp"
#include "gnat/pipeline.hpp"
#include "gnat/threads.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace gnat;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

long peak_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("criterion %2d: %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

OmegaConfig random_omega(Rng& rng) {
  OmegaConfig cfg;
  const double taus[] = {2.0, 5.0, 10.0};
  cfg.tau = taus[rng.below(3)];
  cfg.log_threshold = rng.uniform(2.0, 8.0);
  cfg.norm = rng.bernoulli(0.5) ? NormKind::L1 : NormKind::L2;
  return cfg;
}

// ---------------------------------------------------------------------------
// 1. Windowed join against all-pairs evaluation.

Outcome omega_oracle() {
  Rng rng(1001);
  double build_s = 0.0;
  std::size_t mismatches = 0, edges = 0, spikes = 0;
  double worst_rel = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto net = testing::random_network(
        rng, {.neurons = 20 + rng.below(181), .connection_p = rng.uniform(0.05, 0.3), .max_delay = rng.uniform(2.0, 20.0)});
    const std::size_t n_spikes = 100 + rng.below(4901);
    auto train = std::make_shared<const SpikeTrain>(
        testing::random_train(rng, net.size(), n_spikes, rng.uniform(500.0, 20000.0), rng.bernoulli(0.3) ? 0.5 : 0.0));
    const auto cfg = random_omega(rng);
    const auto t0 = Clock::now();
    const auto g = build_activity_graph(train, net, cfg);
    build_s += seconds_since(t0);
    const auto expected = testing::brute_force_edges(*train, net, cfg);
    spikes += n_spikes;
    edges += expected.size();
    if (expected.size() != g.edges().size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto& a = g.edges()[i];
      const auto& b = expected[i];
      if (a.pre != b.pre || a.post != b.post) {
        ++mismatches;
        break;
      }
      worst_rel = std::max(worst_rel, std::abs(a.omega - b.omega) / b.omega);
    }
  }
  const bool ok = mismatches == 0 && worst_rel <= 1e-12 && build_s <= 10.0;
  return {ok, fmt("%zu spikes, %zu edges; edge-set mismatches %zu; max rel |dOmega| %.3g (<= 1e-12); build time %.2f s (<= 10 s)",
                  spikes, edges, mismatches, worst_rel, build_s)};
}

// ---------------------------------------------------------------------------
// 2. DAG and causality on randomized graphs.

Outcome dag_causality() {
  Rng rng(1002);
  std::size_t violations = 0, edges = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto net = testing::random_network(rng, {.neurons = 5 + rng.below(40), .connection_p = rng.uniform(0.1, 0.5)});
    auto train = std::make_shared<const SpikeTrain>(
        testing::random_train(rng, net.size(), 10 + rng.below(600), rng.uniform(50.0, 2000.0), rng.bernoulli(0.5) ? 0.5 : 0.0));
    const auto g = build_activity_graph(train, net, random_omega(rng), 1 + static_cast<unsigned>(rng.below(3)));
    if (!is_acyclic(g)) ++violations;
    std::map<std::pair<NeuronId, NeuronId>, double> delay;
    for (const auto& s : net.synapses) delay[{s.pre, s.post}] = s.delay;
    for (const auto& e : g.edges()) {
      ++edges;
      const auto& pre = (*train)[e.pre];
      const auto& post = (*train)[e.post];
      const auto it = delay.find({pre.neuron, post.neuron});
      if (it == delay.end() || post.time - pre.time < it->second - 1e-9) ++violations;
    }
  }
  return {violations == 0, fmt("1000 graphs, %zu edges; violations %zu", edges, violations)};
}

// ---------------------------------------------------------------------------
// 3. Component oracles.

Outcome component_oracles() {
  Rng rng(1003);
  std::size_t gnat_bad = 0, so_bad = 0, gnats = 0, subthreads = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto net = testing::random_network(rng, {.neurons = 10 + rng.below(100), .connection_p = rng.uniform(0.05, 0.4)});
    auto train = std::make_shared<const SpikeTrain>(testing::random_train(rng, net.size(), 50 + rng.below(3000), 2000.0));
    const auto g = build_activity_graph(train, net, random_omega(rng));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> plain;
    for (const auto& e : g.edges()) plain.emplace_back(e.pre, e.post);
    const auto expected = testing::bfs_components(train->size(), plain);
    const auto d = extract_gnats(g);
    std::vector<std::vector<std::uint32_t>> got;
    for (const auto& gn : d.gnats) got.push_back(gn.spikes);
    std::sort(got.begin(), got.end());
    gnats += got.size();
    if (got != expected) ++gnat_bad;
  }

  int done = 0;
  while (done < 100) {
    const bool self_mode = done % 2 == 0;
    const auto net = testing::random_network(rng, {.neurons = 6, .excitatory_fraction = 0.85, .connection_p = 0.5, .max_delay = 4.0});
    OmegaConfig cfg;
    cfg.log_threshold = 4.0;
    const std::size_t n = 30 + rng.below(90);
    auto ta = std::make_shared<const SpikeTrain>(testing::random_train(rng, net.size(), n, 120.0));
    auto tb = self_mode ? ta : std::make_shared<const SpikeTrain>(testing::random_train(rng, net.size(), n, 120.0));
    const auto a = build_activity_graph(ta, net, cfg);
    const auto b = self_mode ? a : build_activity_graph(tb, net, cfg);
    if (a.edges().size() > 200 || b.edges().size() > 200) continue;
    std::optional<LagWindow> window;
    if (rng.bernoulli(0.5)) window = LagWindow{self_mode ? 0.0 : -40.0, rng.uniform(10.0, 60.0)};
    const auto oracle_edges = testing::nested_loop_second_order(a, b, self_mode, window);

    // Oracle components: BFS over the nested-loop edge list.
    std::map<testing::PairKey, std::uint32_t> index;
    for (const auto& [u, v, crossed] : oracle_edges) {
      index.emplace(u, 0);
      index.emplace(v, 0);
    }
    std::vector<testing::PairKey> keys;
    for (auto& [k, i] : index) {
      i = static_cast<std::uint32_t>(keys.size());
      keys.push_back(k);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> plain;
    for (const auto& [u, v, crossed] : oracle_edges) plain.emplace_back(index[u], index[v]);
    std::set<std::set<testing::PairKey>> expected;
    for (const auto& comp : testing::bfs_components(keys.size(), plain)) {
      std::set<testing::PairKey> s;
      for (auto i : comp) s.insert(keys[i]);
      expected.insert(s);
    }

    const auto so = build_second_order_graph(a, b, {.self_mode = self_mode, .lag_window = window, .quadtree_min_edges = 4});
    std::set<std::set<testing::PairKey>> got;
    for (const auto& sub : extract_analogous_subthreads(so, a, b, 1)) {
      std::set<testing::PairKey> s;
      for (const auto& v : sub.vertices) {
        s.emplace(self_mode ? std::min(v.spike_a, v.spike_b) : v.spike_a, self_mode ? std::max(v.spike_a, v.spike_b) : v.spike_b);
      }
      got.insert(s);
    }
    subthreads += got.size();
    if (got != expected || testing::keys_of(so) != oracle_edges) ++so_bad;
    ++done;
  }
  return {gnat_bad == 0 && so_bad == 0,
          fmt("GNAT partitions: %zu/100 differ (%zu GNATs); second-order components: %zu/100 differ (%zu subthreads)", gnat_bad,
              gnats, so_bad, subthreads)};
}

// ---------------------------------------------------------------------------
// 4. Modular product cliques and induced isomorphisms.

SmallDigraph random_digraph(Rng& rng, std::size_t n) {
  SmallDigraph g(n);
  const double p = rng.uniform(0.1, 0.7);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Outcome modular_product() {
  Rng rng(1004);
  std::size_t bad_cliques = 0, bad_pairs = 0, cliques = 0, pairs = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto g = random_digraph(rng, 1 + rng.below(6));
    const auto h = random_digraph(rng, 1 + rng.below(6));
    const ModularProduct mp(g, h);
    // Every clique found is an induced isomorphism.
    for (const auto& m : cliques_as_isomorphisms(g, h)) {
      ++cliques;
      if (!is_clique(mp, m.clique) || !induced_isomorphic(g, m.g_vertices, h, m.h_vertices)) ++bad_cliques;
    }
    // Every induced isomorphism is a clique.
    for (std::size_t k = 1; k <= std::min(g.size(), h.size()); ++k) {
      for (const auto& gs : subsets(g.size(), k)) {
        for (const auto& hs : subsets(h.size(), k)) {
          auto perm = hs;
          do {
            if (!mapping_preserves_edges(g, gs, h, perm)) continue;
            ++pairs;
            std::vector<std::uint32_t> clique;
            for (std::size_t i = 0; i < k; ++i) clique.push_back(mp.vertex(gs[i], perm[i]));
            if (!is_clique(mp, clique)) ++bad_pairs;
          } while (std::next_permutation(perm.begin(), perm.end()));
        }
      }
    }
  }
  return {bad_cliques == 0 && bad_pairs == 0,
          fmt("%zu maximal cliques, %zu not isomorphic; %zu isomorphic induced pairs, %zu not cliques", cliques, bad_cliques,
              pairs, bad_pairs)};
}

// ---------------------------------------------------------------------------
// 5, 6, 7, 9. Desk-scale simulation.

struct DeskRun {
  Network net;
  std::shared_ptr<const SpikeTrain> train;
  double sim_s = 0.0;
};

Outcome desk_peak(const DeskRun& run, const PipelineConfig& cfg) {
  OmegaConfig omega = cfg.graph.omega;
  omega.tau = 5.0;
  omega.log_threshold = 5.0;
  const auto frac = [&](const SpikeTrain& t) {
    const auto s = neg_log_omega_samples(t, run.net, omega, cfg.workers);
    const auto below = std::count_if(s.begin(), s.end(), [](double x) { return x <= 5.0; });
    return std::pair(s.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(s.size()), s.size());
  };
  const auto [obs, n_obs] = frac(*run.train);
  const auto [shuf, n_shuf] = frac(shuffle_train(*run.train, cfg.graph.shuffle_seed, cfg.graph.shuffle_method));
  const double ratio = shuf > 0.0 ? obs / shuf : (obs > 0.0 ? INFINITY : 0.0);
  return {ratio >= 3.0 && run.sim_s <= 300.0,
          fmt("%zu spikes; pairs with -log(Omega) <= 5: observed %.4f of %zu, shuffled %.4f of %zu, ratio %.2f (>= 3); "
              "simulation %.1f s (<= 300 s)",
              run.train->size(), obs, n_obs, shuf, n_shuf, ratio, run.sim_s)};
}

ThresholdSelection auto_threshold(const DeskRun& run, const PipelineConfig& cfg, double tau) {
  OmegaConfig omega = cfg.graph.omega;
  omega.tau = tau;
  return select_threshold(neg_log_omega_histogram(*run.train, run.net, omega, cfg.graph.histogram_bin, cfg.workers));
}

Outcome desk_threshold(const DeskRun& run, const PipelineConfig& cfg) {
  const auto sel = auto_threshold(run, cfg, 5.0);
  const bool ok = !sel.fallback && std::abs(sel.log_threshold - 5.0) <= 1.0;
  return {ok, fmt("selected %.2f (want 5.0 +/- 1.0)%s", sel.log_threshold, sel.fallback ? ", fallback" : ", at a knee")};
}

Outcome desk_overlap(const DeskRun& run, const PipelineConfig& cfg) {
  OmegaConfig omega = cfg.graph.omega;
  omega.tau = 5.0;
  omega.log_threshold = 5.0;
  const auto g = build_activity_graph(run.train, run.net, omega, cfg.workers);
  const auto d = extract_gnats(g);
  const auto ov = bin_overlap_stats(d, *run.train, 20.0);
  return {ov.multi_fraction() >= 0.05, fmt("%zu GNATs; %zu of %zu nonempty 20 ms bins hold >= 2 GNATs: %.4f (>= 0.05)",
                                           d.gnats.size(), ov.multi_bins, ov.nonempty_bins, ov.multi_fraction())};
}

Outcome desk_tau(const DeskRun& run, const PipelineConfig& cfg) {
  std::set<std::pair<SpikeId, SpikeId>> sets[2];
  double thresholds[2];
  bool fallback[2];
  const double taus[2] = {5.0, 10.0};
  for (int i = 0; i < 2; ++i) {
    const auto sel = auto_threshold(run, cfg, taus[i]);
    OmegaConfig omega = cfg.graph.omega;
    omega.tau = taus[i];
    omega.log_threshold = sel.log_threshold;
    thresholds[i] = sel.log_threshold;
    fallback[i] = sel.fallback;
    for (const auto& e : build_activity_graph(run.train, run.net, omega, cfg.workers).edges()) sets[i].emplace(e.pre, e.post);
  }
  std::size_t both = 0;
  for (const auto& e : sets[0]) both += sets[1].count(e);
  const std::size_t either = sets[0].size() + sets[1].size() - both;
  const double j = either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
  return {j >= 0.5, fmt("tau 5: threshold %.2f%s, %zu edges; tau 10: threshold %.2f%s, %zu edges; Jaccard %.4f (>= 0.5)",
                        thresholds[0], fallback[0] ? " (fallback)" : "", sets[0].size(), thresholds[1],
                        fallback[1] ? " (fallback)" : "", sets[1].size(), j)};
}

// ---------------------------------------------------------------------------
// 8. Motif injection.

Outcome motif_recovery(unsigned workers) {
  const auto fx = testing::make_motif_fixture({});
  auto train = std::make_shared<const SpikeTrain>(fx.train);
  const auto g = build_activity_graph(train, fx.net, {}, workers);
  const auto so = build_second_order_graph(g, g, {.workers = workers});
  const auto subs = extract_analogous_subthreads(so, g, g, 15);
  std::size_t recovered = 0, pairs = 0;
  double worst = 1.0;
  for (std::size_t k = 0; k < fx.instances.size(); ++k) {
    for (std::size_t l = k + 1; l < fx.instances.size(); ++l) {
      ++pairs;
      const double c = testing::best_pair_coverage(subs, fx.instances[k], fx.instances[l]);
      worst = std::min(worst, c);
      recovered += c >= 0.8;
    }
  }
  const double frac = static_cast<double>(recovered) / static_cast<double>(pairs);
  return {frac >= 0.9, fmt("%zu spikes, %zu subthreads >= 15; %zu of %zu instance pairs covered >= 80%% (%.3f, need >= 0.9); "
                           "lowest coverage %.2f",
                           train->size(), subs.size(), recovered, pairs, frac, worst)};
}

// ---------------------------------------------------------------------------
// 10. Performance on a million spikes.

Outcome performance(unsigned workers) {
  NetworkParams p;
  p.n_excitatory = 4000;
  p.n_inhibitory = 1000;
  p.width = p.height = 100.0;
  const auto net = build_network(p);
  Rng rng(1010);
  std::vector<Spike> events;
  const double duration = 100000.0;
  for (NeuronId n = 0; n < net.size(); ++n) {
    for (double t = rng.exponential(0.002); t < duration; t += rng.exponential(0.002)) events.push_back({n, t});
  }
  auto train = std::make_shared<const SpikeTrain>(sort_and_index_spikes(std::move(events), duration));
  const long rss_before = peak_rss_kb();
  auto t0 = Clock::now();
  const auto g = build_activity_graph(train, net, {}, 1);
  const double build_s = seconds_since(t0);
  const long rss_graph = peak_rss_kb();
  t0 = Clock::now();
  const auto so = build_second_order_graph(g, g, {.workers = workers});
  const double so_s = seconds_since(t0);
  const double payload_mb =
      static_cast<double>(train->size() * sizeof(Spike) + g.edges().size() * (sizeof(ActivityEdge) + 4 * sizeof(EdgeId))) / 1e6;
  return {build_s <= 60.0 && so_s <= 600.0,
          fmt("%zu spikes, %zu edges built in %.1f s single worker (<= 60 s); second-order self comparison %zu edges in %.1f s "
              "with %u workers (<= 600 s); peak RSS %.0f MB before graph, %.0f MB after (spike+edge payload %.0f MB)",
              train->size(), g.edges().size(), build_s, so.edges.size(), so_s, workers, rss_before / 1024.0,
              rss_graph / 1024.0, payload_mb)};
}

// ---------------------------------------------------------------------------
// 11. Determinism of analyze.

std::map<std::string, std::string> hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == files::kManifest) continue;
    out[fs::relative(e.path(), dir).string()] = sha256_file(e.path());
  }
  return out;
}

Outcome determinism(const fs::path& work, unsigned workers) {
  PipelineConfig cfg;
  cfg.network.n_excitatory = 160;
  cfg.network.n_inhibitory = 40;
  cfg.network.width = cfg.network.height = 20.0;
  cfg.run.plastic_ms = 5000;
  cfg.run.fixed_ms = 5000;
  cfg.stimulus.pattern_period_ms = 2000;
  cfg.stimulus.pattern_window_ms = 1000;
  cfg.analogs.min_spikes = 3;
  cfg.relations.classes.min_edge_weight = 3;
  cfg.relations.trial_length_ms = 2000;
  cfg.workers = workers;
  std::map<std::string, std::string> runs[2];
  for (int i = 0; i < 2; ++i) {
    cfg.io.out_dir = work / ("determinism_" + std::to_string(i));
    fs::remove_all(cfg.io.out_dir);
    cmd_simulate(cfg);
    cmd_analyze(cfg);
    runs[i] = hashes(cfg.io.out_dir);
  }
  std::size_t differ = 0, svgs = 0;
  for (const auto& [name, h] : runs[0]) {
    differ += !runs[1].count(name) || runs[1].at(name) != h;
    svgs += fs::path(name).extension() == ".svg";
  }
  differ += runs[0].size() != runs[1].size();
  return {differ == 0 && svgs > 0, fmt("%zu output files (%zu SVG) hashed with SHA-256; %zu differ", runs[0].size(), svgs, differ)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnat acceptance run"};
  std::string config_path = std::string(GNAT_SOURCE_DIR) + "/configs/desk.ini";
  std::string work = (fs::temp_directory_path() / "gnat_acceptance").string();
  std::vector<int> only;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--config", config_path, "Desk-scale profile");
  app.add_option("--work-dir", work, "Scratch directory");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--workers", workers, "Workers for the multi-threaded stages");
  CLI11_PARSE(app, argc, argv);

  const auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  const auto guarded = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    if (!want(id)) return;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    o.detail += fmt(" [%.1f s]", seconds_since(t0));
    report(id, name, o);
  };

  fs::create_directories(work);
  guarded(1, "activity graph equals all-pairs evaluation", omega_oracle);
  guarded(2, "activity graphs are causal DAGs", dag_causality);
  guarded(3, "component oracles", component_oracles);
  guarded(4, "modular product cliques are induced isomorphisms", modular_product);

  if (want(5) || want(6) || want(7) || want(9)) {
    DeskRun run;
    PipelineConfig cfg;
    try {
      cfg = load_config(config_path);
      cfg.io.out_dir = fs::path(work) / "desk";
      cfg.workers = workers;
      cfg.validate();
      const auto t0 = Clock::now();
      cmd_simulate(cfg);
      run.sim_s = seconds_since(t0);
      run.net = io::network_from_json(io::read_file(cfg.io.out_dir / files::kNetwork));
      run.train = std::make_shared<const SpikeTrain>(io::spikes_from_csv(io::read_file(cfg.io.out_dir / files::kSpikes)));
      std::printf("desk-scale run: %zu neurons, %zu synapses, %zu fixed-phase spikes over %.0f ms (%s)\n", run.net.size(),
                  run.net.synapses.size(), run.train->size(), run.train->duration(), config_path.c_str());
    } catch (const std::exception& e) {
      std::printf("desk-scale simulation failed: %s\n", e.what());
    }
    const auto desk = [&](std::function<Outcome(const DeskRun&, const PipelineConfig&)> f) {
      return [&, f] {
        if (!run.train) return Outcome{false, "no desk-scale simulation"};
        return f(run, cfg);
      };
    };
    guarded(5, "observed -log(Omega) peak exceeds shuffled control", desk(desk_peak));
    guarded(6, "auto threshold near 5 for tau = 5 ms", desk(desk_threshold));
    guarded(7, "parallel GNATs in 20 ms bins", desk(desk_overlap));
    guarded(9, "edge sets agree across tau", desk(desk_tau));
  }

  guarded(8, "injected motif recovered", [&] { return motif_recovery(workers); });
  guarded(10, "million-spike performance", [&] { return performance(workers); });
  guarded(11, "analyze is byte-for-byte deterministic", [&] { return determinism(work, workers); });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
