// gnatkit: simulate spiking networks and decompose their activity into GNATs.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 missing input
// (an earlier stage has not been run), 3 invalid input data, 4 numerical or
// internal failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gnat/io.hpp"
#include "gnat/pipeline.hpp"
#include "gnat/version.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool verbose = false;
  std::vector<std::string> assignments;

  std::optional<double> plastic_ms, fixed_ms;

  std::optional<double> tau, log_threshold;
  std::optional<std::string> norm;
  bool auto_threshold = false;
  std::optional<std::uint64_t> shuffle_seed;

  std::optional<std::size_t> min_spikes;
  std::optional<bool> self_mode;
  std::optional<std::string> compare_spikes;

  std::optional<std::size_t> top_k;
  std::optional<std::string> method;
  std::optional<std::uint64_t> min_edge_weight;

  std::vector<std::string> plot_kinds;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "Directory holding inputs and outputs");
  cmd->add_option("--seed", o.seed, "Base seed: network=S, stimulus=S+1, run=S+2, shuffle=S+3");
  cmd->add_option("--threads", o.threads, "Worker count")->check(CLI::PositiveNumber);
  cmd->add_flag("--verbose,-v", o.verbose, "Progress messages on stderr");
  cmd->add_option("--set", o.assignments, "Override a key: section.key=value (repeatable)");
}

void add_graph(CLI::App* cmd, Options& o) {
  cmd->add_option("--tau", o.tau, "Omega time constant (ms)");
  cmd->add_option("--norm", o.norm, "Weight norm over incoming synapses")->check(CLI::IsMember({"l1", "l2"}));
  cmd->add_option("--log-threshold", o.log_threshold, "Keep pairs with -log(omega) at or below this");
  cmd->add_flag("--auto-threshold", o.auto_threshold, "Pick the threshold at the histogram knee");
  cmd->add_option("--shuffle-seed", o.shuffle_seed, "Seed of the shuffled control");
}

void add_analogs(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-spikes", o.min_spikes, "Smallest subthread kept, in spike pairs");
  cmd->add_flag("--self,!--no-self", o.self_mode, "Compare the train with itself (default)");
  cmd->add_option("--compare-spikes", o.compare_spikes, "Second spike train when --no-self is given");
}

void add_relations(CLI::App* cmd, Options& o) {
  cmd->add_option("--top-k", o.top_k, "Largest subthreads used for the GNAT multigraph");
  cmd->add_option("--method", o.method, "Class extraction")->check(CLI::IsMember({"components", "modularity"}));
  cmd->add_option("--min-edge-weight", o.min_edge_weight, "Multigraph edges lighter than this are ignored");
}

template <typename T>
void put(gnat::PipelineConfig& cfg, const char* key, const std::optional<T>& value) {
  if (!value) return;
  if constexpr (std::is_same_v<T, std::string>) {
    gnat::set_config_value(cfg, key, *value);
  } else if constexpr (std::is_same_v<T, bool>) {
    gnat::set_config_value(cfg, key, *value ? "true" : "false");
  } else if constexpr (std::is_floating_point_v<T>) {
    gnat::set_config_value(cfg, key, gnat::io::format_double(*value));
  } else {
    gnat::set_config_value(cfg, key, std::to_string(*value));
  }
}

gnat::PipelineConfig resolve(const Options& o) {
  gnat::PipelineConfig cfg;
  if (!o.config_path.empty()) cfg = gnat::load_config(o.config_path);
  for (const auto& a : o.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw gnat::ConfigError("--set expects section.key=value, got '" + a + "'");
    gnat::set_config_value(cfg, a.substr(0, eq), a.substr(eq + 1));
  }
  put(cfg, "io.out_dir", o.out_dir);
  if (o.seed) {
    cfg.network.seed = *o.seed;
    cfg.stimulus.seed = *o.seed + 1;
    cfg.run.seed = *o.seed + 2;
    cfg.graph.shuffle_seed = *o.seed + 3;
  }
  if (o.threads) cfg.workers = *o.threads;
  if (o.verbose) cfg.verbose = true;
  put(cfg, "run.plastic_ms", o.plastic_ms);
  put(cfg, "run.fixed_ms", o.fixed_ms);
  put(cfg, "graph.tau_ms", o.tau);
  put(cfg, "graph.norm", o.norm);
  put(cfg, "graph.log_threshold", o.log_threshold);
  if (o.auto_threshold) cfg.graph.auto_threshold = true;
  put(cfg, "graph.shuffle_seed", o.shuffle_seed);
  put(cfg, "analogs.min_spikes", o.min_spikes);
  put(cfg, "analogs.self", o.self_mode);
  put(cfg, "io.compare_spikes", o.compare_spikes);
  put(cfg, "relations.top_k", o.top_k);
  put(cfg, "relations.method", o.method);
  put(cfg, "relations.min_edge_weight", o.min_edge_weight);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decompose spiking network activity into graphical neural activity threads"};
  app.set_version_flag("--version", std::string(gnat::kVersion));
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Run the plastic and fixed simulation phases");
  add_common(simulate, o);
  simulate->add_option("--plastic-ms", o.plastic_ms, "Length of the plastic phase (ms)");
  simulate->add_option("--fixed-ms", o.fixed_ms, "Length of the fixed-weight phase (ms)");

  auto* build_graph = app.add_subcommand("build-graph", "Build the causal activity graph");
  add_common(build_graph, o);
  add_graph(build_graph, o);

  auto* gnats = app.add_subcommand("gnats", "Split the activity graph into GNATs");
  add_common(gnats, o);

  auto* analogs = app.add_subcommand("analogs", "Find analogous subthreads");
  add_common(analogs, o);
  add_analogs(analogs, o);

  auto* relations = app.add_subcommand("relations", "GNAT multigraph, classes and intervals");
  add_common(relations, o);
  add_relations(relations, o);
  analogs->add_option("--top-k", o.top_k, "Largest subthreads used for the GNAT multigraph");

  auto* analyze = app.add_subcommand("analyze", "Run build-graph, gnats, analogs and relations");
  add_common(analyze, o);
  add_graph(analyze, o);
  add_analogs(analyze, o);
  add_relations(analyze, o);

  auto* plot = app.add_subcommand("plot", "Draw SVG figures");
  add_common(plot, o);
  plot->add_option("--kind", o.plot_kinds,
                   "raster, raster-threads, neg-log-omega, durations, class-timeline or trial-overlay (repeatable)");

  auto* stats = app.add_subcommand("stats", "Summarise the artifacts in the output directory");
  add_common(stats, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto log = [](std::string_view msg) { std::cerr << msg << '\n'; };
  try {
    const auto cfg = resolve(o);
    if (simulate->parsed()) {
      gnat::cmd_simulate(cfg, log);
    } else if (build_graph->parsed()) {
      gnat::cmd_build_graph(cfg, log);
    } else if (gnats->parsed()) {
      gnat::cmd_gnats(cfg, log);
    } else if (analogs->parsed()) {
      gnat::cmd_analogs(cfg, log);
    } else if (relations->parsed()) {
      gnat::cmd_relations(cfg, log);
    } else if (analyze->parsed()) {
      gnat::cmd_analyze(cfg, log);
    } else if (plot->parsed()) {
      std::vector<gnat::PlotKind> kinds;
      for (const auto& k : o.plot_kinds) kinds.push_back(gnat::parse_plot_kind(k));
      gnat::cmd_plot(cfg, kinds, log);
    } else if (stats->parsed()) {
      std::cout << gnat::cmd_stats(cfg);
    }
  } catch (const gnat::ConfigError& e) {
    std::cerr << "gnatkit: configuration error: " << e.what() << '\n';
    return 1;
  } catch (const gnat::MissingInputError& e) {
    std::cerr << "gnatkit: " << e.what() << '\n';
    return 2;
  } catch (const gnat::InputError& e) {
    std::cerr << "gnatkit: invalid input: " << e.what() << '\n';
    return 3;
  } catch (const gnat::NumericalError& e) {
    std::cerr << "gnatkit: numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "gnatkit: internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
