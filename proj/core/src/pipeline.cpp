#include "gnat/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "gnat/io.hpp"
#include "gnat/manifest.hpp"
#include "gnat/random.hpp"

namespace gnat {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Context {
 public:
  Context(const PipelineConfig& cfg, const LogSink& log, std::string command) : cfg_(cfg), log_(log) {
    cfg_.validate();
    manifest_.command = std::move(command);
    manifest_.config = resolved_config(cfg_);
    fs::create_directories(cfg_.io.out_dir);
  }

  const PipelineConfig& cfg() const { return cfg_; }
  fs::path out(const char* name) const { return cfg_.io.out_dir / name; }

  void log(const std::string& msg) const {
    if (log_ && cfg_.verbose) log_(msg);
  }

  /// Reads an input file, naming the stage that produces it when absent.
  std::string read(const fs::path& path, std::string_view producer) {
    if (!fs::exists(path)) {
      throw MissingInputError(path.string() + " not found; run `gnatkit " + std::string(producer) + "` first");
    }
    if (std::find_if(manifest_.inputs.begin(), manifest_.inputs.end(),
                     [&](const FileDigest& d) { return d.path == path.string(); }) == manifest_.inputs.end() &&
        !produced(path)) {
      manifest_.add_input(path);
    }
    return io::read_file(path);
  }

  void write(const fs::path& path, std::string_view content) {
    io::write_file_atomic(path, content);
    written_.push_back(path.string());
  }

  template <typename F>
  auto timed(const std::string& stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish(stage, start);
    } else {
      auto result = body();
      finish(stage, start);
      return result;
    }
  }

  void close() {
    for (const auto& p : written_) manifest_.add_output(p);
    manifest_.write(cfg_.io.out_dir);
  }

 private:
  bool produced(const fs::path& path) const {
    return std::find(written_.begin(), written_.end(), path.string()) != written_.end();
  }

  void finish(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest_.timings.push_back({stage, s});
    log(stage + ": " + io::format_double(std::round(s * 1000.0) / 1000.0) + " s");
  }

  PipelineConfig cfg_;
  const LogSink& log_;
  RunManifest manifest_;
  std::vector<std::string> written_;
};

struct Inputs {
  std::shared_ptr<const SpikeTrain> train;
  Network network;
};

Inputs load_inputs(Context& ctx) {
  const auto& cfg = ctx.cfg();
  Inputs in;
  const auto spikes = cfg.input_path(cfg.io.spikes);
  const auto net = cfg.input_path(cfg.io.network);
  in.train = std::make_shared<const SpikeTrain>(io::spikes_from_csv(ctx.read(spikes, "simulate"), spikes.string()));
  in.network = io::network_from_json(ctx.read(net, "simulate"), net.string());
  require_valid(in.network);
  return in;
}

ActivityGraph load_graph(Context& ctx, const Inputs& in) {
  const auto path = ctx.out(files::kEdges);
  return io::activity_graph_from_csv(ctx.read(path, "build-graph"), in.train, in.network, path.string());
}

GnatDecomposition load_decomposition(Context& ctx, const ActivityGraph& graph) {
  const auto path = ctx.out(files::kMembership);
  const auto membership = io::membership_from_csv(ctx.read(path, "gnats"), graph.spike_count(), path.string());
  return decomposition_from_membership(graph, membership);
}

double recorded_threshold(Context& ctx) {
  const auto path = ctx.out(files::kGraphSummary);
  const auto j = json::parse(ctx.read(path, "build-graph"), nullptr, false);
  if (j.is_discarded() || !j.contains("log_threshold")) throw InputError(path.string() + ": malformed graph summary");
  return j.at("log_threshold").get<double>();
}

std::size_t count_at_most(std::span<const double> values, double limit) {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v <= limit; }));
}

void stage_build_graph(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto in = load_inputs(ctx);
  OmegaConfig omega = cfg.graph.omega;

  const auto samples = ctx.timed("histogram", [&] {
    return neg_log_omega_samples(*in.train, in.network, omega, cfg.workers);
  });
  const auto shuffled_train = shuffle_train(*in.train, cfg.graph.shuffle_seed, cfg.graph.shuffle_method);
  const auto shuffled = ctx.timed("shuffled-histogram", [&] {
    return neg_log_omega_samples(shuffled_train, in.network, omega, cfg.workers);
  });
  const auto hist = Histogram::from_values(samples, cfg.graph.histogram_bin);
  const auto hist_shuffled = Histogram::from_values(shuffled, cfg.graph.histogram_bin);

  ThresholdSelection selection{omega.log_threshold, false, ""};
  if (cfg.graph.auto_threshold) {
    selection = select_threshold(hist, omega.log_threshold);
    if (selection.fallback) ctx.log("warning: " + selection.warning);
    omega.log_threshold = selection.log_threshold;
  }
  const auto graph = ctx.timed("activity-graph", [&] {
    return build_activity_graph(in.train, in.network, omega, cfg.workers);
  });
  ctx.log("build-graph: " + std::to_string(graph.edges().size()) + " edges over " +
          std::to_string(graph.vertex_count()) + " vertices, -log(omega) <= " + io::format_double(omega.log_threshold));

  ctx.write(ctx.out(files::kEdges), io::edges_to_csv(graph.edges()));
  ctx.write(ctx.out(files::kHistogram), io::histogram_to_csv(hist));
  ctx.write(ctx.out(files::kShuffledHistogram), io::histogram_to_csv(hist_shuffled));

  ordered_json j;
  j["spikes"] = in.train->size();
  j["vertices"] = graph.vertex_count();
  j["edges"] = graph.edges().size();
  j["tau_ms"] = omega.tau;
  j["norm"] = std::string(to_string(omega.norm));
  j["log_threshold"] = omega.log_threshold;
  j["window_multiplier"] = omega.multiplier();
  j["auto_threshold"] = cfg.graph.auto_threshold;
  j["threshold_fallback"] = selection.fallback;
  j["threshold_warning"] = selection.warning;
  j["scored_pairs"] = samples.size();
  j["scored_pairs_within_threshold"] = count_at_most(samples, omega.log_threshold);
  j["shuffled_pairs"] = shuffled.size();
  j["shuffled_pairs_within_threshold"] = count_at_most(shuffled, omega.log_threshold);
  j["shuffle_seed"] = cfg.graph.shuffle_seed;
  j["acyclic"] = is_acyclic(graph);
  ctx.write(ctx.out(files::kGraphSummary), j.dump(1) + "\n");
}

void stage_gnats(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto in = load_inputs(ctx);
  const auto graph = load_graph(ctx, in);
  const auto decomp = ctx.timed("gnats", [&] { return extract_gnats(graph); });
  ctx.log("gnats: " + std::to_string(decomp.gnats.size()) + " GNATs, " + std::to_string(decomp.isolated.size()) +
          " isolated spikes");
  const auto durations = duration_stats(decomp, cfg.threads.duration_bin_ms);
  const auto overlap = bin_overlap_stats(decomp, *in.train, cfg.threads.overlap_bin_ms);
  io::GraphSummary summary{in.train->size(), graph.vertex_count(), graph.edges().size(), recorded_threshold(ctx)};
  ctx.write(ctx.out(files::kMembership), io::membership_to_csv(decomp));
  ctx.write(ctx.out(files::kDurations), io::histogram_to_csv(durations.histogram));
  ctx.write(ctx.out(files::kStats), io::stats_to_json(summary, decomp, durations, overlap));
}

void stage_analogs(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto in = load_inputs(ctx);
  const auto graph = load_graph(ctx, in);
  const auto decomp = load_decomposition(ctx, graph);

  std::optional<ActivityGraph> other;
  std::optional<GnatDecomposition> other_decomp;
  if (!cfg.analogs.self_mode) {
    if (cfg.io.compare_spikes.empty()) {
      throw ConfigError("io.compare_spikes: required when analogs.self is false");
    }
    const auto path = cfg.input_path(cfg.io.compare_spikes);
    auto train = std::make_shared<const SpikeTrain>(io::spikes_from_csv(ctx.read(path, "simulate"), path.string()));
    OmegaConfig omega = cfg.graph.omega;
    omega.log_threshold = recorded_threshold(ctx);
    other.emplace(build_activity_graph(train, in.network, omega, cfg.workers));
    other_decomp.emplace(extract_gnats(*other));
  }
  const ActivityGraph& b = other ? *other : graph;

  SecondOrderOptions opts;
  opts.self_mode = cfg.analogs.self_mode;
  opts.lag_window = cfg.lag_window();
  opts.quadtree_min_edges = cfg.analogs.quadtree_min_edges;
  opts.workers = cfg.workers;
  const auto second = ctx.timed("second-order-graph", [&] { return build_second_order_graph(graph, b, opts); });
  const auto subs = ctx.timed("subthreads", [&] {
    return extract_analogous_subthreads(second, graph, b, cfg.analogs.min_spikes);
  });
  ctx.log("analogs: " + std::to_string(second.edges.size()) + " second-order edges, " + std::to_string(subs.size()) +
          " subthreads with >= " + std::to_string(cfg.analogs.min_spikes) + " spike pairs");

  ctx.write(ctx.out(files::kSubthreads), io::subthreads_to_jsonl(subs, decomp, other_decomp ? *other_decomp : decomp));
  ordered_json j;
  j["self_mode"] = second.self_mode;
  j["min_spikes"] = cfg.analogs.min_spikes;
  j["vertices"] = second.vertices.size();
  j["singleton_vertices"] = second.singleton_vertices;
  j["total_vertices"] = second.total_vertices();
  j["edges"] = second.edges.size();
  j["subthreads"] = subs.size();
  j["largest"] = subs.empty() ? 0 : subs.front().size();
  j["overlapping"] = std::count_if(subs.begin(), subs.end(), [](const auto& s) { return s.overlapping; });
  j["self_mirror"] = std::count_if(subs.begin(), subs.end(), [](const auto& s) { return s.self_mirror; });
  j["exactly_isomorphic_fraction"] = isomorphic_fraction(subs, graph, b);
  ctx.write(ctx.out(files::kAnalogSummary), j.dump(1) + "\n");
}

void stage_relations(Context& ctx) {
  const auto& cfg = ctx.cfg();
  if (!cfg.analogs.self_mode) throw ConfigError("analogs.self: relations need subthreads found in self mode");
  const auto in = load_inputs(ctx);
  const auto graph = load_graph(ctx, in);
  const auto decomp = load_decomposition(ctx, graph);
  const auto path = ctx.out(files::kSubthreads);
  const auto subs = io::subthreads_from_jsonl(ctx.read(path, "analogs"), true, path.string());

  const auto mg = build_multigraph(decomp, subs, cfg.relations.top_k);
  const auto classes = extract_classes(mg, cfg.relations.classes);
  const auto intervals = class_intervals(classes, decomp);
  const auto trials = cfg.trial_starts();
  const auto overlay = trial_overlay(intervals, trials, cfg.relations.trial_length_ms);
  ctx.log("relations: " + std::to_string(mg.edges.size()) + " multigraph edges, " + std::to_string(classes.size()) +
          " classes");
  ctx.write(ctx.out(files::kMultigraph), io::multigraph_to_csv(mg));
  ctx.write(ctx.out(files::kClasses), io::classes_to_json(classes));
  ctx.write(ctx.out(files::kIntervals), io::intervals_to_csv(intervals));
  ctx.write(ctx.out(files::kOverlay), io::overlay_to_csv(overlay));
}

bool inputs_present(const Context& ctx, PlotKind kind) {
  const auto& cfg = ctx.cfg();
  const bool spikes = fs::exists(cfg.input_path(cfg.io.spikes)) && fs::exists(cfg.input_path(cfg.io.network));
  switch (kind) {
    case PlotKind::Raster: return fs::exists(cfg.input_path(cfg.io.spikes));
    case PlotKind::RasterThreads: return spikes && fs::exists(ctx.out(files::kEdges)) && fs::exists(ctx.out(files::kMembership));
    case PlotKind::NegLogOmega: return fs::exists(ctx.out(files::kHistogram));
    case PlotKind::Durations: return fs::exists(ctx.out(files::kDurations));
    case PlotKind::ClassTimeline: return fs::exists(cfg.input_path(cfg.io.spikes)) && fs::exists(ctx.out(files::kIntervals));
    case PlotKind::TrialOverlay: return fs::exists(ctx.out(files::kOverlay));
  }
  return false;
}

void stage_plot(Context& ctx, std::vector<PlotKind> kinds) {
  const auto& cfg = ctx.cfg();
  if (kinds.empty()) {
    for (auto k : kAllPlotKinds) {
      if (inputs_present(ctx, k)) kinds.push_back(k);
    }
  }
  const double t0 = cfg.plot.raster_start_ms;
  const double t1 = t0 + cfg.plot.raster_length_ms;
  for (auto kind : kinds) {
    PlotFrame frame{cfg.plot.width_px, cfg.plot.height_px, std::string(to_string(kind))};
    std::string svg;
    switch (kind) {
      case PlotKind::Raster: {
        const auto spikes = cfg.input_path(cfg.io.spikes);
        const auto train = io::spikes_from_csv(ctx.read(spikes, "simulate"), spikes.string());
        svg = plot_raster(train, t0, t1, frame);
        break;
      }
      case PlotKind::RasterThreads: {
        const auto in = load_inputs(ctx);
        const auto graph = load_graph(ctx, in);
        svg = plot_raster_threads(graph, load_decomposition(ctx, graph), t0, t1, frame);
        break;
      }
      case PlotKind::NegLogOmega: {
        const auto observed = io::histogram_from_csv(ctx.read(ctx.out(files::kHistogram), "build-graph"),
                                                     cfg.graph.histogram_bin, files::kHistogram);
        const auto shuffled = io::histogram_from_csv(ctx.read(ctx.out(files::kShuffledHistogram), "build-graph"),
                                                     cfg.graph.histogram_bin, files::kShuffledHistogram);
        const HistogramSeries series[] = {{&observed, "recorded", "#1f77b4"}, {&shuffled, "shuffled", "#ff7f0e"}};
        svg = plot_histograms(series, recorded_threshold(ctx), "-log(omega)", frame);
        break;
      }
      case PlotKind::Durations: {
        const auto h = io::histogram_from_csv(ctx.read(ctx.out(files::kDurations), "gnats"),
                                              cfg.threads.duration_bin_ms, files::kDurations);
        const HistogramSeries series[] = {{&h, "GNATs", "#2ca02c"}};
        svg = plot_histograms(series, std::nullopt, "duration (ms)", frame);
        break;
      }
      case PlotKind::ClassTimeline: {
        const auto spikes = cfg.input_path(cfg.io.spikes);
        const auto train = io::spikes_from_csv(ctx.read(spikes, "simulate"), spikes.string());
        const auto intervals = io::intervals_from_csv(ctx.read(ctx.out(files::kIntervals), "relations"), files::kIntervals);
        svg = plot_class_timeline(intervals, train.duration(), frame);
        break;
      }
      case PlotKind::TrialOverlay: {
        const auto overlay = io::overlay_from_csv(ctx.read(ctx.out(files::kOverlay), "relations"), files::kOverlay);
        std::size_t trials = cfg.trial_starts().size();
        for (const auto& t : overlay) trials = std::max(trials, t.trial_index + 1);
        svg = plot_trial_overlay(overlay, trials, cfg.relations.trial_length_ms, frame);
        break;
      }
    }
    const auto dir = cfg.io.out_dir / files::kPlotDir;
    ctx.write(dir / (std::string(to_string(kind)) + ".svg"), svg);
  }
}

}  // namespace

void cmd_simulate(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "simulate");
  const auto& c = ctx.cfg();
  const Network initial = ctx.timed("network", [&] { return build_network(c.network); });
  ctx.log("simulate: " + std::to_string(initial.size()) + " neurons, " + std::to_string(initial.synapses.size()) +
          " synapses");

  StimulusConfig stim = make_pattern(c.stimulus.pattern_neurons, initial.size(), c.stimulus.pattern_rate_hz,
                                     c.stimulus.pattern_window_ms, c.stimulus.pattern_period_ms, c.stimulus.seed);
  stim.poisson_rate_hz = c.stimulus.poisson_rate_hz;
  stim.bias_current = c.stimulus.bias_current;

  SimulationResult plastic{sort_and_index_spikes({}, 0.0), initial};
  if (c.run.plastic_ms > 0.0) {
    SimulationOptions opts;
    opts.duration_ms = c.run.plastic_ms;
    opts.dt_ms = c.run.dt_ms;
    if (c.run.plasticity) opts.plasticity = c.stdp;
    opts.seed = c.run.seed;
    plastic = ctx.timed("plastic-phase", [&] { return simulate(initial, stim, opts); });
  }
  ctx.write(ctx.out(files::kPlasticSpikes), io::spikes_to_csv(plastic.train));
  ctx.write(ctx.out(files::kPlasticNetwork), io::network_to_json(plastic.network));

  StimulusConfig fixed_stim = stim;
  fixed_stim.pattern_phase_ms = std::fmod(c.run.plastic_ms, c.stimulus.pattern_period_ms);
  SimulationOptions opts;
  opts.duration_ms = c.run.fixed_ms;
  opts.dt_ms = c.run.dt_ms;
  opts.seed = splitmix64(c.run.seed);
  const auto fixed = ctx.timed("fixed-phase", [&] { return simulate(plastic.network, fixed_stim, opts); });
  ctx.log("simulate: " + std::to_string(plastic.train.size()) + " plastic-phase and " +
          std::to_string(fixed.train.size()) + " fixed-phase spikes");
  ctx.write(ctx.out(files::kSpikes), io::spikes_to_csv(fixed.train));
  ctx.write(ctx.out(files::kNetwork), io::network_to_json(fixed.network));
  ctx.close();
}

void cmd_build_graph(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "build-graph");
  stage_build_graph(ctx);
  ctx.close();
}

void cmd_gnats(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "gnats");
  stage_gnats(ctx);
  ctx.close();
}

void cmd_analogs(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "analogs");
  stage_analogs(ctx);
  ctx.close();
}

void cmd_relations(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "relations");
  stage_relations(ctx);
  ctx.close();
}

void cmd_analyze(const PipelineConfig& cfg, const LogSink& log) {
  Context ctx(cfg, log, "analyze");
  stage_build_graph(ctx);
  stage_gnats(ctx);
  stage_analogs(ctx);
  if (ctx.cfg().analogs.self_mode) stage_relations(ctx);
  if (ctx.cfg().plot.enabled) stage_plot(ctx, {});
  ctx.close();
}

void cmd_plot(const PipelineConfig& cfg, std::vector<PlotKind> kinds, const LogSink& log) {
  Context ctx(cfg, log, "plot");
  stage_plot(ctx, std::move(kinds));
  ctx.close();
}

std::string cmd_stats(const PipelineConfig& cfg) {
  cfg.validate();
  ordered_json j;
  j["out_dir"] = cfg.io.out_dir.string();
  auto attach = [&](const char* key, const char* file) {
    const auto path = cfg.io.out_dir / file;
    if (!fs::exists(path)) return;
    const auto parsed = json::parse(io::read_file(path), nullptr, false);
    if (parsed.is_discarded()) throw InputError(path.string() + ": malformed JSON");
    j[key] = parsed;
  };
  const auto spikes = cfg.input_path(cfg.io.spikes);
  if (fs::exists(spikes)) {
    const auto train = io::spikes_from_csv(io::read_file(spikes), spikes.string());
    j["spike_train"] = {{"spikes", train.size()}, {"neurons", train.neuron_span()}, {"duration_ms", train.duration()}};
  }
  attach("graph", files::kGraphSummary);
  attach("threads", files::kStats);
  attach("analogs", files::kAnalogSummary);
  const auto classes = cfg.io.out_dir / files::kClasses;
  if (fs::exists(classes)) j["classes"] = io::classes_from_json(io::read_file(classes), classes.string()).size();
  return j.dump(1) + "\n";
}

}  // namespace gnat
