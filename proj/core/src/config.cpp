#include "gnat/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gnat/io.hpp"

namespace gnat {

namespace {

struct Field {
  std::string name;  // section.key
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(std::string(key) + ": invalid value '" + std::string(value) + "' (expected " +
                    std::string(expected) + ")");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    bad_value(key, text, std::is_floating_point_v<T> ? "a number" : "a non-negative integer");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  bad_value(key, text, "true or false");
}

std::string fmt(double v) { return io::format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }
template <typename T>
std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool>, std::string> fmt(T v) {
  return std::to_string(v);
}

template <typename T, typename Member>
Field number_field(std::string name, Member member) {
  Field f;
  f.name = name;
  f.set = [name, member](PipelineConfig& c, std::string_view v) { member(c) = parse_number<T>(name, v); };
  f.get = [member](const PipelineConfig& c) { return fmt(member(const_cast<PipelineConfig&>(c))); };
  return f;
}

template <typename Member>
Field bool_field(std::string name, Member member) {
  Field f;
  f.name = name;
  f.set = [name, member](PipelineConfig& c, std::string_view v) { member(c) = parse_bool(name, v); };
  f.get = [member](const PipelineConfig& c) { return fmt(member(const_cast<PipelineConfig&>(c))); };
  return f;
}

template <typename Member>
Field optional_field(std::string name, Member member) {
  Field f;
  f.name = name;
  f.set = [name, member](PipelineConfig& c, std::string_view v) {
    v = trim(v);
    if (v.empty() || v == "none") {
      member(c).reset();
    } else {
      member(c) = parse_number<double>(name, v);
    }
  };
  f.get = [member](const PipelineConfig& c) {
    const auto& o = member(const_cast<PipelineConfig&>(c));
    return o ? fmt(*o) : std::string("none");
  };
  return f;
}

Field path_field(std::string name, std::filesystem::path IoSettings::*member) {
  Field f;
  f.name = name;
  f.set = [member](PipelineConfig& c, std::string_view v) { c.io.*member = std::string(trim(v)); };
  f.get = [member](const PipelineConfig& c) { return (c.io.*member).string(); };
  return f;
}

#define GNAT_MEMBER(expr) [](PipelineConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(number_field<std::size_t>("network.n_excitatory", GNAT_MEMBER(network.n_excitatory)));
    t.push_back(number_field<std::size_t>("network.n_inhibitory", GNAT_MEMBER(network.n_inhibitory)));
    t.push_back(number_field<double>("network.width_um", GNAT_MEMBER(network.width)));
    t.push_back(number_field<double>("network.height_um", GNAT_MEMBER(network.height)));
    t.push_back(number_field<double>("network.exc_p_max", GNAT_MEMBER(network.excitatory_profile.p_max)));
    t.push_back(number_field<double>("network.exc_mu_um", GNAT_MEMBER(network.excitatory_profile.mu)));
    t.push_back(number_field<double>("network.exc_sigma", GNAT_MEMBER(network.excitatory_profile.sigma)));
    t.push_back(number_field<double>("network.inh_p_max", GNAT_MEMBER(network.inhibitory_profile.p_max)));
    t.push_back(number_field<double>("network.inh_mu_um", GNAT_MEMBER(network.inhibitory_profile.mu)));
    t.push_back(number_field<double>("network.inh_sigma", GNAT_MEMBER(network.inhibitory_profile.sigma)));
    t.push_back(number_field<double>("network.exc_delay_min_ms", GNAT_MEMBER(network.exc_delay_min)));
    t.push_back(number_field<double>("network.exc_delay_max_ms", GNAT_MEMBER(network.exc_delay_max)));
    t.push_back(number_field<double>("network.inh_delay_ms", GNAT_MEMBER(network.inh_delay)));
    t.push_back(number_field<double>("network.exc_weight", GNAT_MEMBER(network.exc_weight)));
    t.push_back(number_field<double>("network.inh_weight", GNAT_MEMBER(network.inh_weight)));
    t.push_back(number_field<std::uint64_t>("network.seed", GNAT_MEMBER(network.seed)));

    t.push_back(number_field<double>("stimulus.poisson_rate_hz", GNAT_MEMBER(stimulus.poisson_rate_hz)));
    t.push_back(number_field<std::size_t>("stimulus.pattern_neurons", GNAT_MEMBER(stimulus.pattern_neurons)));
    t.push_back(number_field<double>("stimulus.pattern_rate_hz", GNAT_MEMBER(stimulus.pattern_rate_hz)));
    t.push_back(number_field<double>("stimulus.pattern_window_ms", GNAT_MEMBER(stimulus.pattern_window_ms)));
    t.push_back(number_field<double>("stimulus.pattern_period_ms", GNAT_MEMBER(stimulus.pattern_period_ms)));
    t.push_back(number_field<double>("stimulus.bias_current", GNAT_MEMBER(stimulus.bias_current)));
    t.push_back(number_field<std::uint64_t>("stimulus.seed", GNAT_MEMBER(stimulus.seed)));

    t.push_back(number_field<double>("stdp.a_plus", GNAT_MEMBER(stdp.a_plus)));
    t.push_back(number_field<double>("stdp.a_minus", GNAT_MEMBER(stdp.a_minus)));
    t.push_back(number_field<double>("stdp.tau_plus_ms", GNAT_MEMBER(stdp.tau_plus)));
    t.push_back(number_field<double>("stdp.tau_minus_ms", GNAT_MEMBER(stdp.tau_minus)));
    t.push_back(number_field<double>("stdp.w_max", GNAT_MEMBER(stdp.w_max)));
    t.push_back(number_field<double>("stdp.update_interval_ms", GNAT_MEMBER(stdp.update_interval)));
    t.push_back(number_field<double>("stdp.drift_per_s", GNAT_MEMBER(stdp.drift_per_s)));

    t.push_back(number_field<double>("run.plastic_ms", GNAT_MEMBER(run.plastic_ms)));
    t.push_back(number_field<double>("run.fixed_ms", GNAT_MEMBER(run.fixed_ms)));
    t.push_back(number_field<double>("run.dt_ms", GNAT_MEMBER(run.dt_ms)));
    t.push_back(bool_field("run.plasticity", GNAT_MEMBER(run.plasticity)));
    t.push_back(number_field<std::uint64_t>("run.seed", GNAT_MEMBER(run.seed)));
    t.push_back(number_field<unsigned>("run.threads", GNAT_MEMBER(workers)));
    t.push_back(bool_field("run.verbose", GNAT_MEMBER(verbose)));

    t.push_back(number_field<double>("graph.tau_ms", GNAT_MEMBER(graph.omega.tau)));
    {
      Field f;
      f.name = "graph.norm";
      f.set = [](PipelineConfig& c, std::string_view v) {
        try {
          c.graph.omega.norm = parse_norm_kind(trim(v));
        } catch (const Error&) {
          bad_value("graph.norm", v, "l1 or l2");
        }
      };
      f.get = [](const PipelineConfig& c) { return std::string(to_string(c.graph.omega.norm)); };
      t.push_back(f);
    }
    t.push_back(number_field<double>("graph.log_threshold", GNAT_MEMBER(graph.omega.log_threshold)));
    t.push_back(optional_field("graph.window_multiplier", GNAT_MEMBER(graph.omega.window_multiplier)));
    t.push_back(bool_field("graph.auto_threshold", GNAT_MEMBER(graph.auto_threshold)));
    t.push_back(number_field<double>("graph.histogram_bin", GNAT_MEMBER(graph.histogram_bin)));
    t.push_back(number_field<std::uint64_t>("graph.shuffle_seed", GNAT_MEMBER(graph.shuffle_seed)));
    {
      Field f;
      f.name = "graph.shuffle_method";
      f.set = [](PipelineConfig& c, std::string_view v) {
        try {
          c.graph.shuffle_method = parse_shuffle_method(trim(v));
        } catch (const Error&) {
          bad_value("graph.shuffle_method", v, "uniform or isi");
        }
      };
      f.get = [](const PipelineConfig& c) {
        return std::string(c.graph.shuffle_method == ShuffleMethod::Uniform ? "uniform" : "isi");
      };
      t.push_back(f);
    }

    t.push_back(number_field<double>("threads.duration_bin_ms", GNAT_MEMBER(threads.duration_bin_ms)));
    t.push_back(number_field<double>("threads.overlap_bin_ms", GNAT_MEMBER(threads.overlap_bin_ms)));

    t.push_back(number_field<std::size_t>("analogs.min_spikes", GNAT_MEMBER(analogs.min_spikes)));
    t.push_back(bool_field("analogs.self", GNAT_MEMBER(analogs.self_mode)));
    t.push_back(optional_field("analogs.lag_min_ms", GNAT_MEMBER(analogs.lag_min_ms)));
    t.push_back(optional_field("analogs.lag_max_ms", GNAT_MEMBER(analogs.lag_max_ms)));
    t.push_back(number_field<std::size_t>("analogs.quadtree_min_edges", GNAT_MEMBER(analogs.quadtree_min_edges)));

    t.push_back(number_field<std::size_t>("relations.top_k", GNAT_MEMBER(relations.top_k)));
    {
      Field f;
      f.name = "relations.method";
      f.set = [](PipelineConfig& c, std::string_view v) { c.relations.classes.method = parse_class_method(trim(v)); };
      f.get = [](const PipelineConfig& c) { return std::string(to_string(c.relations.classes.method)); };
      t.push_back(f);
    }
    t.push_back(number_field<std::uint64_t>("relations.min_edge_weight", GNAT_MEMBER(relations.classes.min_edge_weight)));
    t.push_back(bool_field("relations.include_self_loops", GNAT_MEMBER(relations.classes.include_self_loops)));
    {
      Field f;
      f.name = "relations.trial_starts_ms";
      f.set = [](PipelineConfig& c, std::string_view v) {
        c.relations.trial_starts_ms.clear();
        v = trim(v);
        while (!v.empty()) {
          const auto comma = v.find(',');
          c.relations.trial_starts_ms.push_back(parse_number<double>("relations.trial_starts_ms", v.substr(0, comma)));
          if (comma == std::string_view::npos) break;
          v.remove_prefix(comma + 1);
        }
      };
      f.get = [](const PipelineConfig& c) {
        std::string out;
        for (std::size_t i = 0; i < c.relations.trial_starts_ms.size(); ++i) {
          if (i) out += ',';
          out += fmt(c.relations.trial_starts_ms[i]);
        }
        return out;
      };
      t.push_back(f);
    }
    t.push_back(number_field<double>("relations.trial_length_ms", GNAT_MEMBER(relations.trial_length_ms)));
    t.push_back(number_field<std::size_t>("relations.max_trials", GNAT_MEMBER(relations.max_trials)));

    t.push_back(path_field("io.out_dir", &IoSettings::out_dir));
    t.push_back(path_field("io.spikes", &IoSettings::spikes));
    t.push_back(path_field("io.network", &IoSettings::network));
    t.push_back(path_field("io.compare_spikes", &IoSettings::compare_spikes));

    t.push_back(bool_field("plot.enabled", GNAT_MEMBER(plot.enabled)));
    t.push_back(number_field<double>("plot.raster_start_ms", GNAT_MEMBER(plot.raster_start_ms)));
    t.push_back(number_field<double>("plot.raster_length_ms", GNAT_MEMBER(plot.raster_length_ms)));
    t.push_back(number_field<double>("plot.width_px", GNAT_MEMBER(plot.width_px)));
    t.push_back(number_field<double>("plot.height_px", GNAT_MEMBER(plot.height_px)));
    return t;
  }();
  return table;
}

#undef GNAT_MEMBER

void require(bool ok, std::string_view field, std::string_view rule) {
  if (!ok) throw ConfigError(std::string(field) + ": " + std::string(rule));
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.name == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ConfigError(std::string(key) + ": unknown configuration key");
}

PipelineConfig parse_config(std::string_view ini_text, PipelineConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": key outside of a [section]");
    for (const auto& [key, value] : body) set_config_value(base, section + "." + key, value.data());
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const MissingInputError&) {
    throw ConfigError("config: no such file " + path.string());
  } catch (const InputError&) {
    throw ConfigError("config: cannot read " + path.string());
  }
  return parse_config(text, std::move(base));
}

std::vector<std::pair<std::string, std::string>> resolved_config(const PipelineConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.name, f.get(cfg));
  return out;
}

std::string config_to_ini(const PipelineConfig& cfg) {
  std::string out, section;
  for (const auto& [name, value] : resolved_config(cfg)) {
    const auto dot = name.find('.');
    const auto sec = name.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

void PipelineConfig::validate() const {
  const auto& n = network;
  require(n.n_excitatory + n.n_inhibitory > 0, "network.n_excitatory", "network needs at least one neuron");
  require(finite(n.width) && n.width > 0, "network.width_um", "must be positive");
  require(finite(n.height) && n.height > 0, "network.height_um", "must be positive");
  for (const auto& [p, name] : {std::pair(n.excitatory_profile, "network.exc"), std::pair(n.inhibitory_profile, "network.inh")}) {
    require(p.p_max >= 0 && p.p_max <= 1, std::string(name) + "_p_max", "must lie in [0, 1]");
    require(finite(p.mu), std::string(name) + "_mu_um", "must be finite");
    require(finite(p.sigma) && p.sigma > 0, std::string(name) + "_sigma", "must be positive");
  }
  require(n.exc_delay_min >= kMinDelayMs, "network.exc_delay_min_ms", "must be >= 1 ms");
  require(finite(n.exc_delay_max) && n.exc_delay_max >= n.exc_delay_min, "network.exc_delay_max_ms",
          "must be >= exc_delay_min_ms");
  require(finite(n.inh_delay) && n.inh_delay >= kMinDelayMs, "network.inh_delay_ms", "must be >= 1 ms");
  require(finite(n.exc_weight) && n.exc_weight >= 0, "network.exc_weight", "must be >= 0");
  require(finite(n.inh_weight) && n.inh_weight <= 0, "network.inh_weight", "must be <= 0");

  require(finite(stimulus.poisson_rate_hz) && stimulus.poisson_rate_hz >= 0, "stimulus.poisson_rate_hz", "must be >= 0");
  require(stimulus.pattern_neurons <= n.n_excitatory + n.n_inhibitory, "stimulus.pattern_neurons",
          "exceeds the number of neurons");
  require(finite(stimulus.pattern_rate_hz) && stimulus.pattern_rate_hz >= 0, "stimulus.pattern_rate_hz", "must be >= 0");
  require(finite(stimulus.pattern_period_ms) && stimulus.pattern_period_ms > 0, "stimulus.pattern_period_ms",
          "must be positive");
  require(stimulus.pattern_window_ms >= 0 && stimulus.pattern_window_ms <= stimulus.pattern_period_ms,
          "stimulus.pattern_window_ms", "must lie in [0, pattern_period_ms]");
  require(finite(stimulus.bias_current), "stimulus.bias_current", "must be finite");

  stdp.validate();

  require(finite(run.plastic_ms) && run.plastic_ms >= 0, "run.plastic_ms", "must be >= 0");
  require(finite(run.fixed_ms) && run.fixed_ms > 0, "run.fixed_ms", "must be positive");
  require(finite(run.dt_ms) && run.dt_ms > 0 && run.dt_ms <= kMinDelayMs, "run.dt_ms", "must lie in (0, 1] ms");
  require(workers >= 1, "run.threads", "must be >= 1");

  graph.omega.validate();
  require(finite(graph.histogram_bin) && graph.histogram_bin > 0, "graph.histogram_bin", "must be positive");
  require(finite(threads.duration_bin_ms) && threads.duration_bin_ms > 0, "threads.duration_bin_ms", "must be positive");
  require(finite(threads.overlap_bin_ms) && threads.overlap_bin_ms > 0, "threads.overlap_bin_ms", "must be positive");
  require(analogs.lag_min_ms.has_value() == analogs.lag_max_ms.has_value(), "analogs.lag_min_ms",
          "lag_min_ms and lag_max_ms must be set together");
  if (analogs.lag_min_ms) {
    require(finite(*analogs.lag_min_ms) && finite(*analogs.lag_max_ms) && *analogs.lag_min_ms <= *analogs.lag_max_ms,
            "analogs.lag_max_ms", "must be >= lag_min_ms");
  }
  require(relations.top_k > 0, "relations.top_k", "must be positive");
  require(finite(relations.trial_length_ms) && relations.trial_length_ms > 0, "relations.trial_length_ms",
          "must be positive");
  for (double t : relations.trial_starts_ms) require(finite(t) && t >= 0, "relations.trial_starts_ms", "must be >= 0");
  require(finite(plot.raster_length_ms) && plot.raster_length_ms > 0, "plot.raster_length_ms", "must be positive");
  require(plot.width_px >= 100 && plot.height_px >= 100, "plot.width_px", "plots need at least 100 x 100 px");
}

std::optional<LagWindow> PipelineConfig::lag_window() const {
  if (!analogs.lag_min_ms || !analogs.lag_max_ms) return std::nullopt;
  return LagWindow{*analogs.lag_min_ms, *analogs.lag_max_ms};
}

std::vector<double> PipelineConfig::trial_starts() const {
  if (!relations.trial_starts_ms.empty()) return relations.trial_starts_ms;
  std::vector<double> out;
  if (stimulus.pattern_neurons == 0) return out;
  const double period = stimulus.pattern_period_ms;
  const double offset = std::fmod(period - std::fmod(run.plastic_ms, period), period);
  for (double t = offset; t < run.fixed_ms && out.size() < relations.max_trials; t += period) out.push_back(t);
  return out;
}

}  // namespace gnat
