#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "gnat/config.hpp"

namespace gnat {
namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(PipelineConfig{}.validate()); }

TEST(Config, ParsesSections) {
  const auto cfg = parse_config(R"(
[network]
n_excitatory = 40
n_inhibitory = 10
[graph]
tau_ms = 10
norm = l2
window_multiplier = 3
auto_threshold = true
[stdp]
drift_per_s = 0.01
[analogs]
lag_min_ms = 0
lag_max_ms = 250
[relations]
method = modularity
trial_starts_ms = 100, 2500.5
)");
  EXPECT_EQ(cfg.network.n_excitatory, 40u);
  EXPECT_DOUBLE_EQ(cfg.graph.omega.tau, 10.0);
  EXPECT_EQ(cfg.graph.omega.norm, NormKind::L2);
  EXPECT_DOUBLE_EQ(cfg.graph.omega.multiplier(), 3.0);
  EXPECT_TRUE(cfg.graph.auto_threshold);
  EXPECT_DOUBLE_EQ(cfg.stdp.drift_per_s, 0.01);
  ASSERT_TRUE(cfg.lag_window().has_value());
  EXPECT_DOUBLE_EQ(cfg.lag_window()->max_lag, 250.0);
  EXPECT_EQ(cfg.relations.classes.method, ClassMethod::Modularity);
  EXPECT_EQ(cfg.relations.trial_starts_ms, (std::vector<double>{100.0, 2500.5}));
  EXPECT_EQ(cfg.trial_starts(), (std::vector<double>{100.0, 2500.5}));
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, UnknownKeyAndBadValues) {
  EXPECT_NE(error_of([] { parse_config("[graph]\ntua_ms = 5\n"); }).find("graph.tua_ms"), std::string::npos);
  EXPECT_NE(error_of([] { parse_config("[graph]\nnorm = max\n"); }).find("graph.norm"), std::string::npos);
  EXPECT_NE(error_of([] { parse_config("[network]\nn_excitatory = -3\n"); }).find("network.n_excitatory"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_config("[run]\nplasticity = maybe\n"); }).find("run.plasticity"), std::string::npos);
  EXPECT_THROW(parse_config("[graph\n"), ConfigError);
}

TEST(Config, ValidateNamesTheField) {
  PipelineConfig cfg;
  cfg.graph.omega.tau = -1.0;
  EXPECT_NE(error_of([&] { cfg.validate(); }).find("graph.tau_ms"), std::string::npos);
  cfg = {};
  cfg.stdp.drift_per_s = -0.5;
  EXPECT_NE(error_of([&] { cfg.validate(); }).find("stdp.drift_per_s"), std::string::npos);
  cfg = {};
  cfg.network.exc_delay_min = 0.5;
  EXPECT_NE(error_of([&] { cfg.validate(); }).find("network.exc_delay_min_ms"), std::string::npos);
  cfg = {};
  cfg.plot.width_px = 10;
  EXPECT_NE(error_of([&] { cfg.validate(); }).find("plot.width_px"), std::string::npos);
}

TEST(Config, IniRoundTrip) {
  PipelineConfig cfg;
  set_config_value(cfg, "graph.tau_ms", "7.25");
  set_config_value(cfg, "analogs.lag_max_ms", "100");
  set_config_value(cfg, "analogs.lag_min_ms", "-100");
  set_config_value(cfg, "relations.trial_starts_ms", "0,10000");
  set_config_value(cfg, "io.out_dir", "/tmp/some dir");
  set_config_value(cfg, "stdp.drift_per_s", "0.125");
  set_config_value(cfg, "graph.shuffle_method", "isi");
  const auto text = config_to_ini(cfg);
  const auto back = parse_config(text);
  EXPECT_EQ(resolved_config(back), resolved_config(cfg));
  EXPECT_EQ(config_to_ini(back), text);
  EXPECT_EQ(resolved_config(parse_config(config_to_ini(PipelineConfig{}))), resolved_config(PipelineConfig{}));
}

TEST(Config, PatternTrialStartsFollowThePatternClock) {
  PipelineConfig cfg;
  cfg.run.plastic_ms = 60000;
  cfg.run.fixed_ms = 60000;
  EXPECT_EQ(cfg.trial_starts(), (std::vector<double>{0, 10000, 20000, 30000}));
  cfg.run.plastic_ms = 65000;
  cfg.relations.max_trials = 2;
  EXPECT_EQ(cfg.trial_starts(), (std::vector<double>{5000, 15000}));
  cfg.stimulus.pattern_neurons = 0;
  EXPECT_TRUE(cfg.trial_starts().empty());
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "gnat_config_test.ini";
  std::ofstream(path) << "[run]\nseed = 99\n";
  EXPECT_EQ(load_config(path).run.seed, 99u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ConfigError);
}

TEST(Config, ShippedProfilesParse) {
  for (const auto* name : {"desk.ini", "full.ini"}) {
    const auto cfg = load_config(std::filesystem::path(GNAT_SOURCE_DIR) / "configs" / name);
    EXPECT_NO_THROW(cfg.validate()) << name;
  }
}

}  // namespace
}  // namespace gnat
