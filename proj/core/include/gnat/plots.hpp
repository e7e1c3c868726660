#pragma once

// Deterministic SVG figures. Coordinates are printed with two decimals and
// colours come from a fixed palette indexed by a hash of the GNAT or class
// id, so identical inputs always give identical bytes.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gnat/causal_graph.hpp"
#include "gnat/relations.hpp"
#include "gnat/threads.hpp"

namespace gnat {

enum class PlotKind { Raster, RasterThreads, NegLogOmega, Durations, ClassTimeline, TrialOverlay };

PlotKind parse_plot_kind(std::string_view text);
std::string_view to_string(PlotKind kind);
inline constexpr PlotKind kAllPlotKinds[] = {PlotKind::Raster,    PlotKind::RasterThreads, PlotKind::NegLogOmega,
                                             PlotKind::Durations, PlotKind::ClassTimeline, PlotKind::TrialOverlay};

struct PlotFrame {
  double width = 960.0;
  double height = 480.0;
  std::string title;
};

/// "#rrggbb" for an id; negative ids (isolated spikes, unclassified) are grey.
std::string id_color(std::int64_t id);

std::string plot_raster(const SpikeTrain& train, double t0, double t1, const PlotFrame& frame);

/// Spikes coloured by GNAT, edges drawn as segments in their GNAT's colour.
std::string plot_raster_threads(const ActivityGraph& graph, const GnatDecomposition& decomp, double t0, double t1,
                                const PlotFrame& frame);

struct HistogramSeries {
  const Histogram* histogram = nullptr;
  std::string label;
  std::string color;
};

std::string plot_histograms(std::span<const HistogramSeries> series, std::optional<double> marker,
                            std::string_view x_label, const PlotFrame& frame);

std::string plot_class_timeline(std::span<const ClassInterval> intervals, double duration, const PlotFrame& frame);

std::string plot_trial_overlay(std::span<const TrialInterval> overlay, std::size_t trials, double trial_length,
                               const PlotFrame& frame);

}  // namespace gnat
