#include "gnat/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "gnat/random.hpp"

namespace gnat {

namespace {

constexpr std::array<const char*, 20> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#393b79",
    "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354", "#756bb1", "#636363", "#a55194"};

std::string num(double v) {
  if (std::fabs(v) < 0.005) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::fabs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double range) {
  if (!(range > 0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

class Canvas {
 public:
  static constexpr double kLeft = 64, kRight = 16, kTop = 32, kBottom = 44;

  Canvas(const PlotFrame& frame, double x0, double x1, double y0, double y1)
      : frame_(frame), x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(frame.width) + "\" height=\"" +
             num(frame.height) + "\" viewBox=\"0 0 " + num(frame.width) + " " + num(frame.height) + "\">\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + num(frame.width) + "\" height=\"" + num(frame.height) +
             "\" fill=\"#ffffff\"/>\n";
    if (!frame.title.empty()) {
      body_ += "<text x=\"" + num(frame.width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\">" + escape(frame.title) + "</text>\n";
    }
  }

  double x(double v) const { return kLeft + (v - x0_) / (x1_ - x0_) * plot_w(); }
  double y(double v) const { return kTop + plot_h() - (v - y0_) / (y1_ - y0_) * plot_h(); }
  double plot_w() const { return frame_.width - kLeft - kRight; }
  double plot_h() const { return frame_.height - kTop - kBottom; }

  void axes(std::string_view x_label, std::string_view y_label, bool y_ticks = true) {
    body_ += "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
    body_ += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w()) + "\" height=\"" +
             num(plot_h()) + "\"/>\n";
    const double xs = nice_step(x1_ - x0_);
    std::string labels;
    for (double t = std::ceil(x0_ / xs) * xs; t <= x1_ + 1e-9 * xs; t += xs) {
      const double px = x(t);
      body_ += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop + plot_h()) + "\" x2=\"" + num(px) + "\" y2=\"" +
               num(kTop + plot_h() + 4) + "\"/>\n";
      labels += "<text x=\"" + num(px) + "\" y=\"" + num(kTop + plot_h() + 16) + "\" text-anchor=\"middle\">" +
                label(t) + "</text>\n";
    }
    if (y_ticks) {
      const double ys = nice_step(y1_ - y0_);
      for (double t = std::ceil(y0_ / ys) * ys; t <= y1_ + 1e-9 * ys; t += ys) {
        const double py = y(t);
        body_ += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
                 num(py) + "\"/>\n";
        labels += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py + 3) + "\" text-anchor=\"end\">" + label(t) +
                  "</text>\n";
      }
    }
    body_ += "</g>\n<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#000000\">\n" + labels;
    body_ += "<text x=\"" + num(kLeft + plot_w() / 2) + "\" y=\"" + num(frame_.height - 8) +
             "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
    body_ += "<text x=\"14\" y=\"" + num(kTop + plot_h() / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
             num(kTop + plot_h() / 2) + ")\">" + escape(y_label) + "</text>\n</g>\n";
  }

  void raw(std::string_view s) { body_ += s; }

  std::string finish() {
    body_ += "</svg>\n";
    return std::move(body_);
  }

 private:
  PlotFrame frame_;
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

std::string dot(double x, double y, std::string_view color) {
  return "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"1.5\" fill=\"" + std::string(color) + "\"/>\n";
}

}  // namespace

PlotKind parse_plot_kind(std::string_view text) {
  for (auto k : kAllPlotKinds) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("plot kind: unknown '" + std::string(text) +
                    "' (raster|raster-threads|neg-log-omega|durations|class-timeline|trial-overlay)");
}

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::Raster: return "raster";
    case PlotKind::RasterThreads: return "raster-threads";
    case PlotKind::NegLogOmega: return "neg-log-omega";
    case PlotKind::Durations: return "durations";
    case PlotKind::ClassTimeline: return "class-timeline";
    case PlotKind::TrialOverlay: return "trial-overlay";
  }
  return "raster";
}

std::string id_color(std::int64_t id) {
  if (id < 0) return "#b0b0b0";
  return kPalette[splitmix64(static_cast<std::uint64_t>(id)) % kPalette.size()];
}

std::string plot_raster(const SpikeTrain& train, double t0, double t1, const PlotFrame& frame) {
  const double n = static_cast<double>(std::max<std::size_t>(train.neuron_span(), 1));
  Canvas c(frame, t0, t1, 0, n);
  c.axes("time (ms)", "neuron");
  c.raw("<g class=\"spikes\">\n");
  for (const auto& s : train.spikes()) {
    if (s.time < t0 || s.time >= t1) continue;
    c.raw(dot(c.x(s.time), c.y(s.neuron + 0.5), "#202020"));
  }
  c.raw("</g>\n");
  return c.finish();
}

std::string plot_raster_threads(const ActivityGraph& graph, const GnatDecomposition& decomp, double t0, double t1,
                                const PlotFrame& frame) {
  const auto& train = graph.train();
  const double n = static_cast<double>(std::max<std::size_t>(train.neuron_span(), 1));
  Canvas c(frame, t0, t1, 0, n);
  c.axes("time (ms)", "neuron");
  auto in_range = [&](SpikeId s) { return train[s].time >= t0 && train[s].time < t1; };
  c.raw("<g class=\"edges\" stroke-width=\"0.6\">\n");
  for (const auto& e : graph.edges()) {
    if (!in_range(e.pre) && !in_range(e.post)) continue;
    c.raw("<line x1=\"" + num(c.x(train[e.pre].time)) + "\" y1=\"" + num(c.y(train[e.pre].neuron + 0.5)) +
          "\" x2=\"" + num(c.x(train[e.post].time)) + "\" y2=\"" + num(c.y(train[e.post].neuron + 0.5)) +
          "\" stroke=\"" + id_color(decomp.gnat_of(e.pre)) + "\"/>\n");
  }
  c.raw("</g>\n<g class=\"spikes\">\n");
  for (SpikeId s = 0; s < train.size(); ++s) {
    if (!in_range(s)) continue;
    const GnatId g = decomp.gnat_of(s);
    c.raw(dot(c.x(train[s].time), c.y(train[s].neuron + 0.5), g == kNotAVertex ? "#e0e0e0" : id_color(g)));
  }
  c.raw("</g>\n");
  return c.finish();
}

std::string plot_histograms(std::span<const HistogramSeries> series, std::optional<double> marker,
                            std::string_view x_label, const PlotFrame& frame) {
  double x0 = 0, x1 = 1, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    const auto& h = *s.histogram;
    if (h.empty()) continue;
    const double lo = h.origin, hi = h.bin_left(h.counts.size());
    x0 = first ? lo : std::min(x0, lo);
    x1 = first ? hi : std::max(x1, hi);
    first = false;
    for (auto v : h.counts) ymax = std::max(ymax, static_cast<double>(v));
  }
  if (marker && first) {
    x0 = std::min(x0, *marker);
    x1 = std::max(x1, *marker + 1);
  }
  Canvas c(frame, x0, x1, 0, ymax * 1.05);
  c.axes(x_label, "count");
  for (const auto& s : series) {
    const auto& h = *s.histogram;
    c.raw("<g class=\"series\" fill=\"" + s.color + "\" fill-opacity=\"0.6\">\n");
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      if (h.counts[i] == 0) continue;
      const double left = c.x(h.bin_left(i)), right = c.x(h.bin_left(i + 1));
      const double top = c.y(static_cast<double>(h.counts[i]));
      c.raw("<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(right - left, 0.01)) +
            "\" height=\"" + num(c.y(0) - top) + "\"/>\n");
    }
    c.raw("</g>\n");
  }
  if (marker) {
    c.raw("<line class=\"marker\" x1=\"" + num(c.x(*marker)) + "\" y1=\"" + num(c.y(0)) + "\" x2=\"" +
          num(c.x(*marker)) + "\" y2=\"" + num(c.y(ymax * 1.05)) + "\" stroke=\"#d62728\" stroke-dasharray=\"4 2\"/>\n");
  }
  c.raw("<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n");
  double ly = Canvas::kTop + 14;
  for (const auto& s : series) {
    const double lx = frame.width - Canvas::kRight - 120;
    c.raw("<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" + s.color +
          "\"/>\n<text x=\"" + num(lx + 14) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n");
    ly += 14;
  }
  c.raw("</g>\n");
  return c.finish();
}

std::string plot_class_timeline(std::span<const ClassInterval> intervals, double duration, const PlotFrame& frame) {
  std::uint32_t classes = 0;
  for (const auto& iv : intervals) classes = std::max(classes, iv.class_id + 1);
  Canvas c(frame, 0, std::max(duration, 1.0), 0, std::max<double>(classes, 1));
  c.axes("time (ms)", "class");
  c.raw("<g class=\"intervals\">\n");
  for (const auto& iv : intervals) {
    const double left = c.x(iv.t_start), right = c.x(iv.t_end);
    const double top = c.y(iv.class_id + 0.9), bottom = c.y(iv.class_id + 0.1);
    c.raw("<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(right - left, 1.0)) +
          "\" height=\"" + num(bottom - top) + "\" fill=\"" + id_color(iv.class_id) + "\"/>\n");
  }
  c.raw("</g>\n");
  return c.finish();
}

std::string plot_trial_overlay(std::span<const TrialInterval> overlay, std::size_t trials, double trial_length,
                               const PlotFrame& frame) {
  Canvas c(frame, 0, std::max(trial_length, 1.0), 0, std::max<double>(static_cast<double>(trials), 1));
  c.axes("time in trial (ms)", "trial");
  // Within a trial row, stack classes in sub-rows.
  std::uint32_t classes = 1;
  for (const auto& t : overlay) classes = std::max(classes, t.interval.class_id + 1);
  c.raw("<g class=\"intervals\">\n");
  for (const auto& t : overlay) {
    const double row = static_cast<double>(t.trial_index);
    const double sub = 0.9 / classes;
    const double top = c.y(row + 0.95 - sub * t.interval.class_id);
    const double bottom = c.y(row + 0.95 - sub * (t.interval.class_id + 1));
    const double left = c.x(t.rel_start), right = c.x(t.rel_end);
    c.raw("<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(std::max(right - left, 1.0)) +
          "\" height=\"" + num(std::max(bottom - top, 0.5)) + "\" fill=\"" + id_color(t.interval.class_id) + "\"" +
          (t.clipped ? " stroke=\"#000000\" stroke-dasharray=\"2 2\"" : "") + "/>\n");
  }
  c.raw("</g>\n");
  return c.finish();
}

}  // namespace gnat
