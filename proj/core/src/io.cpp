#include "gnat/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

namespace gnat::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InternalError("cannot format number");
  return std::string(buf.data(), end);
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  if (!fs::exists(path)) throw MissingInputError("missing input " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

class CsvReader {
 public:
  CsvReader(std::string_view text, std::string_view source, std::string_view header)
      : text_(text), source_(source) {
    std::vector<std::string_view> fields;
    if (!next(fields)) fail("missing header '" + std::string(header) + "'");
    if (joined(fields) != header) fail("expected header '" + std::string(header) + "'");
  }

  /// Next data row; comment lines (starting with '#') and blank lines are skipped.
  bool next(std::vector<std::string_view>& fields) {
    while (pos_ < text_.size()) {
      const auto end = text_.find('\n', pos_);
      std::string_view line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
      pos_ = end == std::string_view::npos ? text_.size() : end + 1;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      if (line.front() == '#') {
        comments_.emplace_back(line.substr(1));
        continue;
      }
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  void expect_columns(const std::vector<std::string_view>& fields, std::size_t n) const {
    if (fields.size() != n) fail("expected " + std::to_string(n) + " columns, found " + std::to_string(fields.size()));
  }

  template <typename T>
  T number(std::string_view field) const {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && field.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) fail("invalid number '" + std::string(field) + "'");
    return value;
  }

  bool boolean(std::string_view field) const {
    if (field == "1" || field == "true") return true;
    if (field == "0" || field == "false") return false;
    fail("invalid flag '" + std::string(field) + "'");
  }

  const std::vector<std::string>& comments() const { return comments_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(std::string(source_) + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  static std::string joined(const std::vector<std::string_view>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    return out;
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  std::vector<std::string> comments_;
};

template <typename F>
auto parse_json(std::string_view text, std::string_view source, F&& body) {
  try {
    return body(json::parse(text.begin(), text.end()));
  } catch (const json::exception& e) {
    throw InputError(std::string(source) + ": " + e.what());
  }
}

constexpr std::string_view kDurationTag = " duration_ms=";

}  // namespace

std::string spikes_to_csv(const SpikeTrain& train) {
  std::string out = "#" + std::string(kDurationTag) + format_double(train.duration()) + "\n";
  out += "spike_id,neuron_id,time_ms\n";
  for (SpikeId id = 0; id < train.size(); ++id) {
    out += std::to_string(id) + ',' + std::to_string(train[id].neuron) + ',' + format_double(train[id].time) + '\n';
  }
  return out;
}

SpikeTrain spikes_from_csv(std::string_view text, std::string_view source) {
  CsvReader reader(text, source, "spike_id,neuron_id,time_ms");
  std::vector<Spike> spikes;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    reader.expect_columns(f, 3);
    const auto id = reader.number<std::uint64_t>(f[0]);
    if (id != spikes.size()) reader.fail("spike ids must be consecutive from 0");
    Spike s{reader.number<NeuronId>(f[1]), reader.number<double>(f[2])};
    if (!spikes.empty() && spike_before(s, spikes.back())) reader.fail("spikes must be sorted by (time, neuron)");
    spikes.push_back(s);
  }
  std::optional<double> duration;
  for (const auto& c : reader.comments()) {
    if (c.rfind(kDurationTag, 0) == 0) duration = reader.number<double>(std::string_view(c).substr(kDurationTag.size()));
  }
  return sort_and_index_spikes(std::move(spikes), duration);
}

std::string network_to_json(const Network& net) {
  ordered_json j;
  j["width_um"] = net.width;
  j["height_um"] = net.height;
  j["neurons"] = ordered_json::array();
  for (std::size_t i = 0; i < net.neurons.size(); ++i) {
    const auto& n = net.neurons[i];
    j["neurons"].push_back({{"id", i}, {"x", n.position.x}, {"y", n.position.y}, {"excitatory", n.excitatory}});
  }
  j["synapses"] = ordered_json::array();
  for (const auto& s : net.synapses) {
    j["synapses"].push_back({{"pre", s.pre}, {"post", s.post}, {"weight", s.weight}, {"delay_ms", s.delay}});
  }
  return j.dump(1) + "\n";
}

Network network_from_json(std::string_view text, std::string_view source) {
  return parse_json(text, source, [&](const json& j) {
    Network net;
    net.width = j.at("width_um").get<double>();
    net.height = j.at("height_um").get<double>();
    for (const auto& n : j.at("neurons")) {
      if (n.at("id").get<std::size_t>() != net.neurons.size()) {
        throw InputError(std::string(source) + ": neuron ids must be consecutive from 0");
      }
      net.neurons.push_back({{n.at("x").get<double>(), n.at("y").get<double>()}, n.at("excitatory").get<bool>()});
    }
    for (const auto& s : j.at("synapses")) {
      net.synapses.push_back({s.at("pre").get<NeuronId>(), s.at("post").get<NeuronId>(), s.at("weight").get<double>(),
                              s.at("delay_ms").get<double>()});
    }
    return net;
  });
}

std::string edges_to_csv(std::span<const ActivityEdge> edges) {
  std::string out = "pre_spike_id,post_spike_id,omega\n";
  for (const auto& e : edges) {
    out += std::to_string(e.pre) + ',' + std::to_string(e.post) + ',' + format_double(e.omega) + '\n';
  }
  return out;
}

std::vector<ActivityEdge> edges_from_csv(std::string_view text, std::string_view source) {
  CsvReader reader(text, source, "pre_spike_id,post_spike_id,omega");
  std::vector<ActivityEdge> edges;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    reader.expect_columns(f, 3);
    edges.push_back({reader.number<SpikeId>(f[0]), reader.number<SpikeId>(f[1]), reader.number<double>(f[2])});
  }
  return edges;
}

ActivityGraph activity_graph_from_csv(std::string_view text, std::shared_ptr<const SpikeTrain> train,
                                      const Network& net, std::string_view source) {
  auto mask = excitatory_mask(*train, net);
  return ActivityGraph(std::move(train), std::move(mask), edges_from_csv(text, source), structural_fingerprint(net));
}

std::string histogram_to_csv(const Histogram& hist) {
  std::string out = "bin_left,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out += format_double(hist.bin_left(i)) + ',' + std::to_string(hist.counts[i]) + '\n';
  }
  return out;
}

Histogram histogram_from_csv(std::string_view text, double bin_width, std::string_view source) {
  CsvReader reader(text, source, "bin_left,count");
  Histogram h;
  h.bin_width = bin_width;
  std::vector<std::string_view> f;
  bool first = true;
  while (reader.next(f)) {
    reader.expect_columns(f, 2);
    if (first) h.origin = reader.number<double>(f[0]);
    first = false;
    h.counts.push_back(reader.number<std::uint64_t>(f[1]));
  }
  return h;
}

std::string membership_to_csv(const GnatDecomposition& decomp) {
  std::string out = "spike_id,gnat_id\n";
  for (SpikeId id = 0; id < decomp.spike_to_gnat.size(); ++id) {
    const GnatId g = decomp.spike_to_gnat[id];
    if (g == kNotAVertex) continue;
    out += std::to_string(id) + ',' + std::to_string(g) + '\n';
  }
  return out;
}

std::vector<GnatId> membership_from_csv(std::string_view text, std::size_t spike_count, std::string_view source) {
  CsvReader reader(text, source, "spike_id,gnat_id");
  std::vector<GnatId> out(spike_count, kNotAVertex);
  std::vector<std::string_view> f;
  std::int64_t last = -1;
  while (reader.next(f)) {
    reader.expect_columns(f, 2);
    const auto id = reader.number<std::int64_t>(f[0]);
    const auto g = reader.number<GnatId>(f[1]);
    if (id <= last || id >= static_cast<std::int64_t>(spike_count)) reader.fail("spike id out of order or range");
    if (g < kIsolated) reader.fail("gnat id must be >= -1");
    out[static_cast<std::size_t>(id)] = g;
    last = id;
  }
  return out;
}

std::string stats_to_json(const GraphSummary& graph, const GnatDecomposition& decomp, const DurationStats& durations,
                          const OverlapStats& overlap) {
  ordered_json j;
  j["spikes"] = graph.spikes;
  j["vertices"] = graph.vertices;
  j["edges"] = graph.edges;
  j["log_threshold"] = graph.log_threshold;
  j["gnats"] = decomp.gnats.size();
  j["isolated_spikes"] = decomp.isolated.size();
  ordered_json d;
  d["bin_width_ms"] = durations.histogram.bin_width;
  d["count"] = durations.count;
  d["mean_ms"] = durations.mean;
  d["max_ms"] = durations.max;
  d["histogram"] = ordered_json::array();
  for (std::size_t i = 0; i < durations.histogram.counts.size(); ++i) {
    d["histogram"].push_back({{"bin_left", durations.histogram.bin_left(i)}, {"count", durations.histogram.counts[i]}});
  }
  j["durations"] = d;
  ordered_json o;
  o["bin_width_ms"] = overlap.bin_width;
  o["bins"] = overlap.gnats_per_bin.size();
  o["nonempty_bins"] = overlap.nonempty_bins;
  o["multi_gnat_bins"] = overlap.multi_bins;
  o["multi_gnat_fraction"] = overlap.multi_fraction();
  j["overlap"] = o;
  return j.dump(1) + "\n";
}

namespace {

GnatId projection_host(const GnatDecomposition& decomp, const std::vector<SpikeId>& spikes) {
  if (spikes.empty()) return kIsolated;
  const GnatId g = decomp.gnat_of(spikes.front());
  for (SpikeId s : spikes) {
    if (decomp.gnat_of(s) != g) return kIsolated;
  }
  return g < 0 ? kIsolated : g;
}

}  // namespace

std::string subthreads_to_jsonl(std::span<const AnalogousSubthread> subs, const GnatDecomposition& decomp_a,
                                const GnatDecomposition& decomp_b) {
  std::string out;
  for (const auto& s : subs) {
    ordered_json j;
    j["id"] = s.id;
    j["size"] = s.size();
    j["vertices"] = ordered_json::array();
    for (const auto& v : s.vertices) {
      j["vertices"].push_back({{"neuron", v.neuron}, {"spike_a", v.spike_a}, {"spike_b", v.spike_b}});
    }
    j["edges"] = ordered_json::array();
    for (const auto& e : s.edges) j["edges"].push_back({e.edge_a, e.edge_b});
    j["gnat_a"] = projection_host(decomp_a, s.spikes_a);
    j["gnat_b"] = projection_host(decomp_b, s.spikes_b);
    j["overlapping"] = s.overlapping;
    j["self_mirror"] = s.self_mirror;
    out += j.dump() + '\n';
  }
  return out;
}

std::vector<AnalogousSubthread> subthreads_from_jsonl(std::string_view text, bool self_mode, std::string_view source) {
  std::vector<AnalogousSubthread> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    out.push_back(parse_json(line, where, [&](const json& j) {
      AnalogousSubthread s;
      s.id = j.at("id").get<std::uint32_t>();
      for (const auto& v : j.at("vertices")) {
        s.vertices.push_back({v.at("neuron").get<NeuronId>(), v.at("spike_a").get<SpikeId>(), v.at("spike_b").get<SpikeId>()});
      }
      for (const auto& e : j.at("edges")) s.edges.push_back({e.at(0).get<EdgeId>(), e.at(1).get<EdgeId>()});
      s.self_mirror = j.value("self_mirror", false);
      if (j.at("size").get<std::size_t>() != s.vertices.size()) throw InputError(where + ": size does not match vertices");
      fill_projections(s, self_mode);
      return s;
    }));
  }
  return out;
}

std::string multigraph_to_csv(const GnatMultigraph& mg) {
  std::string out = "gnat_a,gnat_b,subthread_id,weight\n";
  for (const auto& e : mg.edges) {
    out += std::to_string(e.gnat_a) + ',' + std::to_string(e.gnat_b) + ',' + std::to_string(e.subthread_id) + ',' +
           std::to_string(e.weight) + '\n';
  }
  return out;
}

GnatMultigraph multigraph_from_csv(std::string_view text, std::size_t gnat_count, std::string_view source) {
  CsvReader reader(text, source, "gnat_a,gnat_b,subthread_id,weight");
  GnatMultigraph mg;
  mg.gnat_count = gnat_count;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    reader.expect_columns(f, 4);
    MultigraphEdge e;
    e.gnat_a = reader.number<GnatId>(f[0]);
    e.gnat_b = reader.number<GnatId>(f[1]);
    e.subthread_id = reader.number<std::uint32_t>(f[2]);
    e.weight = reader.number<std::uint64_t>(f[3]);
    e.self_loop = e.gnat_a == e.gnat_b;
    mg.edges.push_back(e);
  }
  return mg;
}

std::string classes_to_json(std::span<const GnatClass> classes) {
  ordered_json j = ordered_json::object();
  for (const auto& c : classes) j[std::to_string(c.id)] = c.gnats;
  return j.dump(1) + "\n";
}

std::vector<GnatClass> classes_from_json(std::string_view text, std::string_view source) {
  return parse_json(text, source, [&](const json& j) {
    std::vector<GnatClass> out;
    for (const auto& [key, members] : j.items()) {
      GnatClass c;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), c.id);
      if (ec != std::errc{} || ptr != key.data() + key.size()) {
        throw InputError(std::string(source) + ": invalid class id '" + key + "'");
      }
      c.gnats = members.get<std::vector<GnatId>>();
      out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const GnatClass& l, const GnatClass& r) { return l.id < r.id; });
    return out;
  });
}

namespace {

std::string interval_fields(const ClassInterval& iv) {
  return std::to_string(iv.gnat_id) + ',' + std::to_string(iv.class_id) + ',' + format_double(iv.t_start) + ',' +
         format_double(iv.t_end);
}

ClassInterval parse_interval(const CsvReader& r, const std::vector<std::string_view>& f) {
  return {r.number<GnatId>(f[0]), r.number<std::uint32_t>(f[1]), r.number<double>(f[2]), r.number<double>(f[3])};
}

}  // namespace

std::string intervals_to_csv(std::span<const ClassInterval> intervals) {
  std::string out = "gnat_id,class_id,t_start_ms,t_end_ms\n";
  for (const auto& iv : intervals) out += interval_fields(iv) + '\n';
  return out;
}

std::vector<ClassInterval> intervals_from_csv(std::string_view text, std::string_view source) {
  CsvReader reader(text, source, "gnat_id,class_id,t_start_ms,t_end_ms");
  std::vector<ClassInterval> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    reader.expect_columns(f, 4);
    out.push_back(parse_interval(reader, f));
  }
  return out;
}

std::string overlay_to_csv(std::span<const TrialInterval> overlay) {
  std::string out = "gnat_id,class_id,t_start_ms,t_end_ms,trial_index,rel_start_ms,rel_end_ms,clipped\n";
  for (const auto& t : overlay) {
    out += interval_fields(t.interval) + ',' + std::to_string(t.trial_index) + ',' + format_double(t.rel_start) + ',' +
           format_double(t.rel_end) + ',' + (t.clipped ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<TrialInterval> overlay_from_csv(std::string_view text, std::string_view source) {
  CsvReader reader(text, source, "gnat_id,class_id,t_start_ms,t_end_ms,trial_index,rel_start_ms,rel_end_ms,clipped");
  std::vector<TrialInterval> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    reader.expect_columns(f, 8);
    TrialInterval t;
    t.interval = parse_interval(reader, f);
    t.trial_index = reader.number<std::size_t>(f[4]);
    t.rel_start = reader.number<double>(f[5]);
    t.rel_end = reader.number<double>(f[6]);
    t.clipped = reader.boolean(f[7]);
    out.push_back(t);
  }
  return out;
}

}  // namespace gnat::io
