#pragma once

// Relations between GNATs: a multigraph with one edge per analogous subthread
// joining the GNATs that host its two projections, classes of GNATs cut from
// it, and the time intervals those classes occupy.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gnat/analogs.hpp"
#include "gnat/threads.hpp"

namespace gnat {

struct MultigraphEdge {
  GnatId gnat_a = 0;
  GnatId gnat_b = 0;
  std::uint32_t subthread_id = 0;
  std::uint64_t weight = 0;  // subthread size
  bool self_loop = false;

  friend bool operator==(const MultigraphEdge&, const MultigraphEdge&) = default;
};

struct GnatMultigraph {
  std::size_t gnat_count = 0;
  std::vector<MultigraphEdge> edges;  // in subthread order
};

/// Uses the `top_k` largest subthreads (they arrive sorted largest first).
/// Throws InternalError when a projection is not contained in one GNAT.
GnatMultigraph build_multigraph(const GnatDecomposition& decomp, std::span<const AnalogousSubthread> subthreads,
                                std::size_t top_k = 2000);

enum class ClassMethod { Components, Modularity };

ClassMethod parse_class_method(std::string_view text);
std::string_view to_string(ClassMethod method);

struct ClassOptions {
  ClassMethod method = ClassMethod::Components;
  std::uint64_t min_edge_weight = 15;
  bool include_self_loops = false;
};

struct GnatClass {
  std::uint32_t id = 0;
  std::vector<GnatId> gnats;                // ascending
  std::vector<std::uint32_t> subthreads;    // ascending
};

/// Components: connected components over the kept edges (weight >=
/// min_edge_weight, self-loops only when included). Modularity: greedy
/// agglomeration of the weight-aggregated simple graph over the same edges.
/// Only GNATs touched by a kept edge are classified; classes are numbered in
/// order of their smallest GNAT id.
std::vector<GnatClass> extract_classes(const GnatMultigraph& mg, const ClassOptions& opts = {});

struct ClassInterval {
  GnatId gnat_id = 0;
  std::uint32_t class_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;

  friend bool operator==(const ClassInterval&, const ClassInterval&) = default;
};

/// One interval per classified GNAT, sorted by (t_start, gnat_id).
std::vector<ClassInterval> class_intervals(std::span<const GnatClass> classes, const GnatDecomposition& decomp);

struct TrialInterval {
  std::size_t trial_index = 0;
  ClassInterval interval;  // absolute times, as given
  double rel_start = 0.0;
  double rel_end = 0.0;
  bool clipped = false;

  friend bool operator==(const TrialInterval&, const TrialInterval&) = default;
};

/// Intervals intersecting [start, start + trial_length) of each trial, clipped
/// to it and shifted to trial-relative time. Ordered by trial, then interval.
std::vector<TrialInterval> trial_overlay(std::span<const ClassInterval> intervals, std::span<const double> trial_starts,
                                         double trial_length);

}  // namespace gnat
