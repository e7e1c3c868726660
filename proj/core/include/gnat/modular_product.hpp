#pragma once

// Modular product of two small directed graphs. Cliques of the product (under
// mutual adjacency) are exactly the induced-subgraph isomorphisms between the
// two graphs. Enumeration is exponential, so this is only meant for toy
// inputs used to cross-check the second-order construction.

#include <bitset>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gnat {

class SmallDigraph {
 public:
  explicit SmallDigraph(std::size_t n = 0) : n_(n), adj_(n * n, 0) {}

  std::size_t size() const { return n_; }
  void add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const { return adj_[u * n_ + v] != 0; }
  std::size_t edge_count() const;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> adj_;
};

inline constexpr std::size_t kMaxProductVertices = 400;

class ModularProduct {
 public:
  using Row = std::bitset<kMaxProductVertices>;

  /// Throws InputError when |V_G| * |V_H| exceeds kMaxProductVertices.
  ModularProduct(const SmallDigraph& g, const SmallDigraph& h);

  std::size_t size() const { return size_; }
  std::size_t g_size() const { return g_size_; }
  std::size_t h_size() const { return h_size_; }
  std::uint32_t vertex(std::size_t u, std::size_t v) const { return static_cast<std::uint32_t>(u * h_size_ + v); }
  std::pair<std::size_t, std::size_t> pair(std::uint32_t p) const { return {p / h_size_, p % h_size_}; }

  /// Directed product edge p -> q.
  bool has_edge(std::uint32_t p, std::uint32_t q) const { return out_[p][q]; }
  /// p -> q and q -> p.
  bool adjacent(std::uint32_t p, std::uint32_t q) const { return mutual_[p][q]; }
  const Row& neighbours(std::uint32_t p) const { return mutual_[p]; }
  std::size_t edge_count() const;

 private:
  std::size_t g_size_ = 0, h_size_ = 0, size_ = 0;
  std::vector<Row> out_;
  std::vector<Row> mutual_;
};

/// Maximal cliques under mutual adjacency (Bron-Kerbosch with pivoting), each
/// sorted, in lexicographic order.
std::vector<std::vector<std::uint32_t>> maximal_cliques(const ModularProduct& product);

bool is_clique(const ModularProduct& product, std::span<const std::uint32_t> vertices);

/// Whether mapping gv[i] -> hv[i] preserves both edges and non-edges.
bool mapping_preserves_edges(const SmallDigraph& g, std::span<const std::size_t> gv, const SmallDigraph& h,
                             std::span<const std::size_t> hv);

/// Exhaustive check over all bijections between the two vertex lists. Lists
/// longer than 8 are rejected with InputError.
bool induced_isomorphic(const SmallDigraph& g, std::span<const std::size_t> gv, const SmallDigraph& h,
                        std::span<const std::size_t> hv);

struct CliqueMatch {
  std::vector<std::uint32_t> clique;
  std::vector<std::size_t> g_vertices;  // g_vertices[i] pairs with h_vertices[i]
  std::vector<std::size_t> h_vertices;
  bool verified = false;
};

std::vector<CliqueMatch> cliques_as_isomorphisms(const SmallDigraph& g, const SmallDigraph& h);

}  // namespace gnat
