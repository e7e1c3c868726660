#include "gnat/modular_product.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gnat/model.hpp"

namespace gnat {

void SmallDigraph::add_edge(std::size_t u, std::size_t v) {
  if (u >= n_ || v >= n_) throw InputError("small digraph: vertex out of range");
  adj_[u * n_ + v] = 1;
}

std::size_t SmallDigraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

ModularProduct::ModularProduct(const SmallDigraph& g, const SmallDigraph& h)
    : g_size_(g.size()), h_size_(h.size()), size_(g.size() * h.size()) {
  if (size_ > kMaxProductVertices) {
    throw InputError("modular product of " + std::to_string(g_size_) + " x " + std::to_string(h_size_) +
                     " vertices exceeds " + std::to_string(kMaxProductVertices) +
                     "; exact clique search is intractable beyond toy sizes");
  }
  out_.assign(size_, Row{});
  mutual_.assign(size_, Row{});
  for (std::size_t u = 0; u < g_size_; ++u) {
    for (std::size_t v = 0; v < h_size_; ++v) {
      for (std::size_t u2 = 0; u2 < g_size_; ++u2) {
        if (u2 == u) continue;
        for (std::size_t v2 = 0; v2 < h_size_; ++v2) {
          if (v2 == v) continue;
          if (g.has_edge(u, u2) == h.has_edge(v, v2)) out_[vertex(u, v)].set(vertex(u2, v2));
        }
      }
    }
  }
  for (std::uint32_t p = 0; p < size_; ++p) {
    for (std::uint32_t q = 0; q < size_; ++q) {
      if (out_[p][q] && out_[q][p]) mutual_[p].set(q);
    }
  }
}

std::size_t ModularProduct::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : out_) total += row.count();
  return total;
}

namespace {

void bron_kerbosch(const ModularProduct& mp, std::vector<std::uint32_t>& r, ModularProduct::Row p,
                   ModularProduct::Row x, std::vector<std::vector<std::uint32_t>>& out) {
  if (p.none() && x.none()) {
    auto clique = r;
    std::sort(clique.begin(), clique.end());
    out.push_back(std::move(clique));
    return;
  }
  // Pivot: vertex of P u X with the most neighbours in P.
  std::size_t pivot = 0, best = 0;
  bool have_pivot = false;
  const auto candidates = p | x;
  for (std::size_t u = 0; u < mp.size(); ++u) {
    if (!candidates[u]) continue;
    const std::size_t c = (p & mp.neighbours(static_cast<std::uint32_t>(u))).count();
    if (!have_pivot || c > best) {
      pivot = u;
      best = c;
      have_pivot = true;
    }
  }
  const auto branch = p & ~mp.neighbours(static_cast<std::uint32_t>(pivot));
  for (std::size_t v = 0; v < mp.size(); ++v) {
    if (!branch[v]) continue;
    const auto& nv = mp.neighbours(static_cast<std::uint32_t>(v));
    r.push_back(static_cast<std::uint32_t>(v));
    bron_kerbosch(mp, r, p & nv, x & nv, out);
    r.pop_back();
    p.reset(v);
    x.set(v);
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> maximal_cliques(const ModularProduct& product) {
  std::vector<std::vector<std::uint32_t>> out;
  if (product.size() == 0) return out;
  ModularProduct::Row all;
  for (std::size_t v = 0; v < product.size(); ++v) all.set(v);
  std::vector<std::uint32_t> r;
  bron_kerbosch(product, r, all, ModularProduct::Row{}, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_clique(const ModularProduct& product, std::span<const std::uint32_t> vertices) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] >= product.size()) return false;
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      if (!product.adjacent(vertices[i], vertices[j])) return false;
    }
  }
  return true;
}

bool mapping_preserves_edges(const SmallDigraph& g, std::span<const std::size_t> gv, const SmallDigraph& h,
                             std::span<const std::size_t> hv) {
  if (gv.size() != hv.size()) return false;
  for (std::size_t i = 0; i < gv.size(); ++i) {
    for (std::size_t j = 0; j < gv.size(); ++j) {
      if (i == j) continue;
      if (g.has_edge(gv[i], gv[j]) != h.has_edge(hv[i], hv[j])) return false;
    }
  }
  return true;
}

bool induced_isomorphic(const SmallDigraph& g, std::span<const std::size_t> gv, const SmallDigraph& h,
                        std::span<const std::size_t> hv) {
  if (gv.size() != hv.size()) return false;
  if (gv.size() > 8) throw InputError("induced_isomorphic: exhaustive check limited to 8 vertices");
  std::vector<std::size_t> perm(hv.begin(), hv.end());
  std::sort(perm.begin(), perm.end());
  do {
    if (mapping_preserves_edges(g, gv, h, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::vector<CliqueMatch> cliques_as_isomorphisms(const SmallDigraph& g, const SmallDigraph& h) {
  const ModularProduct mp(g, h);
  std::vector<CliqueMatch> out;
  for (auto& clique : maximal_cliques(mp)) {
    CliqueMatch m;
    for (auto p : clique) {
      const auto [u, v] = mp.pair(p);
      m.g_vertices.push_back(u);
      m.h_vertices.push_back(v);
    }
    m.verified = mapping_preserves_edges(g, m.g_vertices, h, m.h_vertices) &&
                 (m.g_vertices.size() > 8 || induced_isomorphic(g, m.g_vertices, h, m.h_vertices));
    m.clique = std::move(clique);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace gnat
