#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gnat/model.hpp"
#include "gnat/modular_product.hpp"
#include "gnat/random.hpp"

namespace gnat {
namespace {

using Clique = std::vector<std::uint32_t>;

SmallDigraph path3() {
  SmallDigraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

SmallDigraph random_digraph(Rng& rng, std::size_t n, double p) {
  SmallDigraph g(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(p)) g.add_edge(u, v);
    }
  }
  return g;
}

TEST(ModularProduct, SingleEdgeWithItself) {
  SmallDigraph g(2);
  g.add_edge(0, 1);
  const ModularProduct mp(g, g);
  EXPECT_EQ(mp.size(), 4u);
  // (0,0) <-> (1,1) is the only consistent pairing; (0,1), (1,0) are isolated.
  EXPECT_TRUE(mp.adjacent(mp.vertex(0, 0), mp.vertex(1, 1)));
  EXPECT_FALSE(mp.adjacent(mp.vertex(0, 1), mp.vertex(1, 0)));
  EXPECT_EQ(mp.edge_count(), 2u);
  EXPECT_EQ(maximal_cliques(mp), (std::vector<Clique>{{0, 3}, {1}, {2}}));
}

TEST(ModularProduct, EdgelessAgainstComplete) {
  SmallDigraph g(2), h(2);
  h.add_edge(0, 1);
  h.add_edge(1, 0);
  const ModularProduct mp(g, h);
  EXPECT_EQ(mp.edge_count(), 0u);
  EXPECT_EQ(maximal_cliques(mp), (std::vector<Clique>{{0}, {1}, {2}, {3}}));
}

TEST(ModularProduct, EmptyGraph) {
  const ModularProduct mp(SmallDigraph(0), path3());
  EXPECT_EQ(mp.size(), 0u);
  EXPECT_TRUE(maximal_cliques(mp).empty());
}

TEST(ModularProduct, PathWithItself) {
  const auto g = path3();
  const auto matches = cliques_as_isomorphisms(g, g);
  std::size_t largest = 0;
  for (const auto& m : matches) {
    EXPECT_TRUE(m.verified);
    largest = std::max(largest, m.clique.size());
    if (m.clique.size() == 3) {
      EXPECT_EQ(m.g_vertices, (std::vector<std::size_t>{0, 1, 2}));
      EXPECT_EQ(m.h_vertices, (std::vector<std::size_t>{0, 1, 2}));
    }
  }
  EXPECT_EQ(largest, 3u);
  EXPECT_EQ(std::count_if(matches.begin(), matches.end(), [](const CliqueMatch& m) { return m.clique.size() == 3; }), 1);
}

TEST(ModularProduct, SizeBound) {
  EXPECT_NO_THROW(ModularProduct(SmallDigraph(20), SmallDigraph(20)));
  EXPECT_THROW(ModularProduct(SmallDigraph(21), SmallDigraph(20)), InputError);
}

TEST(InducedIsomorphic, Basics) {
  const auto g = path3();
  SmallDigraph h(3);
  h.add_edge(2, 1);
  h.add_edge(1, 0);
  const std::vector<std::size_t> all{0, 1, 2};
  EXPECT_TRUE(induced_isomorphic(g, all, h, all));
  EXPECT_FALSE(mapping_preserves_edges(g, all, h, all));
  SmallDigraph tri(3);
  tri.add_edge(0, 1);
  tri.add_edge(1, 2);
  tri.add_edge(0, 2);
  EXPECT_FALSE(induced_isomorphic(g, all, tri, all));
  const std::vector<std::size_t> nine{0, 1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_THROW(induced_isomorphic(SmallDigraph(9), nine, SmallDigraph(9), nine), InputError);
  EXPECT_THROW(SmallDigraph(2).add_edge(0, 2), InputError);
}

TEST(ModularProduct, CliquesAreInducedIsomorphisms) {
  Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = random_digraph(rng, 1 + rng.below(6), rng.uniform(0.1, 0.7));
    const auto h = random_digraph(rng, 1 + rng.below(6), rng.uniform(0.1, 0.7));
    const ModularProduct mp(g, h);
    for (const auto& m : cliques_as_isomorphisms(g, h)) {
      ASSERT_TRUE(is_clique(mp, m.clique));
      EXPECT_TRUE(m.verified) << "rep " << rep;
      EXPECT_TRUE(induced_isomorphic(g, m.g_vertices, h, m.h_vertices));
    }
  }
}

TEST(ModularProduct, InducedIsomorphismsAreCliques) {
  Rng rng(18);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.below(5);
    const auto g = random_digraph(rng, n, rng.uniform(0.1, 0.7));
    // h is a relabelled copy of g, so the relabelling restricted to any
    // subset is an induced isomorphism.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    SmallDigraph h(n);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (g.has_edge(u, v)) h.add_edge(perm[u], perm[v]);
      }
    }
    const ModularProduct mp(g, h);
    std::vector<std::uint32_t> clique;
    for (std::size_t u = 0; u < n; ++u) {
      if (rng.bernoulli(0.6)) clique.push_back(mp.vertex(u, perm[u]));
    }
    EXPECT_TRUE(is_clique(mp, clique)) << "rep " << rep;
    const auto cliques = maximal_cliques(mp);
    const auto full = std::max_element(cliques.begin(), cliques.end(),
                                       [](const Clique& a, const Clique& b) { return a.size() < b.size(); });
    ASSERT_NE(full, cliques.end());
    EXPECT_EQ(full->size(), n);
  }
}

}  // namespace
}  // namespace gnat
