#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace gnat {

/// Disjoint sets over dense ids with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }
  std::uint32_t component_size(std::uint32_t x) { return size_[find(x)]; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Union-find that also tracks a parity bit per element relative to its root,
/// i.e. a 2-colouring constraint system: unite(a, b, p) records
/// parity(a) xor parity(b) == p. A contradicting constraint marks the whole
/// component as conflicted instead of failing.
class ParityUnionFind {
 public:
  explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0), size_(n, 1), conflict_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  /// Root of x; `parity` receives x's parity relative to that root.
  std::uint32_t find(std::uint32_t x, std::uint8_t& parity) {
    std::uint8_t acc = 0;
    std::uint32_t root = x;
    while (parent_[root] != root) {
      acc ^= parity_[root];
      root = parent_[root];
    }
    // Compress: point every node on the path straight at the root.
    std::uint8_t remaining = acc;
    while (parent_[x] != root && parent_[x] != x) {
      const std::uint32_t next = parent_[x];
      const std::uint8_t own = parity_[x];
      parent_[x] = root;
      parity_[x] = remaining;
      remaining ^= own;
      x = next;
    }
    parity = acc;
    return root;
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint8_t ignored = 0;
    return find(x, ignored);
  }

  void unite(std::uint32_t a, std::uint32_t b, std::uint8_t relation) {
    std::uint8_t pa = 0, pb = 0;
    a = find(a, pa);
    b = find(b, pb);
    if (a == b) {
      if ((pa ^ pb) != relation) conflict_[a] = 1;
      return;
    }
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    parity_[b] = pa ^ pb ^ relation;
    size_[a] += size_[b];
    conflict_[a] = conflict_[a] | conflict_[b];
  }

  bool conflicted(std::uint32_t x) { return conflict_[find(x)] != 0; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> parity_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint8_t> conflict_;
};

}  // namespace gnat
