#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace gnat {

struct Rect {
  double x0, y0, x1, y1;  // closed box [x0, x1] x [y0, y1]

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool intersects(const Rect& o) const { return !(o.x0 > x1 || o.x1 < x0 || o.y0 > y1 || o.y1 < y0); }
};

/// Point-region quadtree holding values at 2-D points. Leaves split into four
/// quadrants once they exceed `capacity`, down to `max_depth`.
template <typename T>
class PointQuadtree {
 public:
  PointQuadtree(Rect bounds, std::size_t capacity = 16, int max_depth = 24)
      : root_(std::make_unique<Node>(bounds)), capacity_(capacity), max_depth_(max_depth) {}

  /// Points outside the bounds are ignored; returns whether the point was stored.
  bool insert(double x, double y, T value) {
    if (!root_->bounds.contains(x, y)) return false;
    insert(*root_, {x, y, std::move(value)}, 0);
    ++size_;
    return true;
  }

  /// Calls visit(x, y, value) for every stored point inside `query`.
  template <typename Visit>
  void query(const Rect& query, Visit&& visit) const {
    query_node(*root_, query, visit);
  }

  std::size_t size() const { return size_; }

 private:
  struct Item {
    double x, y;
    T value;
  };
  struct Node {
    explicit Node(Rect b) : bounds(b) {}
    Rect bounds;
    std::vector<Item> items;
    std::array<std::unique_ptr<Node>, 4> children;
    bool leaf() const { return !children[0]; }
  };

  static std::size_t quadrant(const Node& node, double x, double y) {
    const double mx = 0.5 * (node.bounds.x0 + node.bounds.x1);
    const double my = 0.5 * (node.bounds.y0 + node.bounds.y1);
    return (x > mx ? 1u : 0u) + (y > my ? 2u : 0u);
  }

  void split(Node& node) {
    const auto& b = node.bounds;
    const double mx = 0.5 * (b.x0 + b.x1);
    const double my = 0.5 * (b.y0 + b.y1);
    node.children[0] = std::make_unique<Node>(Rect{b.x0, b.y0, mx, my});
    node.children[1] = std::make_unique<Node>(Rect{mx, b.y0, b.x1, my});
    node.children[2] = std::make_unique<Node>(Rect{b.x0, my, mx, b.y1});
    node.children[3] = std::make_unique<Node>(Rect{mx, my, b.x1, b.y1});
    for (auto& item : node.items) {
      auto& child = *node.children[quadrant(node, item.x, item.y)];
      child.items.push_back(std::move(item));
    }
    node.items.clear();
  }

  void insert(Node& node, Item item, int depth) {
    Node* at = &node;
    while (!at->leaf()) {
      at = at->children[quadrant(*at, item.x, item.y)].get();
      ++depth;
    }
    at->items.push_back(std::move(item));
    if (at->items.size() > capacity_ && depth < max_depth_) split(*at);
  }

  template <typename Visit>
  static void query_node(const Node& node, const Rect& query, Visit& visit) {
    if (!node.bounds.intersects(query)) return;
    if (node.leaf()) {
      for (const auto& item : node.items) {
        if (query.contains(item.x, item.y)) visit(item.x, item.y, item.value);
      }
      return;
    }
    for (const auto& child : node.children) query_node(*child, query, visit);
  }

  std::unique_ptr<Node> root_;
  std::size_t capacity_;
  int max_depth_;
  std::size_t size_ = 0;
};

}  // namespace gnat
