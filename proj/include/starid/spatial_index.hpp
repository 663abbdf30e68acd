#pragma once

// Circular R-tree: a static R-tree over projected interior circles, bulk
// loaded with Sort-Tile-Recursive packing. Exterior circles and half-planes are
// rare and are kept in a flat overflow list that every query scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "starid/projection.hpp"

namespace starid {

struct Rect {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  bool contains(const Rect& r) const {
    return r.lo.x() >= lo.x() && r.hi.x() <= hi.x() && r.lo.y() >= lo.y() && r.hi.y() <= hi.y();
  }
  Vec2 center() const { return 0.5 * (lo + hi); }
  void expand(const Rect& r) {
    lo = lo.cwiseMin(r.lo);
    hi = hi.cwiseMax(r.hi);
  }
};

/// Bounding box of a circle, padded by a few ulps so that any point the
/// circle predicate accepts is also accepted by the box predicate.
Rect bounding_rect(const InteriorCircle& c);

/// Conservative box-vs-query overlap used to prune subtrees.
bool rect_may_intersect(const Rect& r, const ProjectedPatch& q);

struct TreeQueryStats {
  std::size_t nodes_visited = 0;
  std::size_t leaves_visited = 0;
  std::size_t entries_tested = 0;
};

class CircularRTree {
 public:
  using Payload = std::uint32_t;

  static constexpr std::size_t kNodeCapacity = 8;
  static constexpr std::size_t kMinFill = 3;

  struct CircleEntry {
    InteriorCircle circle;
    Payload payload = 0;
  };
  struct PatchEntry {
    ProjectedPatch patch;
    Payload payload = 0;
  };
  /// Children of a node occupy [first, first + count) of nodes() for inner
  /// nodes and of circles() for leaves. The root is nodes()[0].
  struct Node {
    Rect box;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    bool leaf = true;
  };

  CircularRTree() = default;

  static CircularRTree build(std::vector<CircleEntry> circles, std::vector<PatchEntry> overflow = {});

  std::vector<Payload> query_point(const Vec2& p, TreeQueryStats* stats = nullptr) const;
  std::vector<Payload> query_patch(const ProjectedPatch& q, TreeQueryStats* stats = nullptr) const;

  /// Calls fn(payload) for every hit until fn returns false. Returns false
  /// iff the visit was cut short.
  template <class Fn>
  bool visit_point(const Vec2& p, Fn&& fn, TreeQueryStats* stats = nullptr) const;
  template <class Fn>
  bool visit_patch(const ProjectedPatch& q, Fn&& fn, TreeQueryStats* stats = nullptr) const;

  bool any_point(const Vec2& p) const {
    return !visit_point(p, [](Payload) { return false; });
  }
  bool any_patch(const ProjectedPatch& q) const {
    return !visit_patch(q, [](Payload) { return false; });
  }

  bool empty() const { return circles_.empty() && overflow_.empty(); }
  std::size_t height() const { return height_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const CircleEntry> circles() const { return circles_; }
  std::span<const PatchEntry> overflow() const { return overflow_; }

 private:
  template <class NodeTest, class EntryTest, class Fn>
  bool descend(std::uint32_t node, const NodeTest& node_test, const EntryTest& entry_test, Fn& fn,
               TreeQueryStats* stats) const;

  std::vector<Node> nodes_;
  std::vector<CircleEntry> circles_;
  std::vector<PatchEntry> overflow_;
  std::size_t height_ = 0;
};

template <class NodeTest, class EntryTest, class Fn>
bool CircularRTree::descend(std::uint32_t index, const NodeTest& node_test, const EntryTest& entry_test,
                            Fn& fn, TreeQueryStats* stats) const {
  const Node& node = nodes_[index];
  if (stats) ++stats->nodes_visited;
  if (!node_test(node.box)) return true;
  if (node.leaf) {
    if (stats) {
      ++stats->leaves_visited;
      stats->entries_tested += node.count;
    }
    for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
      if (entry_test(circles_[k].circle) && !fn(circles_[k].payload)) return false;
    }
    return true;
  }
  for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
    if (!descend(k, node_test, entry_test, fn, stats)) return false;
  }
  return true;
}

template <class Fn>
bool CircularRTree::visit_point(const Vec2& p, Fn&& fn, TreeQueryStats* stats) const {
  if (!nodes_.empty()) {
    const auto node_test = [&p](const Rect& r) { return r.contains(p); };
    const auto entry_test = [&p](const InteriorCircle& c) { return (p - c.center).norm() <= c.radius; };
    if (!descend(0, node_test, entry_test, fn, stats)) return false;
  }
  for (const PatchEntry& e : overflow_) {
    if (stats) ++stats->entries_tested;
    if (point_in_patch(p, e.patch) && !fn(e.payload)) return false;
  }
  return true;
}

namespace detail {

inline double rect_distance(const Rect& r, const Vec2& p) {
  const double dx = std::max({r.lo.x() - p.x(), 0.0, p.x() - r.hi.x()});
  const double dy = std::max({r.lo.y() - p.y(), 0.0, p.y() - r.hi.y()});
  return std::hypot(dx, dy);
}

inline double rect_max_distance(const Rect& r, const Vec2& p) {
  const double dx = std::max(std::abs(p.x() - r.lo.x()), std::abs(p.x() - r.hi.x()));
  const double dy = std::max(std::abs(p.y() - r.lo.y()), std::abs(p.y() - r.hi.y()));
  return std::hypot(dx, dy);
}

/// Signed distance span of a box along a half-plane normal, tested against the
/// plane's accepted side.
inline bool rect_meets_half_plane(const Rect& r, const HalfPlane& h) {
  const double ax = h.normal.x() * r.lo.x(), bx = h.normal.x() * r.hi.x();
  const double ay = h.normal.y() * r.lo.y(), by = h.normal.y() * r.hi.y();
  if (h.side == HalfPlaneSide::AtLeast) return std::max(ax, bx) + std::max(ay, by) - h.offset >= 0.0;
  return std::min(ax, bx) + std::min(ay, by) - h.offset < 0.0;
}

}  // namespace detail

template <class Fn>
bool CircularRTree::visit_patch(const ProjectedPatch& q, Fn&& fn, TreeQueryStats* stats) const {
  if (!nodes_.empty()) {
    bool completed = true;
    if (const auto* ic = std::get_if<InteriorCircle>(&q)) {
      const auto node_test = [ic](const Rect& r) { return detail::rect_distance(r, ic->center) <= ic->radius; };
      const auto entry_test = [ic](const InteriorCircle& c) {
        return (ic->center - c.center).norm() <= ic->radius + c.radius;
      };
      completed = descend(0, node_test, entry_test, fn, stats);
    } else if (const auto* ec = std::get_if<ExteriorCircle>(&q)) {
      const auto node_test = [ec](const Rect& r) {
        return detail::rect_max_distance(r, ec->center) >= ec->radius;
      };
      const auto entry_test = [ec](const InteriorCircle& c) {
        return disk_meets_exterior(c, *ec);
      };
      completed = descend(0, node_test, entry_test, fn, stats);
    } else {
      const HalfPlane& h = std::get<HalfPlane>(q);
      const auto node_test = [&h](const Rect& r) { return detail::rect_meets_half_plane(r, h); };
      const auto entry_test = [&h](const InteriorCircle& c) {
        return disk_meets_half_plane(c, h);
      };
      completed = descend(0, node_test, entry_test, fn, stats);
    }
    if (!completed) return false;
  }
  for (const PatchEntry& e : overflow_) {
    if (stats) ++stats->entries_tested;
    if (patch_intersects_patch(q, e.patch) && !fn(e.payload)) return false;
  }
  return true;
}

}  // namespace starid
