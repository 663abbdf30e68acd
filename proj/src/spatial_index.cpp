#include "starid/spatial_index.hpp"

#include <numeric>

namespace starid {

namespace {

using Group = std::pair<std::size_t, std::size_t>;  // [begin, end) into the order

/// Splits [begin, end) into `parts` contiguous runs whose sizes differ by at most one.
void balanced_split(std::size_t begin, std::size_t end, std::size_t parts, std::vector<Group>& out) {
  const std::size_t n = end - begin;
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  std::size_t at = begin;
  for (std::size_t k = 0; k < parts; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out.emplace_back(at, at + len);
    at += len;
  }
}

/// Sort-Tile-Recursive packing. Reorders `order` (indices into `keys`) and
/// returns the node groups. Slabs and groups are balanced so that no group
/// falls below the minimum fill when there is more than one group.
std::vector<Group> str_pack(std::vector<std::uint32_t>& order, const std::vector<Vec2>& keys,
                            std::size_t capacity) {
  const std::size_t n = order.size();
  std::vector<Group> groups;
  if (n <= capacity) {
    groups.emplace_back(0, n);
    return groups;
  }
  const std::size_t leaves = (n + capacity - 1) / capacity;
  const auto slabs = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));

  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return keys[a].x() < keys[b].x(); });
  std::vector<Group> slab_ranges;
  balanced_split(0, n, slabs, slab_ranges);
  for (const auto& [b, e] : slab_ranges) {
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(b), order.begin() + static_cast<std::ptrdiff_t>(e),
              [&](std::uint32_t x, std::uint32_t y) { return keys[x].y() < keys[y].y(); });
    const std::size_t parts = (e - b + capacity - 1) / capacity;
    balanced_split(b, e, parts, groups);
  }
  return groups;
}

}  // namespace

Rect bounding_rect(const InteriorCircle& c) {
  const double pad = 1e-12 * (1.0 + std::abs(c.center.x()) + std::abs(c.center.y()) + c.radius);
  const Vec2 ext = Vec2::Constant(c.radius + pad);
  return Rect{c.center - ext, c.center + ext};
}

bool rect_may_intersect(const Rect& r, const ProjectedPatch& q) {
  if (const auto* ic = std::get_if<InteriorCircle>(&q)) {
    return detail::rect_distance(r, ic->center) <= ic->radius;
  }
  if (const auto* ec = std::get_if<ExteriorCircle>(&q)) {
    return detail::rect_max_distance(r, ec->center) >= ec->radius;
  }
  return detail::rect_meets_half_plane(r, std::get<HalfPlane>(q));
}

CircularRTree CircularRTree::build(std::vector<CircleEntry> circles, std::vector<PatchEntry> overflow) {
  CircularRTree tree;
  tree.overflow_ = std::move(overflow);
  if (circles.empty()) return tree;

  // Leaf level.
  std::vector<Vec2> keys(circles.size());
  for (std::size_t k = 0; k < circles.size(); ++k) keys[k] = circles[k].circle.center;
  std::vector<std::uint32_t> order(circles.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<Group> groups = str_pack(order, keys, kNodeCapacity);

  tree.circles_.reserve(circles.size());
  for (std::uint32_t idx : order) tree.circles_.push_back(circles[idx]);

  std::vector<std::vector<Node>> levels;
  std::vector<Node> level;
  for (const auto& [b, e] : groups) {
    Node node;
    node.leaf = true;
    node.first = static_cast<std::uint32_t>(b);
    node.count = static_cast<std::uint32_t>(e - b);
    node.box = bounding_rect(tree.circles_[b].circle);
    for (std::size_t k = b + 1; k < e; ++k) node.box.expand(bounding_rect(tree.circles_[k].circle));
    level.push_back(node);
  }

  // Inner levels; `first` temporarily indexes into the child level.
  while (level.size() > 1) {
    keys.resize(level.size());
    for (std::size_t k = 0; k < level.size(); ++k) keys[k] = level[k].box.center();
    order.resize(level.size());
    std::iota(order.begin(), order.end(), 0u);
    groups = str_pack(order, keys, kNodeCapacity);

    std::vector<Node> sorted;
    sorted.reserve(level.size());
    for (std::uint32_t idx : order) sorted.push_back(level[idx]);

    std::vector<Node> parents;
    for (const auto& [b, e] : groups) {
      Node node;
      node.leaf = false;
      node.first = static_cast<std::uint32_t>(b);
      node.count = static_cast<std::uint32_t>(e - b);
      node.box = sorted[b].box;
      for (std::size_t k = b + 1; k < e; ++k) node.box.expand(sorted[k].box);
      parents.push_back(node);
    }
    levels.push_back(std::move(sorted));
    level = std::move(parents);
  }
  levels.push_back(std::move(level));

  // Flatten root-first and rebase child offsets.
  tree.height_ = levels.size();
  std::vector<std::size_t> offset(levels.size());
  std::size_t at = 0;
  for (std::size_t k = levels.size(); k-- > 0;) {
    offset[k] = at;
    at += levels[k].size();
  }
  tree.nodes_.reserve(at);
  for (std::size_t k = levels.size(); k-- > 0;) {
    for (Node node : levels[k]) {
      if (!node.leaf) node.first += static_cast<std::uint32_t>(offset[k - 1]);
      tree.nodes_.push_back(node);
    }
  }
  return tree;
}

std::vector<CircularRTree::Payload> CircularRTree::query_point(const Vec2& p, TreeQueryStats* stats) const {
  std::vector<Payload> out;
  visit_point(p, [&out](Payload id) {
    out.push_back(id);
    return true;
  }, stats);
  return out;
}

std::vector<CircularRTree::Payload> CircularRTree::query_patch(const ProjectedPatch& q,
                                                               TreeQueryStats* stats) const {
  std::vector<Payload> out;
  visit_patch(q, [&out](Payload id) {
    out.push_back(id);
    return true;
  }, stats);
  return out;
}

}  // namespace starid
