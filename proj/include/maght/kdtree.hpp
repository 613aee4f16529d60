#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "maght/errors.hpp"

namespace maght {

// Fixed-dimension k-d tree supporting exact Euclidean radius search.
//
// Splits on the widest-spread dimension at the median, with ties on the
// split coordinate broken by point id so construction is deterministic for
// a given input order. Duplicate points are allowed and keep their own ids.
// The tree is immutable once built; queries are const and reentrant.
template <int D>
class KdTree {
 public:
  using Point = std::array<double, D>;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw EmptyInput("KdTree: empty point list");
    order_.resize(points_.size());
    for (int i = 0; i < static_cast<int>(points_.size()); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<int>(points_.size()));
  }

  int size() const { return static_cast<int>(points_.size()); }
  const Point& point(int id) const { return points_[id]; }

  // All ids whose Euclidean distance to `center` is <= radius (boundary
  // included), in ascending id order.
  std::vector<int> range_query(const Point& center, double radius) const {
    std::vector<int> out;
    if (radius < 0.0) return out;
    search(root_, center, radius, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;   // split coordinate; left holds <=, right holds >=
    int left = -1;        // child node index, or span begin for leaves
    int right = -1;       // child node index, or span end for leaves
  };

  int build(int lo, int hi) {
    Node node;
    if (hi - lo <= kLeafSize) {
      node.left = lo;
      node.right = hi;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    // Widest-spread dimension over the span.
    Point mins = points_[order_[lo]];
    Point maxs = mins;
    for (int i = lo + 1; i < hi; ++i) {
      const Point& p = points_[order_[i]];
      for (int d = 0; d < D; ++d) {
        mins[d] = std::min(mins[d], p[d]);
        maxs[d] = std::max(maxs[d], p[d]);
      }
    }
    int axis = 0;
    double spread = maxs[0] - mins[0];
    for (int d = 1; d < D; ++d) {
      if (maxs[d] - mins[d] > spread) {
        spread = maxs[d] - mins[d];
        axis = d;
      }
    }
    const int mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi, [&](int a, int b) {
                       const double ca = points_[a][axis];
                       const double cb = points_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    node.axis = axis;
    node.split = points_[order_[mid]][axis];
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(lo, mid);
    const int right = build(mid, hi);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  void search(int node_idx, const Point& center, double radius, double r2,
              std::vector<int>& out) const {
    const Node& node = nodes_[node_idx];
    if (node.axis < 0) {
      for (int i = node.left; i < node.right; ++i) {
        const int id = order_[i];
        const Point& p = points_[id];
        double s = 0.0;
        for (int d = 0; d < D; ++d) {
          const double diff = p[d] - center[d];
          s += diff * diff;
        }
        if (s <= r2) out.push_back(id);
      }
      return;
    }
    const double c = center[node.axis];
    if (c - radius <= node.split) search(node.left, center, radius, r2, out);
    if (c + radius >= node.split) search(node.right, center, radius, r2, out);
  }

  std::vector<Point> points_;
  std::vector<int> order_;  // permutation of ids, partitioned by the tree
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace maght
