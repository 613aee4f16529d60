#pragma once

#include <array>
#include <deque>
#include <vector>

#include "maght/kdtree.hpp"

namespace maght {

// Per-point DBSCAN assignment. Cluster ids are dense, starting at 0 in the
// order clusters are discovered; noise points carry kNoise.
struct ClusterLabels {
  static constexpr int kNoise = -1;

  std::vector<int> labels;
  std::vector<bool> core;
  int num_clusters = 0;
};

// DBSCAN with closed eps-neighborhoods (<= eps, the point itself counted
// toward minpts). Cluster expansion starts from the lowest-index unvisited
// core point and proceeds breadth-first over neighbor lists in ascending id
// order, so border points contested between clusters resolve the same way
// on every run.
template <int D>
ClusterLabels dbscan(const std::vector<std::array<double, D>>& points,
                     double eps, int minpts) {
  constexpr int kUndef = -2;
  ClusterLabels result;
  const int n = static_cast<int>(points.size());
  if (n == 0) return result;

  result.labels.assign(n, kUndef);
  result.core.assign(n, false);

  const KdTree<D> index(points);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) {
    if (result.labels[i] != kUndef) continue;
    std::vector<int> neighbors = index.range_query(points[i], eps);
    if (static_cast<int>(neighbors.size()) < minpts) {
      result.labels[i] = ClusterLabels::kNoise;
      continue;
    }
    const int cluster = result.num_clusters++;
    result.labels[i] = cluster;
    result.core[i] = true;
    queue.assign(neighbors.begin(), neighbors.end());
    while (!queue.empty()) {
      const int j = queue.front();
      queue.pop_front();
      if (result.labels[j] == ClusterLabels::kNoise) {
        result.labels[j] = cluster;  // border point, already known non-core
        continue;
      }
      if (result.labels[j] != kUndef) continue;
      result.labels[j] = cluster;
      std::vector<int> reach = index.range_query(points[j], eps);
      if (static_cast<int>(reach.size()) >= minpts) {
        result.core[j] = true;
        queue.insert(queue.end(), reach.begin(), reach.end());
      }
    }
  }
  return result;
}

}  // namespace maght
