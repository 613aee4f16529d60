#pragma once

// Independent reference implementations the unit and acceptance suites
// check the library against. Everything here is deliberately brute force
// and shares no code path with the implementations under test.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "maght/geometry.hpp"

namespace oracle {

// 4x4 homogeneous transform limited to z-axis rotations; the reference for
// GravityPose composition and inversion.
struct Hom4 {
  // row-major 4x4
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  static Hom4 from_pose(const maght::GravityPose& p) {
    Hom4 h;
    const double c = std::cos(p.psi);
    const double s = std::sin(p.psi);
    h.m = {c, -s, 0, p.x, s, c, 0, p.y, 0, 0, 1, p.z, 0, 0, 0, 1};
    return h;
  }

  Hom4 operator*(const Hom4& o) const {
    Hom4 r;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += m[i * 4 + k] * o.m[k * 4 + j];
        r.m[i * 4 + j] = acc;
      }
    }
    return r;
  }

  // Rigid inverse: R^T, -R^T t.
  Hom4 inverse() const {
    Hom4 r;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r.m[i * 4 + j] = m[j * 4 + i];
    }
    for (int i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j) acc += r.m[i * 4 + j] * m[j * 4 + 3];
      r.m[i * 4 + 3] = -acc;
    }
    r.m[12] = r.m[13] = r.m[14] = 0.0;
    r.m[15] = 1.0;
    return r;
  }

  maght::Vec3 translation() const { return {m[3], m[7], m[11]}; }
  double yaw() const { return std::atan2(m[4], m[0]); }

  maght::Vec3 apply(const maght::Vec3& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
            m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
            m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
  }
};

inline double pose_gap(const maght::GravityPose& a, const Hom4& b) {
  const maght::Vec3 dt = a.translation() - b.translation();
  return std::max(dt.norm(), std::abs(maght::wrap_pi(a.psi - b.yaw())));
}

// Linear-scan radius search; the reference for KdTree::range_query.
template <size_t D>
std::vector<int> brute_force_range(
    const std::vector<std::array<double, D>>& points,
    const std::array<double, D>& center, double radius) {
  std::vector<int> out;
  const double r2 = radius * radius;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    double s = 0.0;
    for (size_t d = 0; d < D; ++d) {
      const double diff = points[i][d] - center[d];
      s += diff * diff;
    }
    if (s <= r2) out.push_back(i);
  }
  return out;
}

// Quadratic DBSCAN reference, straight from the textbook description.
struct RefDbscan {
  std::vector<int> labels;  // -1 noise
  std::vector<bool> core;
};

template <size_t D>
RefDbscan reference_dbscan(const std::vector<std::array<double, D>>& pts,
                           double eps, int minpts) {
  const int n = static_cast<int>(pts.size());
  const double eps2 = eps * eps;
  const auto neighbors = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t d = 0; d < D; ++d) {
        const double diff = pts[i][d] - pts[j][d];
        s += diff * diff;
      }
      if (s <= eps2) out.push_back(j);
    }
    return out;
  };

  RefDbscan r;
  r.labels.assign(n, -2);
  r.core.assign(n, false);
  for (int i = 0; i < n; ++i) {
    r.core[i] = static_cast<int>(neighbors(i).size()) >= minpts;
  }
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (r.labels[i] != -2) continue;
    if (!r.core[i]) {
      r.labels[i] = -1;
      continue;
    }
    const int cluster = next++;
    std::vector<int> stack{i};
    r.labels[i] = cluster;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      if (!r.core[p]) continue;
      for (int q : neighbors(p)) {
        if (r.labels[q] == -1) r.labels[q] = cluster;
        if (r.labels[q] == -2) {
          r.labels[q] = cluster;
          stack.push_back(q);
        }
      }
    }
  }
  return r;
}

// True when two labelings describe the same partition of the core points
// up to cluster renaming, and agree exactly on which points are noise
// (border ties may legitimately differ between implementations).
inline bool same_core_partition(const std::vector<int>& a,
                                const std::vector<bool>& core_a,
                                const std::vector<int>& b,
                                const std::vector<bool>& core_b) {
  if (a.size() != b.size() || core_a != core_b) return false;
  std::map<int, int> fwd, bwd;
  for (size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (!core_a[i] || a[i] < 0) continue;
    auto [it_f, fresh_f] = fwd.emplace(a[i], b[i]);
    if (!fresh_f && it_f->second != b[i]) return false;
    auto [it_b, fresh_b] = bwd.emplace(b[i], a[i]);
    if (!fresh_b && it_b->second != a[i]) return false;
  }
  return true;
}

}  // namespace oracle
