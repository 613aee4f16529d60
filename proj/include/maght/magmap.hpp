#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "maght/geometry.hpp"
#include "maght/kdtree.hpp"

namespace maght {

// Yaw-invariant magnetic feature: horizontal field magnitude and signed
// vertical component, both in microtesla.
struct MagFeature {
  double h = 0.0;  // |m_xy|, >= 0
  double v = 0.0;  // m_z

  std::array<double, 2> as_array() const { return {h, v}; }
};

inline MagFeature extract_feature(const Vec3& m) {
  return {m.horizontal_norm(), m.z};
}

inline double feature_distance(const MagFeature& a, const MagFeature& b) {
  return std::hypot(a.h - b.h, a.v - b.v);
}

// Axis-aligned box, meters.
struct Bounds {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  bool contains_xy(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
};

struct Dipole {
  Vec3 position;  // meters
  Vec3 moment;    // scaled so fields come out in microtesla at meter range
};

// Synthetic magnetic world: a uniform earth field plus point-dipole
// anomalies. Field evaluation diverges as 1/r^3 near a dipole, so queries
// inside exclusion_radius are refused rather than returned.
struct DipoleWorld {
  Vec3 earth_field;  // microtesla
  std::vector<Dipole> dipoles;
  Bounds bounds;
  double exclusion_radius = 0.5;  // meters

  bool clear_of_dipoles(const Vec3& p) const;
};

// Superposed field at p, in microtesla. Throws SingularEvaluation when p is
// within the exclusion radius of any dipole.
Vec3 dipole_field(const DipoleWorld& world, const Vec3& p);

// Regular axis-aligned sample grid of field vectors; the continuous field
// handle backing interpolation. Axes with a single sample layer are treated
// as free (the value is constant along them), which is how planar maps
// answer queries at any z.
struct GriddedField {
  Vec3 origin;
  Vec3 step;  // per-axis spacing; ignored on single-layer axes
  int nx = 0, ny = 0, nz = 0;
  std::vector<Vec3> values;  // x-major, then y, then z

  const Vec3& at(int i, int j, int k) const {
    return values[(static_cast<size_t>(k) * ny + j) * nx + i];
  }
};

// Component-wise trilinear interpolation. Throws OutOfBounds when p lies
// outside the sampled hull (multi-layer axes only).
Vec3 interpolate(const GriddedField& grid, const Vec3& p);

enum class LatticeMode { planar, volumetric };

struct MapNode {
  Vec3 position;
  Vec3 m;  // field at the node, microtesla
  MagFeature feature;
  std::optional<GravityPose> frame;  // T_w,h; absent when the horizontal
                                     // field is below the degeneracy floor
};

using FieldFn = std::function<Vec3(const Vec3&)>;
using NodeMask = std::function<bool(const Vec3&)>;

// Lattice of positioned field vectors plus the feature-space search index.
// Immutable once indexed; concurrent relocalization queries may share it.
struct MagneticMap {
  double lattice_step = 0.0;  // lambda, meters
  LatticeMode mode = LatticeMode::planar;
  Bounds bounds;
  std::vector<MapNode> nodes;

  // Populated by build_feature_index: 2-D tree over (h, v) of the
  // non-degenerate nodes; index_to_node maps tree ids back to nodes.
  std::optional<KdTree<2>> feature_index;
  std::vector<int> index_to_node;

  // Regular sample grid for continuous queries; planar mode only (the
  // volumetric body-centered lattice is not a regular grid).
  std::optional<GriddedField> grid;

  bool indexed() const { return feature_index.has_value(); }
};

// Samples `field` over `bounds` on a lattice of parameter lambda.
//
// Planar mode places a square grid of step lambda at the vertical center of
// the bounds. Volumetric mode builds the body-centered orthorhombic lattice
// (lambda*sqrt(2), lambda*sqrt(2), lambda): columns whose horizontal index
// parity (i + j) is odd are shifted upward by lambda/2, which halves the
// effective vertical spacing at the node density of a cubic lambda grid.
//
// Nodes where `mask` returns false, or where the field evaluation reports
// SingularEvaluation, are dropped. Nodes with a near-vertical field are kept
// but flagged degenerate (no frame) and stay out of the feature index.
MagneticMap discretize(const FieldFn& field, const Bounds& bounds,
                       double lambda, LatticeMode mode,
                       const NodeMask& mask = nullptr,
                       double horizontal_floor = 0.05);

// Builds the (h, v) feature tree and checks node frames are present.
// Throws NoValidNodes when every node is degenerate.
void build_feature_index(MagneticMap& map);

}  // namespace maght
