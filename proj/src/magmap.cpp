#include "maght/magmap.hpp"

#include <algorithm>
#include <cmath>

#include "maght/errors.hpp"

namespace maght {

namespace {

// Unit constant turning moment/r^3 into microtesla; moments are expressed
// directly in microtesla * m^3.
constexpr double kDipoleUnit = 1.0;

// Fence-post sample count along one axis: positions x0, x0 + step, ... <= x1,
// tolerant of the extent being a float-imprecise multiple of the step.
int axis_count(double extent, double step) {
  return static_cast<int>(std::floor(extent / step + 1e-9)) + 1;
}

}  // namespace

bool DipoleWorld::clear_of_dipoles(const Vec3& p) const {
  const double r2 = exclusion_radius * exclusion_radius;
  for (const Dipole& d : dipoles) {
    const Vec3 r = p - d.position;
    if (r.dot(r) < r2) return false;
  }
  return true;
}

Vec3 dipole_field(const DipoleWorld& world, const Vec3& p) {
  Vec3 b = world.earth_field;
  const double excl2 = world.exclusion_radius * world.exclusion_radius;
  for (const Dipole& d : world.dipoles) {
    const Vec3 r = p - d.position;
    const double r2 = r.dot(r);
    if (r2 < excl2) {
      throw SingularEvaluation("dipole_field: query inside exclusion zone");
    }
    const double rn = std::sqrt(r2);
    const Vec3 rhat = r / rn;
    const double mr = d.moment.dot(rhat);
    b += (rhat * (3.0 * mr) - d.moment) * (kDipoleUnit / (r2 * rn));
  }
  return b;
}

Vec3 interpolate(const GriddedField& grid, const Vec3& p) {
  struct Axis {
    int i0;
    int i1;
    double frac;
  };
  const auto resolve = [](double coord, double origin, double step,
                          int n) -> Axis {
    if (n == 1) return {0, 0, 0.0};
    const double u = (coord - origin) / step;
    if (u < -1e-9 || u > n - 1 + 1e-9) {
      throw OutOfBounds("interpolate: point outside sampled volume");
    }
    int i0 = static_cast<int>(std::floor(u));
    i0 = std::clamp(i0, 0, n - 2);
    return {i0, i0 + 1, std::clamp(u - i0, 0.0, 1.0)};
  };

  const Axis ax = resolve(p.x, grid.origin.x, grid.step.x, grid.nx);
  const Axis ay = resolve(p.y, grid.origin.y, grid.step.y, grid.ny);
  const Axis az = resolve(p.z, grid.origin.z, grid.step.z, grid.nz);

  Vec3 out;
  for (int dz = 0; dz < 2; ++dz) {
    const int k = dz ? az.i1 : az.i0;
    const double wz = dz ? az.frac : 1.0 - az.frac;
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const int j = dy ? ay.i1 : ay.i0;
      const double wy = dy ? ay.frac : 1.0 - ay.frac;
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const int i = dx ? ax.i1 : ax.i0;
        const double wx = dx ? ax.frac : 1.0 - ax.frac;
        if (wx == 0.0) continue;
        out += grid.at(i, j, k) * (wx * wy * wz);
      }
    }
  }
  return out;
}

namespace {

// Evaluates the field at a candidate node; returns false when the node must
// be dropped (masked out or inside a dipole exclusion zone).
bool make_node(const FieldFn& field, const NodeMask& mask, const Vec3& p,
               double horizontal_floor, MapNode& out) {
  if (mask && !mask(p)) return false;
  Vec3 m;
  try {
    m = field(p);
  } catch (const SingularEvaluation&) {
    return false;
  }
  out.position = p;
  out.m = m;
  out.feature = extract_feature(m);
  out.frame = magnetic_frame(p, m, horizontal_floor);
  return true;
}

}  // namespace

MagneticMap discretize(const FieldFn& field, const Bounds& bounds,
                       double lambda, LatticeMode mode, const NodeMask& mask,
                       double horizontal_floor) {
  if (lambda <= 0.0) throw EmptyBounds("discretize: lambda must be positive");
  const Vec3 ext = bounds.extent();
  if (ext.x < 0.0 || ext.y < 0.0 || ext.z < 0.0 ||
      (ext.x == 0.0 && ext.y == 0.0)) {
    throw EmptyBounds("discretize: degenerate bounds");
  }

  MagneticMap map;
  map.lattice_step = lambda;
  map.mode = mode;
  map.bounds = bounds;

  MapNode node;
  if (mode == LatticeMode::planar) {
    const int nx = axis_count(ext.x, lambda);
    const int ny = axis_count(ext.y, lambda);
    const double z = bounds.center().z;

    GriddedField grid;
    grid.origin = {bounds.min.x, bounds.min.y, z};
    grid.step = {lambda, lambda, lambda};
    grid.nx = nx;
    grid.ny = ny;
    grid.nz = 1;
    grid.values.reserve(static_cast<size_t>(nx) * ny);

    bool complete = true;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Vec3 p{bounds.min.x + i * lambda, bounds.min.y + j * lambda, z};
        if (make_node(field, mask, p, horizontal_floor, node)) {
          map.nodes.push_back(node);
          grid.values.push_back(node.m);
        } else {
          complete = false;
        }
      }
    }
    // The regular grid only backs interpolation when no node was dropped.
    if (complete) map.grid = std::move(grid);
  } else {
    // Checkerboard columns of the cubic lambda grid shifted up by lambda/2:
    // the body-centered orthorhombic (lambda*sqrt(2), lambda*sqrt(2), lambda)
    // lattice, at exactly the cubic grid's node count.
    const int nx = axis_count(ext.x, lambda);
    const int ny = axis_count(ext.y, lambda);
    const int nz = axis_count(ext.z, lambda);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double shift = ((i + j) % 2 != 0) ? 0.5 * lambda : 0.0;
        for (int k = 0; k < nz; ++k) {
          const Vec3 p{bounds.min.x + i * lambda, bounds.min.y + j * lambda,
                       bounds.min.z + k * lambda + shift};
          if (make_node(field, mask, p, horizontal_floor, node)) {
            map.nodes.push_back(node);
          }
        }
      }
    }
  }
  return map;
}

void build_feature_index(MagneticMap& map) {
  std::vector<KdTree<2>::Point> features;
  map.index_to_node.clear();
  for (int i = 0; i < static_cast<int>(map.nodes.size()); ++i) {
    if (!map.nodes[i].frame) continue;
    features.push_back(map.nodes[i].feature.as_array());
    map.index_to_node.push_back(i);
  }
  if (features.empty()) {
    throw NoValidNodes("build_feature_index: every node is degenerate");
  }
  map.feature_index.emplace(std::move(features));
}

}  // namespace maght
