#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "maght/errors.hpp"
#include "maght/magmap.hpp"

using namespace maght;

TEST_CASE("extract_feature: 3-4-5 and vertical field") {
  const MagFeature f = extract_feature({3.0, 4.0, 5.0});
  CHECK(f.h == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(f.v == 5.0);

  const MagFeature v = extract_feature({0.0, 0.0, -2.0});
  CHECK(v.h == 0.0);
  CHECK(v.v == -2.0);
}

TEST_CASE("extract_feature is yaw invariant") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> um(-50.0, 50.0);
  std::uniform_real_distribution<double> utheta(-kPi, kPi);
  for (int i = 0; i < 300; ++i) {
    const Vec3 m{um(rng), um(rng), um(rng)};
    const MagFeature a = extract_feature(m);
    const MagFeature b = extract_feature(rotate_z(utheta(rng), m));
    CHECK(a.h == doctest::Approx(b.h).epsilon(1e-12));
    CHECK(a.v == b.v);
  }
}

TEST_CASE("dipole_field: no dipoles means earth field everywhere") {
  DipoleWorld world;
  world.earth_field = {20.0, 0.0, -43.0};
  world.bounds = {{-10, -10, -10}, {10, 10, 10}};
  const Vec3 b = dipole_field(world, {3.0, -2.0, 1.0});
  CHECK(b.x == 20.0);
  CHECK(b.y == 0.0);
  CHECK(b.z == -43.0);
}

TEST_CASE("dipole_field: axial closed form and inverse-cube decay") {
  DipoleWorld world;
  world.earth_field = {0.0, 0.0, 0.0};
  world.bounds = {{-10, -10, -10}, {10, 10, 10}};
  world.dipoles.push_back({{0, 0, 0}, {0, 0, 8.0}});

  // On the dipole axis: B = 2 m / d^3 along the moment.
  const Vec3 at2 = dipole_field(world, {0, 0, 2.0});
  CHECK(at2.x == doctest::Approx(0.0));
  CHECK(at2.y == doctest::Approx(0.0));
  CHECK(at2.z == doctest::Approx(2.0 * 8.0 / 8.0).epsilon(1e-12));

  const Vec3 at4 = dipole_field(world, {0, 0, 4.0});
  CHECK(at4.z == doctest::Approx(at2.z / 8.0).epsilon(1e-12));
}

TEST_CASE("dipole_field refuses queries inside the exclusion zone") {
  DipoleWorld world;
  world.bounds = {{-10, -10, -10}, {10, 10, 10}};
  world.dipoles.push_back({{1.0, 1.0, 1.0}, {0, 0, 5.0}});
  CHECK_THROWS_AS(dipole_field(world, {1.2, 1.0, 1.0}), SingularEvaluation);
  CHECK(world.clear_of_dipoles({3.0, 1.0, 1.0}));
  CHECK(!world.clear_of_dipoles({1.1, 1.0, 1.0}));
}

namespace {

// Affine field: trilinear interpolation must reproduce it exactly.
Vec3 affine_field(const Vec3& p) {
  return {1.0 + 2.0 * p.x - 0.5 * p.y + 0.25 * p.z,
          -3.0 + 0.1 * p.x + 1.5 * p.y - 2.0 * p.z,
          4.0 - 1.0 * p.x + 0.75 * p.y + 0.5 * p.z};
}

GriddedField affine_grid() {
  GriddedField g;
  g.origin = {-1.0, -2.0, 0.0};
  g.step = {0.5, 0.5, 0.5};
  g.nx = 9;
  g.ny = 11;
  g.nz = 5;
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        g.values.push_back(affine_field(
            {g.origin.x + i * g.step.x, g.origin.y + j * g.step.y,
             g.origin.z + k * g.step.z}));
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("interpolate: exact at nodes, mean at midpoints, affine exact") {
  const GriddedField g = affine_grid();

  const Vec3 node = interpolate(g, {g.origin.x + 2 * 0.5, g.origin.y, 0.5});
  const Vec3 want = g.at(2, 0, 1);
  CHECK(node.x == want.x);
  CHECK(node.y == want.y);
  CHECK(node.z == want.z);

  const Vec3 mid = interpolate(g, {g.origin.x + 0.25, g.origin.y, 0.0});
  const Vec3 a = g.at(0, 0, 0);
  const Vec3 b = g.at(1, 0, 0);
  CHECK(mid.x == doctest::Approx(0.5 * (a.x + b.x)).epsilon(1e-15));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ux(-1.0, 3.0);
  std::uniform_real_distribution<double> uy(-2.0, 3.0);
  std::uniform_real_distribution<double> uz(0.0, 2.0);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p{ux(rng), uy(rng), uz(rng)};
    const Vec3 got = interpolate(g, p);
    const Vec3 exact = affine_field(p);
    CHECK(std::abs(got.x - exact.x) < 1e-9);
    CHECK(std::abs(got.y - exact.y) < 1e-9);
    CHECK(std::abs(got.z - exact.z) < 1e-9);
  }

  CHECK_THROWS_AS(interpolate(g, {100.0, 0.0, 0.5}), OutOfBounds);
}

TEST_CASE("interpolate: single-layer axis is free") {
  GriddedField g;
  g.origin = {0, 0, 1.5};
  g.step = {1.0, 1.0, 1.0};
  g.nx = 2;
  g.ny = 2;
  g.nz = 1;
  g.values = {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}};
  const Vec3 lo = interpolate(g, {0.5, 0.5, -10.0});
  const Vec3 hi = interpolate(g, {0.5, 0.5, 42.0});
  CHECK(lo.x == hi.x);
  CHECK(lo.x == doctest::Approx(2.5).epsilon(1e-15));
}

namespace {

FieldFn uniform_field(const Vec3& value) {
  return [value](const Vec3&) { return value; };
}

}  // namespace

TEST_CASE("discretize planar: fence-post node count") {
  const Bounds b{{0, 0, 1.5}, {10, 10, 1.5}};
  const MagneticMap map =
      discretize(uniform_field({20, 0, -43}), b, 0.5, LatticeMode::planar);
  CHECK(map.nodes.size() == 441);  // 21 x 21
  CHECK(map.grid.has_value());
  CHECK(map.grid->nx == 21);
  CHECK(map.grid->ny == 21);
}

TEST_CASE("discretize volumetric: shifted columns and density") {
  const Bounds b{{0, 0, 0}, {5, 5, 2}};
  const double lambda = 0.5;
  const MagneticMap map =
      discretize(uniform_field({20, 0, -43}), b, lambda,
                 LatticeMode::volumetric);

  int shifted = 0;
  for (const MapNode& n : map.nodes) {
    const long i = std::lround(n.position.x / lambda);
    const long j = std::lround(n.position.y / lambda);
    const double base = std::fmod(n.position.z, lambda);
    const bool odd = (i + j) % 2 != 0;
    if (odd) {
      // Columns at odd parity sit exactly lambda/2 off the even-column z.
      CHECK(std::abs(base - 0.5 * lambda) < 1e-9);
      ++shifted;
    } else {
      CHECK((std::abs(base) < 1e-9 || std::abs(base - lambda) < 1e-9));
    }
  }
  CHECK(shifted > 0);

  // Node density within 5% of the cubic lambda grid over the same box
  // (exactly equal here: shifting columns does not change their size).
  const int cubic = 11 * 11 * 5;  // fence-post count at lambda = 0.5
  const double ratio = static_cast<double>(map.nodes.size()) / cubic;
  CHECK(ratio > 0.95);
  CHECK(ratio < 1.05);
}

TEST_CASE("discretize rejects bad inputs") {
  CHECK_THROWS_AS(discretize(uniform_field({1, 0, 0}),
                             Bounds{{0, 0, 0}, {0, 0, 0}}, 0.5,
                             LatticeMode::planar),
                  EmptyBounds);
  CHECK_THROWS_AS(discretize(uniform_field({1, 0, 0}),
                             Bounds{{0, 0, 0}, {1, 1, 0}}, -1.0,
                             LatticeMode::planar),
                  EmptyBounds);
}

TEST_CASE("discretize drops nodes inside dipole exclusion zones") {
  DipoleWorld world;
  world.earth_field = {20, 0, -43};
  world.bounds = {{0, 0, 0}, {4, 4, 3}};
  world.dipoles.push_back({{2.0, 2.0, 1.5}, {50, 0, 0}});
  const FieldFn field = [&world](const Vec3& p) {
    return dipole_field(world, p);
  };
  const Bounds plane{{0, 0, 1.5}, {4, 4, 1.5}};
  const MagneticMap map = discretize(field, plane, 0.5, LatticeMode::planar);
  CHECK(map.nodes.size() < 81);
  CHECK(!map.grid.has_value());  // incomplete grid
  for (const MapNode& n : map.nodes) {
    CHECK(world.clear_of_dipoles(n.position));
  }
}

TEST_CASE("build_feature_index: degenerate nodes stay out") {
  // Vertical field on half the plane.
  const FieldFn field = [](const Vec3& p) {
    return p.x < 2.0 ? Vec3{0.0, 0.0, 50.0} : Vec3{10.0, 0.0, 30.0};
  };
  MagneticMap map = discretize(field, Bounds{{0, 0, 0}, {4, 4, 0}}, 1.0,
                               LatticeMode::planar);
  build_feature_index(map);
  for (int idx : map.index_to_node) {
    CHECK(map.nodes[idx].frame.has_value());
    CHECK(map.nodes[idx].position.x >= 2.0);
  }
  // Each indexed node finds itself with a zero-radius feature query.
  for (size_t id = 0; id < map.index_to_node.size(); ++id) {
    const MapNode& n = map.nodes[map.index_to_node[id]];
    const auto hits = map.feature_index->range_query(n.feature.as_array(), 0.0);
    bool found = false;
    for (int h : hits) found |= (h == static_cast<int>(id));
    CHECK(found);
  }
}

TEST_CASE("build_feature_index throws on an all-vertical map") {
  MagneticMap map = discretize(uniform_field({0, 0, 50}),
                               Bounds{{0, 0, 0}, {3, 3, 0}}, 1.0,
                               LatticeMode::planar);
  CHECK_THROWS_AS(build_feature_index(map), NoValidNodes);
}

TEST_CASE("node fields round-trip through the planar grid") {
  const FieldFn field = [](const Vec3& p) {
    return Vec3{20.0 + p.x, p.y * 0.5, -40.0 + p.x * p.y * 0.01};
  };
  const MagneticMap map = discretize(field, Bounds{{0, 0, 2}, {6, 4, 2}}, 0.5,
                                     LatticeMode::planar);
  REQUIRE(map.grid.has_value());
  for (const MapNode& n : map.nodes) {
    const Vec3 v = interpolate(*map.grid, n.position);
    CHECK(v.x == n.m.x);
    CHECK(v.y == n.m.y);
    CHECK(v.z == n.m.z);
  }
}

TEST_CASE("400 m^3 volumetric map indexes fast") {
  // 400 m^3 at lambda = 0.5: the desk-scale analogue of the paper's
  // unmapped-area map.
  const Bounds b{{0, 0, 0}, {20, 10, 2}};
  MagneticMap map = discretize(uniform_field({15, 5, -40}), b, 0.5,
                               LatticeMode::volumetric);
  const auto t0 = std::chrono::steady_clock::now();
  build_feature_index(map);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  CHECK(map.index_to_node.size() == map.nodes.size());
  CHECK(ms < 100.0);
}
