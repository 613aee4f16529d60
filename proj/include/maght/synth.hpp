#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maght/geometry.hpp"
#include "maght/magmap.hpp"
#include "maght/pipeline.hpp"

namespace maght {

// Parametric odometry error. Errors accumulate as a first-order random walk
// along the path: per-step perturbations scale with sqrt(step length), so
// the per-axis position error after distance L has standard deviation
// sigma_trans * sqrt(L), and likewise for yaw. bias_walk adds a slowly
// wandering per-meter velocity bias on top of the white component.
struct DriftModel {
  double sigma_trans = 0.0;  // m / sqrt(m)
  double sigma_yaw = 0.0;    // rad / sqrt(m)
  double bias_walk = 0.0;    // (m/m) / sqrt(m), optional

  // Picks sigma_trans / sigma_yaw so the median endpoint errors after
  // `length_m` meters hit the given targets (chi distribution medians).
  static DriftModel for_target_rpe(double rpe_m, double rpe_yaw_rad,
                                   double length_m);
};

// Dipoles are drawn uniformly over the bounds; draws falling inside the
// keep-out slab [keepout_zlo, keepout_zhi] (the trajectory corridor plus the
// dipole exclusion radius) are rejected and redrawn, keeping sources in the
// floor and ceiling structure rather than at head height.
DipoleWorld gen_world(uint64_t seed, const Bounds& bounds, int n_dipoles,
                      double moment_scale, double keepout_zlo = 1.0,
                      double keepout_zhi = -1.0);

// 5th-to-95th percentile spread of the field magnitude over a dense grid at
// height z; the quick richness check printed by the generator.
double field_magnitude_spread(const DipoleWorld& world, double z,
                              double grid_step = 0.5);

enum class TrajectoryKind { open_walk, corridor_walk, staircase };

// World-frame position sequence of round(length/step)+1 points starting at
// index 0. open_walk is a smooth random-heading walk steered away from the
// region boundary; corridor_walk uses axis-aligned segments with 90-degree
// turns; staircase interleaves climbing flights (monotone z) with flat
// landings. All kinds stay within `region` horizontally.
std::vector<Vec3> gen_trajectory(uint64_t seed, TrajectoryKind kind,
                                 double length, double step,
                                 const Bounds& region, double z);

struct Case {
  uint64_t seed = 0;
  GravityPose truth;        // T_wa
  InputTrajectory input;    // frame a: drifted positions, noisy measures
  bool in_map = false;
  double traj_len = 0.0;    // nominal length, m
  Vec3 last_world_position; // ground-truth device position at the last sample
  std::string tag;          // optional grouping (e.g. aligned / crossing)
};

// Synthesizes the odometry view of a world trajectory: positions are the
// truth-inverse-transformed world positions corrupted by integrated drift,
// measures are the world field plus isotropic Gaussian noise rotated into
// frame a. Throws ExclusionZone when the trajectory enters a dipole
// exclusion zone. in_map is left for the scenario builder, which knows the
// mapped region.
Case make_case(const DipoleWorld& world, const GravityPose& truth,
               const std::vector<Vec3>& trajectory_w, double mag_noise_sigma,
               const DriftModel& drift, uint64_t seed);

enum class ScenarioKind { open, corridor, unmapped, staircase };

// Mapped region: lattice coverage bounds plus an optional union-of-boxes
// mask (tested in the horizontal plane).
struct MapSpec {
  Bounds bounds;
  double lambda = 0.5;
  LatticeMode mode = LatticeMode::planar;
  std::vector<Bounds> mask;

  bool in_region(const Vec3& p) const;
};

struct ScenarioSpec {
  uint64_t seed = 7;
  ScenarioKind kind = ScenarioKind::open;
  // A three-story slab of sources around a walking plane at 1.5 m: dipoles
  // at varied distances give the field structure at several spatial scales.
  Bounds world_bounds{{0.0, 0.0, -3.0}, {40.0, 30.0, 6.0}};
  int n_dipoles = 60;
  double moment_scale = 150.0;  // microtesla * m^3
  double lambda = 0.5;
  std::vector<double> lengths{12.0};
  int cases_per_length = 100;
  double raw_step = 0.02;   // raw magnetometer sample spacing, m
  double mag_noise = 0.5;   // microtesla
  DriftModel drift{0.05, 0.0015, 0.0};
  double walk_z = 1.5;      // walking plane height, m
  double corridor_width = 16.0;               // corridor kind, m
  double crossing_min_angle_deg = 60.0;       // corridor kind
  bool corridor_crossing = false;  // corridor kind: crossing instead of
                                   // axis-aligned test trajectories

  std::string id() const;  // e.g. "open-s7"
};

struct Scenario {
  ScenarioSpec spec;
  DipoleWorld world;
  MapSpec map_spec;
  MagneticMap map;  // built from world + map_spec, indexed
  std::vector<Case> cases;
};

// Deterministic end-to-end generation: world, mapped region, lattice map,
// and cases for every requested length. Cases are verified against the
// scenario invariant (ground-truth positions wholly inside the mapped
// region, or wholly outside for unmapped scenarios) and resampled until it
// holds.
Scenario build_scenario(const ScenarioSpec& spec);

// Rebuilds the lattice map from an already-loaded world and map spec
// (used when deserializing scenarios, which never store nodes).
MagneticMap build_map(const DipoleWorld& world, const MapSpec& spec);

}  // namespace maght
