#include "maght/synth.hpp"

#include <algorithm>
#include <cmath>

#include "maght/errors.hpp"
#include "maght/rng.hpp"

namespace maght {

namespace {

// Medians of the chi distribution (3 dof) and the half-normal, used to map
// an endpoint-error target back to the per-step sigma of the random walk.
constexpr double kChi3Median = 1.5381722544550522;
constexpr double kHalfNormalMedian = 0.6744897501960817;

constexpr double kWalkSpeed = 1.25;       // m/s, for timestamps
constexpr double kTrajectoryMargin = 2.0; // m, kept clear of region edges

}  // namespace

DriftModel DriftModel::for_target_rpe(double rpe_m, double rpe_yaw_rad,
                                      double length_m) {
  const double sqrt_len = std::sqrt(length_m);
  DriftModel d;
  d.sigma_trans = rpe_m / (kChi3Median * sqrt_len);
  d.sigma_yaw = rpe_yaw_rad / (kHalfNormalMedian * sqrt_len);
  return d;
}

DipoleWorld gen_world(uint64_t seed, const Bounds& bounds, int n_dipoles,
                      double moment_scale, double keepout_zlo,
                      double keepout_zhi) {
  std::mt19937_64 rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> ux(bounds.min.x, bounds.max.x);
  std::uniform_real_distribution<double> uy(bounds.min.y, bounds.max.y);
  std::uniform_real_distribution<double> uz(bounds.min.z, bounds.max.z);
  std::normal_distribution<double> gauss(0.0, 1.0);

  DipoleWorld world;
  world.earth_field = {20.0, 0.0, -43.0};
  world.bounds = bounds;
  world.dipoles.reserve(n_dipoles);
  for (int i = 0; i < n_dipoles; ++i) {
    Dipole d;
    do {
      d.position = {ux(rng), uy(rng), uz(rng)};
    } while (d.position.z > keepout_zlo && d.position.z < keepout_zhi);
    d.moment = Vec3{gauss(rng), gauss(rng), gauss(rng)} * moment_scale;
    world.dipoles.push_back(d);
  }
  return world;
}

double field_magnitude_spread(const DipoleWorld& world, double z,
                              double grid_step) {
  std::vector<double> mags;
  for (double x = world.bounds.min.x; x <= world.bounds.max.x;
       x += grid_step) {
    for (double y = world.bounds.min.y; y <= world.bounds.max.y;
         y += grid_step) {
      const Vec3 p{x, y, z};
      if (!world.clear_of_dipoles(p)) continue;
      mags.push_back(dipole_field(world, p).norm());
    }
  }
  if (mags.size() < 2) return 0.0;
  const size_t lo = static_cast<size_t>(0.05 * (mags.size() - 1));
  const size_t hi = static_cast<size_t>(0.95 * (mags.size() - 1));
  std::nth_element(mags.begin(), mags.begin() + lo, mags.end());
  const double p5 = mags[lo];
  std::nth_element(mags.begin(), mags.begin() + hi, mags.end());
  const double p95 = mags[hi];
  return p95 - p5;
}

namespace {

Bounds shrink_xy(const Bounds& b, double margin) {
  Bounds s = b;
  s.min.x += margin;
  s.min.y += margin;
  s.max.x -= margin;
  s.max.y -= margin;
  return s;
}

std::vector<Vec3> open_walk(std::mt19937_64& rng, int n, double step,
                            const Bounds& inner, double z) {
  std::uniform_real_distribution<double> ux(inner.min.x, inner.max.x);
  std::uniform_real_distribution<double> uy(inner.min.y, inner.max.y);
  std::uniform_real_distribution<double> upsi(-kPi, kPi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double turn_sigma = 0.35 * std::sqrt(step);  // rad per step

  std::vector<Vec3> out;
  out.reserve(n);
  Vec3 p{ux(rng), uy(rng), z};
  double heading = upsi(rng);
  out.push_back(p);
  const Vec3 center = inner.center();
  for (int k = 1; k < n; ++k) {
    heading += turn_sigma * gauss(rng);
    Vec3 next = p + Vec3{step * std::cos(heading), step * std::sin(heading),
                         0.0};
    if (!inner.contains_xy(next)) {
      // Steer toward the region center; the center is always interior.
      heading = std::atan2(center.y - p.y, center.x - p.x);
      next = p + Vec3{step * std::cos(heading), step * std::sin(heading), 0.0};
    }
    p = next;
    out.push_back(p);
  }
  return out;
}

std::vector<Vec3> corridor_walk(std::mt19937_64& rng, int n, double step,
                                const Bounds& inner, double z) {
  std::uniform_real_distribution<double> ux(inner.min.x, inner.max.x);
  std::uniform_real_distribution<double> uy(inner.min.y, inner.max.y);
  std::uniform_int_distribution<int> udir(0, 3);
  std::uniform_real_distribution<double> useg(4.0, 10.0);
  std::uniform_int_distribution<int> ucoin(0, 1);

  static const Vec3 kDirs[4] = {
      {1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}};

  std::vector<Vec3> out;
  out.reserve(n);
  Vec3 p{ux(rng), uy(rng), z};
  int dir = udir(rng);
  double seg_left = useg(rng);
  out.push_back(p);
  for (int k = 1; k < n; ++k) {
    if (seg_left <= 0.0 || !inner.contains_xy(p + kDirs[dir] * step)) {
      // 90-degree turn; prefer a side that stays inside.
      const int turns[2] = {(dir < 2) ? 2 : 0, (dir < 2) ? 3 : 1};
      int pick = turns[ucoin(rng)];
      if (!inner.contains_xy(p + kDirs[pick] * step)) {
        pick = (pick == turns[0]) ? turns[1] : turns[0];
      }
      if (!inner.contains_xy(p + kDirs[pick] * step)) {
        pick = dir ^ 1;  // dead end: reverse
      }
      dir = pick;
      seg_left = useg(rng);
    }
    p += kDirs[dir] * step;
    seg_left -= step;
    out.push_back(p);
  }
  return out;
}

std::vector<Vec3> staircase_walk(std::mt19937_64& rng, int n, double step,
                                 const Bounds& inner, double z0) {
  std::uniform_real_distribution<double> ux(inner.min.x, inner.max.x);
  std::uniform_real_distribution<double> uy(inner.min.y, inner.max.y);
  std::uniform_real_distribution<double> upsi(-kPi, kPi);

  // Alternating climbing flights and flat switchback landings.
  const double flight_run = 3.0;    // m of path per flight
  const double flight_rise = 1.5;   // m of climb per flight
  const double landing_run = 1.5;   // m of flat path
  const double pitch = flight_rise / flight_run;
  const double cos_pitch = 1.0 / std::sqrt(1.0 + pitch * pitch);

  std::vector<Vec3> out;
  out.reserve(n);
  Vec3 p{ux(rng), uy(rng), z0};
  double heading = upsi(rng);
  int climb_dir = 1;
  bool in_flight = true;
  double phase_left = flight_run;
  const Vec3 center = inner.center();
  out.push_back(p);
  for (int k = 1; k < n; ++k) {
    if (phase_left <= 0.0) {
      if (in_flight) {
        in_flight = false;
        phase_left = landing_run;
        heading += kPi / 2.0;  // switchback
      } else {
        in_flight = true;
        phase_left = flight_run;
        if (p.z + climb_dir * flight_rise > inner.max.z ||
            p.z + climb_dir * flight_rise < inner.min.z) {
          climb_dir = -climb_dir;
        }
      }
    }
    const double dz = in_flight ? climb_dir * step * pitch * cos_pitch : 0.0;
    const double dxy = in_flight ? step * cos_pitch : step;
    Vec3 next = p + Vec3{dxy * std::cos(heading), dxy * std::sin(heading), dz};
    if (!inner.contains_xy(next)) {
      heading = std::atan2(center.y - p.y, center.x - p.x);
      next = p + Vec3{dxy * std::cos(heading), dxy * std::sin(heading), dz};
    }
    p = next;
    phase_left -= step;
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<Vec3> gen_trajectory(uint64_t seed, TrajectoryKind kind,
                                 double length, double step,
                                 const Bounds& region, double z) {
  if (!(length > 0.0) || !(step > 0.0)) {
    throw std::invalid_argument("gen_trajectory: length and step must be > 0");
  }
  const int n = static_cast<int>(std::lround(length / step)) + 1;
  std::mt19937_64 rng = make_rng(seed, 1);
  const Bounds inner = shrink_xy(region, kTrajectoryMargin);
  switch (kind) {
    case TrajectoryKind::open_walk:
      return open_walk(rng, n, step, inner, z);
    case TrajectoryKind::corridor_walk:
      return corridor_walk(rng, n, step, inner, z);
    case TrajectoryKind::staircase:
      return staircase_walk(rng, n, step, inner, z);
  }
  throw std::invalid_argument("gen_trajectory: unknown kind");
}

Case make_case(const DipoleWorld& world, const GravityPose& truth,
               const std::vector<Vec3>& trajectory_w, double mag_noise_sigma,
               const DriftModel& drift, uint64_t seed) {
  for (const Vec3& p : trajectory_w) {
    if (!world.clear_of_dipoles(p)) {
      throw ExclusionZone("make_case: trajectory enters a dipole exclusion zone");
    }
  }

  const GravityPose world_to_a = invert(truth);
  const int n = static_cast<int>(trajectory_w.size());

  // Independent streams so that re-running with a different drift level
  // keeps the measurement noise (and anything else) bit-identical.
  std::mt19937_64 noise_rng = make_rng(seed, 2);
  std::mt19937_64 drift_rng = make_rng(seed, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Vec3> true_a(n);
  for (int k = 0; k < n; ++k) true_a[k] = world_to_a.apply(trajectory_w[k]);

  Case c;
  c.seed = seed;
  c.truth = truth;
  c.last_world_position = trajectory_w.back();
  c.input.frame = "a";
  c.input.samples.resize(n);

  double path_len = 0.0;
  Vec3 drifted = true_a[0];
  double yaw_err = 0.0;
  Vec3 bias;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      const Vec3 delta = true_a[k] - true_a[k - 1];
      const double d = delta.norm();
      const double sd = std::sqrt(d);
      path_len += d;
      yaw_err += drift.sigma_yaw * sd * gauss(drift_rng);
      Vec3 step_err{gauss(drift_rng), gauss(drift_rng), gauss(drift_rng)};
      drifted += rotate_z(yaw_err, delta) + step_err * (drift.sigma_trans * sd);
      if (drift.bias_walk > 0.0) {
        drifted += bias * d;
        bias += Vec3{gauss(drift_rng), gauss(drift_rng), gauss(drift_rng)} *
                (drift.bias_walk * sd);
      }
    }
    const Vec3 noise{gauss(noise_rng), gauss(noise_rng), gauss(noise_rng)};
    const Vec3 field_w =
        dipole_field(world, trajectory_w[k]) + noise * mag_noise_sigma;

    MagneticSample& s = c.input.samples[k];
    s.t = path_len / kWalkSpeed;
    s.position = drifted;
    s.m = rotate_z(world_to_a.psi, field_w);
  }
  c.traj_len = path_len;
  return c;
}

bool MapSpec::in_region(const Vec3& p) const {
  const bool inside_bounds =
      mode == LatticeMode::planar ? bounds.contains_xy(p) : bounds.contains(p);
  if (!inside_bounds) return false;
  if (mask.empty()) return true;
  for (const Bounds& box : mask) {
    if (box.contains_xy(p)) return true;
  }
  return false;
}

std::string ScenarioSpec::id() const {
  std::string kind_name;
  switch (kind) {
    case ScenarioKind::open: kind_name = "open"; break;
    case ScenarioKind::corridor:
      kind_name = corridor_crossing ? "corridor-crossing" : "corridor-aligned";
      break;
    case ScenarioKind::unmapped: kind_name = "unmapped"; break;
    case ScenarioKind::staircase: kind_name = "staircase"; break;
  }
  return kind_name + "-s" + std::to_string(seed);
}

MagneticMap build_map(const DipoleWorld& world, const MapSpec& spec) {
  const FieldFn field = [&world](const Vec3& p) {
    return dipole_field(world, p);
  };
  NodeMask mask;
  if (!spec.mask.empty()) {
    mask = [boxes = spec.mask](const Vec3& p) {
      for (const Bounds& b : boxes) {
        if (b.contains_xy(p)) return true;
      }
      return false;
    };
  }
  MagneticMap map = discretize(field, spec.bounds, spec.lambda, spec.mode,
                               mask);
  build_feature_index(map);
  return map;
}

namespace {

MapSpec map_spec_for(const ScenarioSpec& spec) {
  MapSpec ms;
  ms.lambda = spec.lambda;
  const Bounds& wb = spec.world_bounds;
  switch (spec.kind) {
    case ScenarioKind::open:
    case ScenarioKind::corridor:
      ms.mode = LatticeMode::planar;
      ms.bounds = {{wb.min.x, wb.min.y, spec.walk_z},
                   {wb.max.x, wb.max.y, spec.walk_z}};
      if (spec.kind == ScenarioKind::corridor) {
        const double yc = 0.5 * (wb.min.y + wb.max.y);
        ms.mask.push_back(Bounds{{wb.min.x, yc - 0.5 * spec.corridor_width,
                                  spec.walk_z},
                                 {wb.max.x, yc + 0.5 * spec.corridor_width,
                                  spec.walk_z}});
      }
      break;
    case ScenarioKind::unmapped:
      // Map only the lower stretch of the world; cases go in the rest.
      ms.mode = LatticeMode::planar;
      ms.bounds = {{wb.min.x, wb.min.y, spec.walk_z},
                   {wb.min.x + 0.45 * (wb.max.x - wb.min.x), wb.max.y,
                    spec.walk_z}};
      break;
    case ScenarioKind::staircase:
      ms.mode = LatticeMode::volumetric;
      ms.bounds = wb;
      break;
  }
  return ms;
}

// Straight horizontal segment used by the corridor scenario, where the test
// direction relative to the corridor axis is the variable under study.
std::vector<Vec3> straight_walk(std::mt19937_64& rng, double length,
                                double step, const Bounds& inner, double z,
                                double heading) {
  const int n = static_cast<int>(std::lround(length / step)) + 1;
  const Vec3 dir{std::cos(heading), std::sin(heading), 0.0};
  std::uniform_real_distribution<double> ux(inner.min.x,
                                            inner.max.x - length * std::abs(dir.x));
  std::uniform_real_distribution<double> uy(inner.min.y,
                                            inner.max.y - length * std::abs(dir.y));
  Vec3 start{ux(rng), uy(rng), z};
  if (dir.x < 0.0) start.x -= length * dir.x;
  if (dir.y < 0.0) start.y -= length * dir.y;
  std::vector<Vec3> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) out.push_back(start + dir * (k * step));
  return out;
}

}  // namespace

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario scenario;
  scenario.spec = spec;
  // Keep dipoles out of the walking corridor (its half-height plus the
  // exclusion radius) for the planar kinds; staircase trajectories sweep
  // the whole volume and rely on per-case exclusion resampling instead.
  double keepout_lo = 1.0, keepout_hi = -1.0;
  if (spec.kind != ScenarioKind::staircase) {
    keepout_lo = spec.walk_z - 1.05;
    keepout_hi = spec.walk_z + 1.05;
  }
  scenario.world = gen_world(mix_seed(spec.seed, 10), spec.world_bounds,
                             spec.n_dipoles, spec.moment_scale, keepout_lo,
                             keepout_hi);
  scenario.map_spec = map_spec_for(spec);
  scenario.map = build_map(scenario.world, scenario.map_spec);

  const Bounds& wb = spec.world_bounds;
  Bounds traj_region;
  TrajectoryKind walk_kind = TrajectoryKind::open_walk;
  switch (spec.kind) {
    case ScenarioKind::open:
      traj_region = scenario.map_spec.bounds;
      break;
    case ScenarioKind::corridor:
      traj_region = scenario.map_spec.mask.front();
      break;
    case ScenarioKind::unmapped:
      traj_region = {{wb.min.x + 0.55 * (wb.max.x - wb.min.x), wb.min.y,
                      spec.walk_z},
                     {wb.max.x, wb.max.y, spec.walk_z}};
      break;
    case ScenarioKind::staircase:
      traj_region = wb;
      walk_kind = TrajectoryKind::staircase;
      break;
  }
  const bool want_in_map = spec.kind != ScenarioKind::unmapped;

  std::uniform_real_distribution<double> upsi(-kPi, kPi);
  std::uniform_real_distribution<double> uxy(-30.0, 30.0);
  std::uniform_real_distribution<double> uz(-5.0, 5.0);

  for (size_t li = 0; li < spec.lengths.size(); ++li) {
    const double length = spec.lengths[li];
    for (int ci = 0; ci < spec.cases_per_length; ++ci) {
      const uint64_t case_seed =
          mix_seed(spec.seed, 0x100000 + li * 100000 + ci);
      bool placed = false;
      for (uint64_t attempt = 0; attempt < 200 && !placed; ++attempt) {
        const uint64_t sub = mix_seed(case_seed, 20 + attempt);
        std::mt19937_64 rng = make_rng(sub, 4);

        std::vector<Vec3> traj_w;
        std::string tag;
        if (spec.kind == ScenarioKind::corridor) {
          std::uniform_int_distribution<int> ucoin(0, 1);
          double heading;
          if (spec.corridor_crossing) {
            const double lo = spec.crossing_min_angle_deg * kPi / 180.0;
            std::uniform_real_distribution<double> uang(lo, kPi - lo);
            heading = uang(rng) * (ucoin(rng) ? 1.0 : -1.0);
            tag = "crossing";
          } else {
            heading = ucoin(rng) ? 0.0 : kPi;
            tag = "aligned";
          }
          const Bounds inner = shrink_xy(traj_region, kTrajectoryMargin);
          traj_w = straight_walk(rng, length, spec.raw_step, inner,
                                 spec.walk_z, heading);
        } else {
          traj_w = gen_trajectory(sub, walk_kind, length, spec.raw_step,
                                  traj_region, spec.walk_z);
        }

        const GravityPose truth{uxy(rng), uxy(rng), uz(rng), upsi(rng)};
        Case c;
        try {
          c = make_case(scenario.world, truth, traj_w, spec.mag_noise,
                        spec.drift, sub);
        } catch (const ExclusionZone&) {
          continue;
        }

        // Scenario invariant: ground-truth sample positions wholly inside
        // the mapped region, or wholly outside of it.
        bool ok = true;
        for (const MagneticSample& s : c.input.samples) {
          const bool in = scenario.map_spec.in_region(truth.apply(s.position));
          if (in != want_in_map) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;

        c.in_map = want_in_map;
        c.tag = tag;
        scenario.cases.push_back(std::move(c));
        placed = true;
      }
      if (!placed) {
        throw Error("build_scenario: could not place a case after 200 attempts");
      }
    }
  }
  return scenario;
}

}  // namespace maght
