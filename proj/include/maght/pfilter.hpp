#pragma once

#include <random>
#include <vector>

#include "maght/geometry.hpp"
#include "maght/magmap.hpp"
#include "maght/pipeline.hpp"

namespace maght {

// 2-D relocalization particle: hypothesized device position in the world
// plus the yaw of the odometry-frame-to-world rotation. The planar map's
// sample plane supplies z.
struct Particle {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double weight = 0.0;
};

struct PfParams {
  int n_particles = 1600;
  double sigma_trans = 0.05;      // process noise, m per m of odometry motion
  double sigma_rot = 0.01;        // process noise, rad per step
  double sigma_meas = 8.0;        // likelihood sigma per feature component, uT;
                                  // raised until particle diversity survives
                                  // long enough to avoid premature collapse
  double ess_threshold = 0.5;     // resample when ESS < threshold * N
  double convergence_std = 1.0;   // m, on both x and y
  double init_yaw_jitter = 0.1;   // rad, around the field-aligned yaw
  double horizontal_floor = 0.05; // uT, degeneracy floor on |m_xy|

  void validate() const;  // throws std::invalid_argument
};

// Odometry increment between consecutive measurements, expressed in the
// input gravity frame. dpsi stays zero for a fixed odometry frame but is
// kept so drifting frames can be fed directly.
struct OdomDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dpsi = 0.0;
};

struct PfStepDiag {
  double ess = 0.0;
  bool resampled = false;
  bool weights_reset = false;  // degeneracy recovery fired
};

struct PfDecision {
  bool converged = false;
  GravityPose pose;  // weighted mean, circular yaw mean
  double std_x = 0.0;
  double std_y = 0.0;
};

// Spawns particles uniformly over the map's horizontal bounds with uniform
// weights. Each particle's yaw aligns the measured horizontal field azimuth
// with the map field azimuth interpolated at the particle position, plus
// Gaussian jitter; positions where the map field is itself near-vertical
// fall back to a uniform yaw. Requires a planar map with its sample grid.
// Throws DegenerateFirstMeasure when the measure has no usable horizontal
// component.
std::vector<Particle> pf_init(const MagneticMap& map, const Vec3& first_measure,
                              const PfParams& params, std::mt19937_64& rng);

// Bootstrap step: propagate by the odometry increment rotated into each
// particle's hypothesis plus process noise, reweight by the Gaussian
// likelihood of the measured (h, v) feature against the interpolated map
// feature, normalize, and stratified-resample when the effective sample
// size drops below the threshold. Particles outside the map get zero
// weight; if every weight vanishes the set resets to uniform weights and
// the reset is reported in the diagnostics.
PfStepDiag pf_step(std::vector<Particle>& particles, const OdomDelta& odom,
                   const Vec3& measure, const MagneticMap& map,
                   const PfParams& params, std::mt19937_64& rng);

// Converged when the weighted standard deviations of x and y are both below
// the threshold.
PfDecision pf_converged(const std::vector<Particle>& particles,
                        const MagneticMap& map, const PfParams& params);

}  // namespace maght
