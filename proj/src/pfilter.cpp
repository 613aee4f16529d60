#include "maght/pfilter.hpp"

#include <cmath>
#include <stdexcept>

#include "maght/errors.hpp"

namespace maght {

void PfParams::validate() const {
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (!(sigma_trans > 0.0) || !(sigma_rot > 0.0) || !(sigma_meas > 0.0)) {
    throw std::invalid_argument("process/measurement sigmas must be > 0");
  }
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    throw std::invalid_argument("ess_threshold must be in (0, 1]");
  }
  if (!(convergence_std > 0.0)) {
    throw std::invalid_argument("convergence_std must be > 0");
  }
}

namespace {

const GriddedField& planar_grid(const MagneticMap& map) {
  if (map.mode != LatticeMode::planar || !map.grid) {
    throw Error("pfilter: requires a planar map with a complete sample grid");
  }
  return *map.grid;
}

double map_plane_z(const MagneticMap& map) { return map.bounds.center().z; }

}  // namespace

std::vector<Particle> pf_init(const MagneticMap& map, const Vec3& first_measure,
                              const PfParams& params, std::mt19937_64& rng) {
  params.validate();
  const GriddedField& grid = planar_grid(map);
  if (first_measure.horizontal_norm() < params.horizontal_floor) {
    throw DegenerateFirstMeasure("pf_init: first measure has no horizontal component");
  }
  const double meas_azimuth = std::atan2(first_measure.y, first_measure.x);
  const double z = map_plane_z(map);

  std::uniform_real_distribution<double> ux(map.bounds.min.x, map.bounds.max.x);
  std::uniform_real_distribution<double> uy(map.bounds.min.y, map.bounds.max.y);
  std::uniform_real_distribution<double> upsi(-kPi, kPi);
  std::normal_distribution<double> jitter(0.0, params.init_yaw_jitter);

  std::vector<Particle> particles(params.n_particles);
  const double w0 = 1.0 / params.n_particles;
  for (Particle& p : particles) {
    p.x = ux(rng);
    p.y = uy(rng);
    const Vec3 map_field = interpolate(grid, {p.x, p.y, z});
    if (map_field.horizontal_norm() >= params.horizontal_floor) {
      const double map_azimuth = std::atan2(map_field.y, map_field.x);
      p.psi = wrap_pi(map_azimuth - meas_azimuth + jitter(rng));
    } else {
      p.psi = upsi(rng);
    }
    p.weight = w0;
  }
  return particles;
}

namespace {

double effective_sample_size(const std::vector<Particle>& particles) {
  double s = 0.0;
  for (const Particle& p : particles) s += p.weight * p.weight;
  return s > 0.0 ? 1.0 / s : 0.0;
}

// Stratified resampling: one uniform draw per stratum of width 1/N walks a
// cumulative weight ladder. Keeps the expected replicate count of each
// particle within one of N * weight.
void stratified_resample(std::vector<Particle>& particles,
                         std::mt19937_64& rng) {
  const int n = static_cast<int>(particles.size());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Particle> out(n);
  double cumulative = particles[0].weight;
  int i = 0;
  for (int j = 0; j < n; ++j) {
    const double u = (j + u01(rng)) / n;
    while (u > cumulative && i + 1 < n) {
      ++i;
      cumulative += particles[i].weight;
    }
    out[j] = particles[i];
    out[j].weight = 1.0 / n;
  }
  particles = std::move(out);
}

}  // namespace

PfStepDiag pf_step(std::vector<Particle>& particles, const OdomDelta& odom,
                   const Vec3& measure, const MagneticMap& map,
                   const PfParams& params, std::mt19937_64& rng) {
  const GriddedField& grid = planar_grid(map);
  const double z = map_plane_z(map);
  const MagFeature measured = extract_feature(measure);
  const double step_len = std::hypot(odom.dx, odom.dy);
  const double trans_sigma = params.sigma_trans * step_len;

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double inv_two_var = 1.0 / (2.0 * params.sigma_meas * params.sigma_meas);

  double total = 0.0;
  for (Particle& p : particles) {
    // Propagate: the frame-a increment rotated by the particle's yaw
    // hypothesis, plus noise scaled with the traveled distance.
    const double c = std::cos(p.psi);
    const double s = std::sin(p.psi);
    p.x += c * odom.dx - s * odom.dy + trans_sigma * gauss(rng);
    p.y += s * odom.dx + c * odom.dy + trans_sigma * gauss(rng);
    p.psi = wrap_pi(p.psi + odom.dpsi + params.sigma_rot * gauss(rng));

    if (p.x < map.bounds.min.x || p.x > map.bounds.max.x ||
        p.y < map.bounds.min.y || p.y > map.bounds.max.y) {
      p.weight = 0.0;
      continue;
    }
    const MagFeature predicted =
        extract_feature(interpolate(grid, {p.x, p.y, z}));
    const double dh = measured.h - predicted.h;
    const double dv = measured.v - predicted.v;
    p.weight *= std::exp(-(dh * dh + dv * dv) * inv_two_var);
    total += p.weight;
  }

  PfStepDiag diag;
  if (total <= 0.0) {
    const double w = 1.0 / particles.size();
    for (Particle& p : particles) p.weight = w;
    diag.weights_reset = true;
  } else {
    for (Particle& p : particles) p.weight /= total;
  }

  diag.ess = effective_sample_size(particles);
  if (diag.ess < params.ess_threshold * particles.size()) {
    stratified_resample(particles, rng);
    diag.resampled = true;
  }
  return diag;
}

PfDecision pf_converged(const std::vector<Particle>& particles,
                        const MagneticMap& map, const PfParams& params) {
  PfDecision decision;
  double mx = 0.0, my = 0.0, sin_sum = 0.0, cos_sum = 0.0;
  for (const Particle& p : particles) {
    mx += p.weight * p.x;
    my += p.weight * p.y;
    sin_sum += p.weight * std::sin(p.psi);
    cos_sum += p.weight * std::cos(p.psi);
  }
  double vx = 0.0, vy = 0.0;
  for (const Particle& p : particles) {
    vx += p.weight * (p.x - mx) * (p.x - mx);
    vy += p.weight * (p.y - my) * (p.y - my);
  }
  decision.std_x = std::sqrt(vx);
  decision.std_y = std::sqrt(vy);
  decision.pose = GravityPose{mx, my, map_plane_z(map),
                              std::atan2(sin_sum, cos_sum)};
  decision.converged = decision.std_x < params.convergence_std &&
                       decision.std_y < params.convergence_std;
  return decision;
}

}  // namespace maght
