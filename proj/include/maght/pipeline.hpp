#pragma once

#include <string>
#include <vector>

#include "maght/geometry.hpp"
#include "maght/magmap.hpp"

namespace maght {

// Pipeline parameters. Defaults are the values used unchanged across every
// experiment; see README for units.
struct MaghtParams {
  double lambda = 0.5;            // sampling step, m (map lattice and input)
  double eps = 0.5;               // DBSCAN radius in vote space, m (= lambda)
  int minpts = 8;                 // DBSCAN density threshold, 2x the vote DoF
  double r = 5.0;                 // yaw scale in the vote metric, m
  double delta_max = 3.0;         // feature matching radius cap, microtesla
  double alpha = 0.67;            // adaptive matching gain, in [0, 1]
  int smoothing_window = 5;       // centered moving-average width, raw samples
  double horizontal_floor = 0.05; // |m_xy| below this is degenerate, microtesla

  void validate() const;  // throws std::invalid_argument
};

struct MagneticSample {
  double t = 0.0;  // seconds
  Vec3 position;   // meters, frame a (odometry)
  Vec3 m;          // microtesla, frame a
};

// A short trajectory of magnetic measures reconstructed by odometry in a
// gravity frame a.
struct InputTrajectory {
  std::string frame = "a";
  std::vector<MagneticSample> samples;
};

struct PreprocessResult {
  InputTrajectory traj;
  Vec3 barycenter;  // original-frame offset removed from every position
};

// Smooths magnetic vectors (centered moving average over smoothing_window
// raw samples), spatially downsamples to one sample per lambda of traveled
// path, and recenters positions at the barycenter of the kept samples to
// curb the lever-arm effect on vote translations. Samples are handled in
// acquisition (timestamp) order. Throws TooShort when fewer than two
// samples survive.
PreprocessResult preprocess(const InputTrajectory& raw,
                            const MaghtParams& params);

// Adaptive feature-space matching radius for sample i:
//   delta = min(alpha * |f_i - f_{i-1}|, alpha * |f_{i+1} - f_i|, delta_max)
// with distances in the (h, v) feature plane and the missing one-sided term
// dropped at the endpoints. Indices refer to the downsampled sequence, so
// the differences measure field variation per lambda of travel; in a
// uniform field delta tends to zero and matching shuts off.
double adaptive_delta(const std::vector<MagFeature>& features, int i,
                      const MaghtParams& params);

// One vote per matched (input sample, map node) pair: the transform that
// superimposes their magnetic frames. Samples with a degenerate horizontal
// field cast no votes. The vote list is ordered sample-major, node-id-minor,
// but its content is a pure function of the sample multiset: the adaptive
// radius is computed along timestamp order, so array order does not matter.
std::vector<GravityPose> cast_votes(const InputTrajectory& input,
                                    const MagneticMap& map,
                                    const MaghtParams& params);

struct Cluster {
  std::vector<int> members;  // vote indices, ascending
};

// Embeds votes in R^5 and runs DBSCAN(eps, minpts). Clusters come back
// sorted by size descending, ties broken by smallest member vote index.
std::vector<Cluster> cluster_votes(const std::vector<GravityPose>& votes,
                                   const MaghtParams& params);

// Cluster centroid: arithmetic mean of translations, circular mean of yaws.
GravityPose estimate(const Cluster& cluster,
                     const std::vector<GravityPose>& votes);

struct RelocResult {
  bool converged = false;
  GravityPose pose;   // T_w,a' where a' is the barycenter-recentered frame
  Vec3 barycenter;    // recentering offset, frame a
  int total_votes = 0;
  std::vector<int> cluster_sizes;  // descending; empty when no consensus

  int cluster_size() const {
    return cluster_sizes.empty() ? 0 : cluster_sizes.front();
  }
  int num_clusters() const { return static_cast<int>(cluster_sizes.size()); }

  // T_w,a for callers working with the original odometry frame.
  GravityPose pose_in_original_frame() const {
    return compose(pose, GravityPose{-barycenter.x, -barycenter.y,
                                     -barycenter.z, 0.0});
  }
};

// Full pipeline: preprocess, vote, cluster, estimate on the largest
// cluster. No cluster means the input is likely outside the map; that is a
// valid NoConsensus answer, not an error. Throws TooShort from preprocess.
RelocResult relocalize(const InputTrajectory& raw, const MagneticMap& map,
                       const MaghtParams& params);

}  // namespace maght
