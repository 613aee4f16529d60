#include "maght/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "maght/dbscan.hpp"
#include "maght/errors.hpp"

namespace maght {

void MaghtParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (minpts < 1) throw std::invalid_argument("minpts must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (!(delta_max > 0.0)) throw std::invalid_argument("delta_max must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1]");
  }
  if (smoothing_window < 1) {
    throw std::invalid_argument("smoothing_window must be >= 1");
  }
  if (!(horizontal_floor >= 0.0)) {
    throw std::invalid_argument("horizontal_floor must be >= 0");
  }
}

namespace {

// Acquisition order: ascending timestamp, position as a permutation-stable
// tie-break (timestamps are strictly increasing in practice).
std::vector<int> acquisition_order(const std::vector<MagneticSample>& s) {
  std::vector<int> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(s[a].t, s[a].position.x, s[a].position.y,
                    s[a].position.z) < std::tie(s[b].t, s[b].position.x,
                                                s[b].position.y,
                                                s[b].position.z);
  });
  return order;
}

}  // namespace

PreprocessResult preprocess(const InputTrajectory& raw,
                            const MaghtParams& params) {
  params.validate();
  if (raw.samples.size() < 2) {
    throw TooShort("preprocess: need at least 2 raw samples");
  }

  const std::vector<int> order = acquisition_order(raw.samples);
  const int n = static_cast<int>(order.size());

  // Centered moving average on the magnetic vectors, truncated at the ends.
  const int half = params.smoothing_window / 2;
  std::vector<MagneticSample> smoothed(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    Vec3 acc;
    for (int k = lo; k <= hi; ++k) acc += raw.samples[order[k]].m;
    smoothed[i] = raw.samples[order[i]];
    smoothed[i].m = acc / static_cast<double>(hi - lo + 1);
  }

  // Spatial downsampling: one sample per lambda of traveled path. Path
  // length rather than a time step keeps a stationary carrier from
  // multiplying votes. The tiny slack tolerates inputs laid out at exact
  // lambda spacing.
  const double keep_at = params.lambda * (1.0 - 1e-12);
  InputTrajectory out;
  out.frame = raw.frame;
  out.samples.push_back(smoothed[0]);
  double traveled = 0.0;
  for (int i = 1; i < n; ++i) {
    traveled += (smoothed[i].position - smoothed[i - 1].position).norm();
    const Vec3 last = out.samples.back().position;
    const Vec3 cur = smoothed[i].position;
    if (traveled >= keep_at &&
        (cur.x != last.x || cur.y != last.y || cur.z != last.z)) {
      out.samples.push_back(smoothed[i]);
      traveled = 0.0;
    }
  }
  if (out.samples.size() < 2) {
    throw TooShort("preprocess: fewer than 2 samples after downsampling");
  }

  Vec3 barycenter;
  for (const MagneticSample& s : out.samples) barycenter += s.position;
  barycenter = barycenter / static_cast<double>(out.samples.size());
  for (MagneticSample& s : out.samples) s.position = s.position - barycenter;

  return {std::move(out), barycenter};
}

double adaptive_delta(const std::vector<MagFeature>& features, int i,
                      const MaghtParams& params) {
  const int n = static_cast<int>(features.size());
  double delta = params.delta_max;
  if (i > 0) {
    delta = std::min(delta,
                     params.alpha * feature_distance(features[i],
                                                     features[i - 1]));
  }
  if (i + 1 < n) {
    delta = std::min(delta,
                     params.alpha * feature_distance(features[i + 1],
                                                     features[i]));
  }
  return delta;
}

std::vector<GravityPose> cast_votes(const InputTrajectory& input,
                                    const MagneticMap& map,
                                    const MaghtParams& params) {
  if (!map.indexed()) {
    throw Error("cast_votes: map feature index not built");
  }
  const int n = static_cast<int>(input.samples.size());

  // Feature sequence and per-sample radius along acquisition order, so the
  // vote set does not depend on how the caller ordered the array.
  const std::vector<int> order = acquisition_order(input.samples);
  std::vector<MagFeature> features(n);
  for (int k = 0; k < n; ++k) {
    features[k] = extract_feature(input.samples[order[k]].m);
  }
  std::vector<double> delta(n);
  for (int k = 0; k < n; ++k) {
    delta[order[k]] = adaptive_delta(features, k, params);
  }

  std::vector<GravityPose> votes;
  for (int i = 0; i < n; ++i) {
    const MagneticSample& s = input.samples[i];
    const auto frame_a = magnetic_frame(s.position, s.m,
                                        params.horizontal_floor);
    if (!frame_a) continue;
    const GravityPose h_to_a = invert(*frame_a);
    const MagFeature f = extract_feature(s.m);
    const std::vector<int> matches =
        map.feature_index->range_query(f.as_array(), delta[i]);
    for (int id : matches) {
      const MapNode& node = map.nodes[map.index_to_node[id]];
      votes.push_back(compose(*node.frame, h_to_a));
    }
  }
  return votes;
}

std::vector<Cluster> cluster_votes(const std::vector<GravityPose>& votes,
                                   const MaghtParams& params) {
  std::vector<Cluster> clusters;
  if (votes.empty()) return clusters;

  std::vector<EmbeddedVote> points;
  points.reserve(votes.size());
  for (const GravityPose& v : votes) points.push_back(embed(v, params.r));

  const ClusterLabels labels = dbscan<5>(points, params.eps, params.minpts);
  clusters.resize(labels.num_clusters);
  for (int i = 0; i < static_cast<int>(votes.size()); ++i) {
    if (labels.labels[i] != ClusterLabels::kNoise) {
      clusters[labels.labels[i]].members.push_back(i);
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              if (a.members.size() != b.members.size()) {
                return a.members.size() > b.members.size();
              }
              return a.members.front() < b.members.front();
            });
  return clusters;
}

GravityPose estimate(const Cluster& cluster,
                     const std::vector<GravityPose>& votes) {
  const double n = static_cast<double>(cluster.members.size());
  Vec3 t;
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (int idx : cluster.members) {
    const GravityPose& v = votes[idx];
    t += v.translation();
    sin_sum += std::sin(v.psi);
    cos_sum += std::cos(v.psi);
  }
  t = t / n;
  return {t.x, t.y, t.z, std::atan2(sin_sum / n, cos_sum / n)};
}

RelocResult relocalize(const InputTrajectory& raw, const MagneticMap& map,
                       const MaghtParams& params) {
  PreprocessResult pre = preprocess(raw, params);
  const std::vector<GravityPose> votes =
      cast_votes(pre.traj, map, params);
  const std::vector<Cluster> clusters = cluster_votes(votes, params);

  RelocResult result;
  result.barycenter = pre.barycenter;
  result.total_votes = static_cast<int>(votes.size());
  result.cluster_sizes.reserve(clusters.size());
  for (const Cluster& c : clusters) {
    result.cluster_sizes.push_back(static_cast<int>(c.members.size()));
  }
  if (!clusters.empty()) {
    result.converged = true;
    result.pose = estimate(clusters.front(), votes);
  }
  return result;
}

}  // namespace maght
