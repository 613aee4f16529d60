#include <doctest.h>

#include <random>

#include "maght/dbscan.hpp"
#include "oracles.hpp"

using namespace maght;

namespace {

using P5 = std::array<double, 5>;

std::vector<P5> random_votes(std::mt19937_64& rng, int n, int n_clusters) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::normal_distribution<double> g(0.0, 0.3);
  std::uniform_int_distribution<int> upick(0, n_clusters);
  std::vector<P5> centers(n_clusters);
  for (auto& c : centers) {
    for (double& v : c) v = u(rng);
  }
  std::vector<P5> pts(n);
  for (auto& p : pts) {
    const int c = upick(rng);
    if (c == n_clusters) {
      for (double& v : p) v = u(rng);  // background noise
    } else {
      for (int d = 0; d < 5; ++d) p[d] = centers[c][d] + g(rng);
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("empty input gives empty labels") {
  const ClusterLabels r = dbscan<5>({}, 0.5, 8);
  CHECK(r.labels.empty());
  CHECK(r.num_clusters == 0);
}

TEST_CASE("minpts=1: clusters are eps-connectivity components") {
  // Two chains separated by a gap wider than eps.
  std::vector<P5> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({i * 0.4, 0, 0, 0, 0});
  for (int i = 0; i < 4; ++i) pts.push_back({10.0 + i * 0.4, 0, 0, 0, 0});
  const ClusterLabels r = dbscan<5>(pts, 0.5, 1);
  CHECK(r.num_clusters == 2);
  for (int i = 0; i < 9; ++i) {
    CHECK(r.core[i]);
    CHECK(r.labels[i] == (i < 5 ? 0 : 1));
  }
}

TEST_CASE("all-isolated points are all noise") {
  std::vector<P5> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({i * 100.0, 0, 0, 0, 0});
  const ClusterLabels r = dbscan<5>(pts, 1.0, 8);
  CHECK(r.num_clusters == 0);
  for (int l : r.labels) CHECK(l == ClusterLabels::kNoise);
}

TEST_CASE("matches the quadratic reference over random sweeps") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> un(5, 400);
  std::uniform_int_distribution<int> uk(1, 5);
  const double eps_sweep[] = {0.2, 0.5, 1.0, 2.5};
  const int minpts_sweep[] = {1, 3, 8, 15};
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_votes(rng, un(rng), uk(rng));
    for (double eps : eps_sweep) {
      for (int minpts : minpts_sweep) {
        const ClusterLabels got = dbscan<5>(pts, eps, minpts);
        const oracle::RefDbscan want =
            oracle::reference_dbscan<5>(pts, eps, minpts);
        std::vector<bool> want_core(want.core.begin(), want.core.end());
        CHECK(oracle::same_core_partition(got.labels, got.core, want.labels,
                                          want_core));
      }
    }
  }
}

TEST_CASE("cluster labels satisfy the reachability invariants") {
  std::mt19937_64 rng(77);
  const auto pts = random_votes(rng, 300, 3);
  const double eps = 0.8;
  const int minpts = 6;
  const ClusterLabels r = dbscan<5>(pts, eps, minpts);

  const auto dist2 = [&](int a, int b) {
    double s = 0.0;
    for (int d = 0; d < 5; ++d) {
      const double diff = pts[a][d] - pts[b][d];
      s += diff * diff;
    }
    return s;
  };

  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    // Core flag is the closed-neighborhood cardinality property.
    int count = 0;
    for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
      if (dist2(i, j) <= eps * eps) ++count;
    }
    CHECK(r.core[i] == (count >= minpts));

    // Every clustered point is within eps of a core point of its cluster.
    if (r.labels[i] >= 0) {
      bool reachable = false;
      for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
        if (r.core[j] && r.labels[j] == r.labels[i] &&
            dist2(i, j) <= eps * eps) {
          reachable = true;
          break;
        }
      }
      CHECK(reachable);
    }
  }
}

TEST_CASE("growing eps never demotes a core point") {
  std::mt19937_64 rng(31);
  const auto pts = random_votes(rng, 250, 4);
  const ClusterLabels small = dbscan<5>(pts, 0.5, 8);
  const ClusterLabels big = dbscan<5>(pts, 1.5, 8);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (small.core[i]) CHECK(big.core[i]);
  }
}
