#include <doctest.h>

#include <random>

#include "maght/geometry.hpp"
#include "oracles.hpp"

using namespace maght;

namespace {

GravityPose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ut(-20.0, 20.0);
  std::uniform_real_distribution<double> upsi(-10.0, 10.0);
  return {ut(rng), ut(rng), ut(rng), upsi(rng)};
}

}  // namespace

TEST_CASE("wrap_pi lands in [-pi, pi)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double w = wrap_pi(u(rng));
    CHECK(w >= -kPi);
    CHECK(w < kPi);
  }
  CHECK(wrap_pi(kPi) == -kPi);
  CHECK(wrap_pi(-kPi) == -kPi);
  CHECK(wrap_pi(3.0 * kPi) == doctest::Approx(-kPi).epsilon(1e-15));
}

TEST_CASE("compose: identity and hand-checked quarter turn") {
  const GravityPose id;
  const GravityPose p{3.0, -1.0, 2.0, 0.4};
  const GravityPose left = compose(id, p);
  CHECK(left.x == p.x);
  CHECK(left.y == p.y);
  CHECK(left.z == p.z);
  CHECK(left.psi == p.psi);

  // (1,0,0, pi/2) o (1,0,0, 0) = (1,1,0, pi/2)
  const GravityPose q = compose({1.0, 0.0, 0.0, kPi / 2.0},
                                {1.0, 0.0, 0.0, 0.0});
  CHECK(q.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.z == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.psi == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("compose/invert agree with the homogeneous-matrix oracle") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    const GravityPose a = random_pose(rng);
    const GravityPose b = random_pose(rng);
    const oracle::Hom4 ha = oracle::Hom4::from_pose(a);
    const oracle::Hom4 hb = oracle::Hom4::from_pose(b);
    CHECK(oracle::pose_gap(compose(a, b), ha * hb) < 1e-10);
    CHECK(oracle::pose_gap(invert(a), ha.inverse()) < 1e-10);
  }
}

TEST_CASE("invert: pure translation and round trip") {
  const GravityPose t{2.0, 0.0, 0.0, 0.0};
  const GravityPose ti = invert(t);
  CHECK(ti.x == -2.0);
  CHECK(ti.y == 0.0);
  CHECK(ti.psi == 0.0);

  const GravityPose p{1.0, 2.0, 3.0, 0.7};
  const GravityPose round = compose(p, invert(p));
  CHECK(std::abs(round.x) < 1e-12);
  CHECK(std::abs(round.y) < 1e-12);
  CHECK(std::abs(round.z) < 1e-12);
  CHECK(std::abs(round.psi) < 1e-12);
}

TEST_CASE("compose is associative on random triples") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const GravityPose a = random_pose(rng);
    const GravityPose b = random_pose(rng);
    const GravityPose c = random_pose(rng);
    const GravityPose ab_c = compose(compose(a, b), c);
    const GravityPose a_bc = compose(a, compose(b, c));
    CHECK(std::abs(ab_c.x - a_bc.x) < 1e-10);
    CHECK(std::abs(ab_c.y - a_bc.y) < 1e-10);
    CHECK(std::abs(ab_c.z - a_bc.z) < 1e-10);
    CHECK(std::abs(wrap_pi(ab_c.psi - a_bc.psi)) < 1e-10);
  }
}

TEST_CASE("magnetic_frame basics") {
  const auto aligned = magnetic_frame({0, 0, 0}, {1, 0, 0}, 0.05);
  REQUIRE(aligned.has_value());
  CHECK(aligned->x == 0.0);
  CHECK(aligned->psi == 0.0);

  const auto west = magnetic_frame({3, 4, 0}, {0, 2, -5}, 0.05);
  REQUIRE(west.has_value());
  CHECK(west->x == 3.0);
  CHECK(west->y == 4.0);
  CHECK(west->z == 0.0);
  CHECK(west->psi == doctest::Approx(kPi / 2.0).epsilon(1e-15));

  CHECK(!magnetic_frame({0, 0, 0}, {0, 0, 50}, 0.05).has_value());
  CHECK(!magnetic_frame({0, 0, 0}, {0.03, 0.02, 10}, 0.05).has_value());
}

TEST_CASE("magnetic_frame ignores positive scaling of m") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> um(-40.0, 40.0);
  std::uniform_real_distribution<double> us(0.01, 100.0);
  for (int i = 0; i < 300; ++i) {
    const Vec3 m{um(rng), um(rng), um(rng)};
    if (m.horizontal_norm() < 1.0) continue;
    const double k = us(rng);
    const auto f1 = magnetic_frame({0, 0, 0}, m, 0.05);
    const auto f2 = magnetic_frame({0, 0, 0}, m * k, 0.05);
    REQUIRE(f1.has_value());
    REQUIRE(f2.has_value());
    CHECK(std::abs(wrap_pi(f1->psi - f2->psi)) < 1e-12);
  }
}

TEST_CASE("embed applies the manifold map") {
  const EmbeddedVote a = embed({0, 0, 0, 0}, 5.0);
  CHECK(a == EmbeddedVote{0, 0, 0, 5, 0});

  const EmbeddedVote b = embed({1, 2, 3, kPi}, 5.0);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 2.0);
  CHECK(b[2] == 3.0);
  CHECK(b[3] == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(std::abs(b[4]) < 1e-14);

  const EmbeddedVote c = embed({0, 0, 0, kPi / 2.0}, 5.0);
  CHECK(std::abs(c[3]) < 1e-14);
  CHECK(c[4] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("embed keeps p4^2 + p5^2 = r^2") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const GravityPose p = random_pose(rng);
    const EmbeddedVote e = embed(p, 5.0);
    CHECK(e[3] * e[3] + e[4] * e[4] ==
          doctest::Approx(25.0).epsilon(1e-9));
  }
}

TEST_CASE("embed is injective over the vote space") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const GravityPose a = random_pose(rng);
    GravityPose b = random_pose(rng);
    if (a.x == b.x && a.y == b.y && a.z == b.z && a.psi == b.psi) continue;
    const EmbeddedVote ea = embed(a, 5.0);
    const EmbeddedVote eb = embed(b, 5.0);
    CHECK(ea != eb);
  }
}

TEST_CASE("vote_distance values and metric properties") {
  const GravityPose p{1, 2, 3, 0.5};
  CHECK(vote_distance(p, p, 5.0) == 0.0);
  CHECK(vote_distance({0, 0, 0, 0}, {3, 4, 0, 0}, 5.0) ==
        doctest::Approx(5.0).epsilon(1e-15));
  // Yaw pi apart: chord across the radius-r circle.
  CHECK(vote_distance({0, 0, 0, 0}, {0, 0, 0, kPi}, 5.0) ==
        doctest::Approx(10.0).epsilon(1e-12));

  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const GravityPose a = random_pose(rng);
    const GravityPose b = random_pose(rng);
    const GravityPose c = random_pose(rng);
    CHECK(vote_distance(a, b, 5.0) == vote_distance(b, a, 5.0));
    CHECK(vote_distance(a, c, 5.0) <=
          vote_distance(a, b, 5.0) + vote_distance(b, c, 5.0) + 1e-12);
  }
}
