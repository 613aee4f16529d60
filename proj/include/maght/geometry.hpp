#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace maght {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps an angle into [-pi, pi).
inline double wrap_pi(double a) {
  a = std::remainder(a, kTwoPi);  // exact, lands in [-pi, pi]
  if (a >= kPi) a -= kTwoPi;
  return a;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  double horizontal_norm() const { return std::hypot(x, y); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Rotates v about the z axis by angle psi.
inline Vec3 rotate_z(double psi, const Vec3& v) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

// A gravity-constrained rigid transform: translation (x, y, z) plus yaw psi
// about the upright z axis. Roll and pitch are fixed at zero by the gravity
// alignment of every frame handled here, so this is the single pose
// representation used throughout. psi is kept normalized to [-pi, pi).
struct GravityPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;

  GravityPose() = default;
  GravityPose(double x_, double y_, double z_, double psi_)
      : x(x_), y(y_), z(z_), psi(wrap_pi(psi_)) {}

  static GravityPose identity() { return {}; }

  Vec3 translation() const { return {x, y, z}; }

  // Maps a point from this pose's child frame into its parent frame.
  Vec3 apply(const Vec3& p) const { return rotate_z(psi, p) + translation(); }
};

// Composition a * b: applies b first, then a.
inline GravityPose compose(const GravityPose& a, const GravityPose& b) {
  const Vec3 t = a.apply(b.translation());
  return {t.x, t.y, t.z, a.psi + b.psi};
}

inline GravityPose invert(const GravityPose& p) {
  const Vec3 t = rotate_z(-p.psi, p.translation()) * -1.0;
  return {t.x, t.y, t.z, -p.psi};
}

// Transform from the magnetic frame anchored at `position` to the parent
// frame: the frame's x axis points along the horizontal component of m.
// Returns nullopt when the horizontal component is below `horizontal_floor`
// (yaw would be numerically meaningless; callers must skip the sample).
inline std::optional<GravityPose> magnetic_frame(const Vec3& position,
                                                 const Vec3& m,
                                                 double horizontal_floor) {
  if (m.horizontal_norm() < horizontal_floor) return std::nullopt;
  return GravityPose{position.x, position.y, position.z,
                     std::atan2(m.y, m.x)};
}

// Image of a vote in R^5; Euclidean distance there approximates the scaled
// pose distance for neighborhoods small against r.
using EmbeddedVote = std::array<double, 5>;

inline EmbeddedVote embed(const GravityPose& v, double r) {
  return {v.x, v.y, v.z, r * std::cos(v.psi), r * std::sin(v.psi)};
}

// Pose distance used by the vote clustering: Euclidean distance between the
// R^5 embeddings, i.e. sqrt(|dt|^2 + 2 r^2 (1 - cos dpsi)).
inline double vote_distance(const GravityPose& a, const GravityPose& b,
                            double r) {
  const EmbeddedVote ea = embed(a, r);
  const EmbeddedVote eb = embed(b, r);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = ea[i] - eb[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace maght
