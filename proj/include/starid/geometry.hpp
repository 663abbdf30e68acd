#pragma once

// Rotation algebra on unit vectors and the axis-angle search space.
//
// Rotations are parameterised by a 3-vector r whose direction is the axis and
// whose norm is the angle. Every rotation has a representative with |r| <= pi,
// so the whole of SO(3) sits inside the pi-ball. The ball is enclosed by the
// cube [-pi, pi)^3, which is recursively split into octants during search.

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace starid {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Direction on the unit sphere. Construction normalises its input.
class UnitVec3 {
 public:
  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  /// Wraps a vector the caller guarantees is already unit length.
  static UnitVec3 from_normalized(const Vec3& v) {
    UnitVec3 u;
    u.v_ = v;
    return u;
  }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVec3& o) const { return v_.dot(o.v_); }

  friend bool operator==(const UnitVec3& a, const UnitVec3& b) { return a.v_ == b.v_; }

 private:
  Vec3 v_;
};

/// Axis-angle rotation vector.
class AxisAngle {
 public:
  AxisAngle() : r_(Vec3::Zero()) {}
  explicit AxisAngle(const Vec3& r) : r_(r) {}
  AxisAngle(double x, double y, double z) : r_(x, y, z) {}

  const Vec3& vec() const { return r_; }
  double angle() const { return r_.norm(); }

  Mat3 matrix() const;
  Eigen::Quaterniond quaternion() const;
  static AxisAngle from_matrix(const Mat3& m);
  static AxisAngle from_quaternion(const Eigen::Quaterniond& q);

  /// Same rotation with angle folded into [0, pi].
  AxisAngle canonical() const;
  AxisAngle inverse() const { return AxisAngle(-r_); }

 private:
  Vec3 r_;
};

/// Angle between two unit vectors in [0, pi].
inline double angular_distance(const Vec3& a, const Vec3& b) {
  double c = a.dot(b);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

inline double angular_distance(const UnitVec3& a, const UnitVec3& b) {
  return angular_distance(a.vec(), b.vec());
}

/// Rodrigues rotation of v by the rotation vector r.
inline Vec3 rotate(const Vec3& r, const Vec3& v) {
  const double theta = r.norm();
  if (theta == 0.0) return v;
  const Vec3 k = r / theta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c));
}

inline UnitVec3 rotate(const AxisAngle& r, const UnitVec3& v) {
  return UnitVec3::from_normalized(rotate(r.vec(), v.vec()));
}

/// Angle of the relative rotation a^-1 b.
double rotation_distance(const AxisAngle& a, const AxisAngle& b);

/// Nearest point of the closed pi-ball to r.
Vec3 clamp_to_pi_ball(const Vec3& r);

/// Half-open axis-aligned cube [center - h, center + h)^3 in axis-angle space.
///
/// Alongside the radian values the cube keeps its position in units of pi.
/// Cubes reached from the root by branching have dyadic unit coordinates,
/// which are exact in double precision, so sibling faces coincide bit for
/// bit and branching partitions the parent exactly.
struct RotationCube {
  Vec3 center = Vec3::Zero();
  double half_side = kPi;

  RotationCube() = default;
  RotationCube(const Vec3& c, double h) : center(c), half_side(h), unit_center_(c / kPi), unit_half_(h / kPi) {}

  static RotationCube root() { return RotationCube(); }

  double side() const { return 2.0 * half_side; }
  /// Center-to-vertex distance.
  double alpha() const { return kSqrt3 * half_side; }

  /// Faces of the cube along one axis.
  double lower(int axis) const { return kPi * (unit_center_[axis] - unit_half_); }
  double upper(int axis) const { return kPi * (unit_center_[axis] + unit_half_); }

  bool contains(const Vec3& r) const;
  std::array<RotationCube, 8> branch() const;

 private:
  Vec3 unit_center_ = Vec3::Zero();
  double unit_half_ = 1.0;
};

/// True iff some point of the (closed) cube lies within the pi-ball.
bool cube_intersects_pi_ball(const RotationCube& cube);

}  // namespace starid
