#include "starid/geometry.hpp"

#include <algorithm>

#include "starid/errors.hpp"

namespace starid {

UnitVec3::UnitVec3(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error("UnitVec3: cannot normalise a zero or non-finite vector");
  }
  v_ = v / n;
}

Mat3 AxisAngle::matrix() const {
  const double theta = r_.norm();
  if (theta == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(theta, r_ / theta).toRotationMatrix();
}

Eigen::Quaterniond AxisAngle::quaternion() const {
  const double theta = r_.norm();
  if (theta == 0.0) return Eigen::Quaterniond::Identity();
  return Eigen::Quaterniond(Eigen::AngleAxisd(theta, r_ / theta));
}

AxisAngle AxisAngle::from_quaternion(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double s = q.vec().norm();
  if (s == 0.0) return AxisAngle();
  const double theta = 2.0 * std::atan2(s, q.w());
  return AxisAngle(q.vec() * (theta / s));
}

AxisAngle AxisAngle::from_matrix(const Mat3& m) {
  return from_quaternion(Eigen::Quaterniond(m));
}

AxisAngle AxisAngle::canonical() const { return from_quaternion(quaternion()); }

double rotation_distance(const AxisAngle& a, const AxisAngle& b) {
  const Eigen::Quaterniond d = a.quaternion().conjugate() * b.quaternion();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Vec3 clamp_to_pi_ball(const Vec3& r) {
  const double n = r.norm();
  if (n <= kPi) return r;
  return r * (kPi / n);
}

bool RotationCube::contains(const Vec3& r) const {
  for (int k = 0; k < 3; ++k) {
    if (r[k] < lower(k) || r[k] >= upper(k)) return false;
  }
  return true;
}

std::array<RotationCube, 8> RotationCube::branch() const {
  std::array<RotationCube, 8> out;
  const double h = 0.5 * unit_half_;
  for (int d = 0; d < 8; ++d) {
    RotationCube& c = out[d];
    c.unit_center_ = unit_center_;
    c.unit_center_.x() += (d & 1) ? h : -h;
    c.unit_center_.y() += (d & 2) ? h : -h;
    c.unit_center_.z() += (d & 4) ? h : -h;
    c.unit_half_ = h;
    c.center = kPi * c.unit_center_;
    c.half_side = kPi * h;
  }
  return out;
}

bool cube_intersects_pi_ball(const RotationCube& cube) {
  Vec3 nearest;
  for (int k = 0; k < 3; ++k) nearest[k] = std::clamp(0.0, cube.lower(k), cube.upper(k));
  return nearest.norm() <= kPi;
}

}  // namespace starid
