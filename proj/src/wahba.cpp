#include <Eigen/SVD>

#include "starid/errors.hpp"
#include "starid/solver.hpp"

namespace starid {

AxisAngle solve_wahba(std::span<const std::pair<UnitVec3, UnitVec3>> body_inertial) {
  if (body_inertial.size() < 2) throw DegenerateGeometry("attitude needs at least two correspondences");
  Mat3 B = Mat3::Zero();
  for (const auto& [s, c] : body_inertial) B += c.vec() * s.vec().transpose();

  const Eigen::JacobiSVD<Mat3> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[1] > 1e-12 * sv[0])) throw DegenerateGeometry("correspondences are collinear");

  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  const double d = U.determinant() * V.determinant();
  const Mat3 R = U * Vec3(1.0, 1.0, d).asDiagonal() * V.transpose();
  return AxisAngle::from_matrix(R);
}

}  // namespace starid
