#pragma once

// Stereographic projection from the north pole N = (0, 0, 1) onto the plane
// z = 0, and the planar intersection predicates that stand in for spherical
// cap membership and cap-cap overlap.
//
// Spherical coordinates use inclination phi from +z and azimuth theta measured
// from +y towards +x, so that (x, y) = sin(phi) (sin(theta), cos(theta)) and a
// point projects to cot(phi / 2) (sin(theta), cos(theta)).

#include <variant>

#include "starid/geometry.hpp"

namespace starid {

/// Angular tolerance deciding when a cap boundary passes through N.
inline constexpr double kPoleEpsilon = 1e-9;

struct SphericalCoord {
  double phi = 0.0;    // [0, pi]
  double theta = 0.0;  // [0, 2 pi)

  static SphericalCoord from_unit(const Vec3& v);
  static SphericalCoord from_unit(const UnitVec3& v) { return from_unit(v.vec()); }
  UnitVec3 to_unit() const;
};

/// Closed cap { y : angle(y, center) <= alpha }.
struct SphericalPatch {
  UnitVec3 center;
  double alpha = 0.0;
};

struct InteriorCircle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Image of a cap containing N: everything on or outside the circle.
struct ExteriorCircle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

enum class HalfPlaneSide { AtLeast, Below };

/// Image of a cap whose boundary passes through N. `normal` points at the
/// projection of the cap point farthest from N, `offset` is the (non-negative)
/// distance from the origin to the boundary line along `normal`. Membership is
/// normal.p - offset >= 0 (AtLeast) or < 0 (Below).
struct HalfPlane {
  Vec2 normal = Vec2(0.0, 1.0);
  double offset = 0.0;
  HalfPlaneSide side = HalfPlaneSide::AtLeast;
};

using ProjectedPatch = std::variant<InteriorCircle, ExteriorCircle, HalfPlane>;

/// Disk overlaps the closed region outside an exterior circle unless it lies
/// strictly inside the excluded disk.
inline bool disk_meets_exterior(const InteriorCircle& in, const ExteriorCircle& ex) {
  return (in.center - ex.center).norm() + in.radius >= ex.radius;
}

inline bool disk_meets_half_plane(const InteriorCircle& in, const HalfPlane& h) {
  const double s = h.normal.dot(in.center) - h.offset;
  if (h.side == HalfPlaneSide::AtLeast) return s + in.radius >= 0.0;
  return s - in.radius < 0.0;
}

/// Throws DegenerateProjection when phi <= kPoleEpsilon.
Vec2 project_point(const SphericalCoord& p);

/// Same map evaluated directly on a unit vector (numerically stable near
/// both poles). Throws DegenerateProjection within kPoleEpsilon of N.
Vec2 project_point(const Vec3& v);

/// Returns true when v is too close to N to be projected.
bool near_projection_pole(const Vec3& v);

/// Requires patch.alpha in (0, pi).
ProjectedPatch project_patch(const SphericalPatch& patch);

bool point_in_patch(const Vec2& p, const ProjectedPatch& patch);

/// Planar test equivalent to the two caps sharing a point. Pairs without an
/// interior circle always intersect since both caps contain N.
bool patch_intersects_patch(const ProjectedPatch& a, const ProjectedPatch& b);

}  // namespace starid
