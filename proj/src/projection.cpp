#include "starid/projection.hpp"

#include <cmath>

#include "starid/errors.hpp"

namespace starid {

namespace {

double cot(double x) { return std::cos(x) / std::sin(x); }

Vec2 azimuth_dir(double theta) { return Vec2(std::sin(theta), std::cos(theta)); }

}  // namespace

SphericalCoord SphericalCoord::from_unit(const Vec3& v) {
  SphericalCoord s;
  s.phi = std::atan2(std::hypot(v.x(), v.y()), v.z());
  double t = std::atan2(v.x(), v.y());
  if (t < 0.0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  s.theta = t;
  return s;
}

UnitVec3 SphericalCoord::to_unit() const {
  const double sp = std::sin(phi);
  return UnitVec3(sp * std::sin(theta), sp * std::cos(theta), std::cos(phi));
}

Vec2 project_point(const SphericalCoord& p) {
  if (p.phi <= kPoleEpsilon) {
    throw DegenerateProjection("project_point: point coincides with the projection pole");
  }
  return cot(0.5 * p.phi) * azimuth_dir(p.theta);
}

bool near_projection_pole(const Vec3& v) {
  return v.z() > 0.0 && std::hypot(v.x(), v.y()) <= std::sin(kPoleEpsilon);
}

Vec2 project_point(const Vec3& v) {
  if (near_projection_pole(v)) {
    throw DegenerateProjection("project_point: point coincides with the projection pole");
  }
  if (v.z() < 0.0) return Vec2(v.x(), v.y()) / (1.0 - v.z());
  const double rho2 = v.x() * v.x() + v.y() * v.y();
  return Vec2(v.x(), v.y()) * ((1.0 + v.z()) / rho2);
}

ProjectedPatch project_patch(const SphericalPatch& patch) {
  const SphericalCoord sc = SphericalCoord::from_unit(patch.center);
  const double phi_l = sc.phi - patch.alpha;
  const double phi_h = sc.phi + patch.alpha;
  const Vec2 dir = azimuth_dir(sc.theta);
  const double cot_h = cot(0.5 * phi_h);

  if (std::abs(phi_l) <= kPoleEpsilon) {
    HalfPlane h;
    if (phi_h < kPi) {
      h.normal = dir;
      h.offset = cot_h;
      h.side = HalfPlaneSide::AtLeast;
    } else {
      h.normal = -dir;
      h.offset = -cot_h;
      h.side = HalfPlaneSide::Below;
    }
    return h;
  }

  const double cot_l = cot(0.5 * phi_l);
  const Vec2 center = 0.5 * (cot_h + cot_l) * dir;
  const double radius = 0.5 * std::abs(cot_h - cot_l);
  if (phi_l > 0.0) return InteriorCircle{center, radius};
  return ExteriorCircle{center, radius};
}

bool point_in_patch(const Vec2& p, const ProjectedPatch& patch) {
  struct Visitor {
    const Vec2& p;
    bool operator()(const InteriorCircle& c) const { return (p - c.center).norm() <= c.radius; }
    bool operator()(const ExteriorCircle& c) const { return (p - c.center).norm() >= c.radius; }
    bool operator()(const HalfPlane& h) const {
      const double s = h.normal.dot(p) - h.offset;
      return h.side == HalfPlaneSide::AtLeast ? s >= 0.0 : s < 0.0;
    }
  };
  return std::visit(Visitor{p}, patch);
}

bool patch_intersects_patch(const ProjectedPatch& a, const ProjectedPatch& b) {
  if (const auto* ia = std::get_if<InteriorCircle>(&a)) {
    if (const auto* ib = std::get_if<InteriorCircle>(&b)) {
      return (ia->center - ib->center).norm() <= ia->radius + ib->radius;
    }
    if (const auto* eb = std::get_if<ExteriorCircle>(&b)) return disk_meets_exterior(*ia, *eb);
    return disk_meets_half_plane(*ia, std::get<HalfPlane>(b));
  }
  if (const auto* ib = std::get_if<InteriorCircle>(&b)) {
    if (const auto* ea = std::get_if<ExteriorCircle>(&a)) return disk_meets_exterior(*ib, *ea);
    return disk_meets_half_plane(*ib, std::get<HalfPlane>(a));
  }
  return true;
}

}  // namespace starid
