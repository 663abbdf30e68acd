#include "starid/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace starid {

void CameraModel::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 90.0)) throw std::invalid_argument("fov_deg must lie in (0, 90)");
  if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
}

double pixel_to_angle(double pixels, const CameraModel& cam) {
  return pixels * cam.fov_deg / static_cast<double>(cam.resolution);
}

bool in_fov(const Vec3& body, const CameraModel& cam) {
  if (!(body.z() > 0.0)) return false;
  const double half = deg_to_rad(0.5 * cam.fov_deg);
  return std::abs(std::atan2(body.x(), body.z())) <= half && std::abs(std::atan2(body.y(), body.z())) <= half;
}

AxisAngle random_attitude(SplitMix64& rng) {
  // Shoemake's uniform quaternion.
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t2 = 2.0 * kPi * u2, t3 = 2.0 * kPi * u3;
  const Eigen::Quaterniond q(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2), b * std::sin(t3));
  return AxisAngle::from_quaternion(q);
}

namespace {

Vec3 perturb_direction(const Vec3& b, double sigma_rad, SplitMix64& rng) {
  const Vec3 helper = std::abs(b.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = b.cross(helper).normalized();
  const Vec3 e2 = b.cross(e1);
  const double n1 = rng.normal(), n2 = rng.normal();
  return (b + sigma_rad * (n1 * e1 + n2 * e2)).normalized();
}

}  // namespace

SimulatedScene generate_scene(const OnboardCatalog& cat, const CameraModel& cam, const NoiseSpec& noise,
                              std::optional<AxisAngle> attitude) {
  cam.validate();
  if (noise.pos_sigma_deg < 0.0 || noise.mag_sigma < 0.0 || noise.false_star_count < 0) {
    throw std::invalid_argument("noise levels must be non-negative");
  }
  SplitMix64 rng(noise.seed);
  SimulatedScene scene;
  scene.attitude = attitude ? *attitude : random_attitude(rng);
  const Mat3 Rt = scene.attitude.matrix().transpose();
  const double sigma = deg_to_rad(noise.pos_sigma_deg);

  for (const CatalogStar& c : cat.stars()) {
    if (c.mag > cam.mag_limit) continue;
    const Vec3 b = Rt * c.c.vec();
    if (!in_fov(b, cam)) continue;
    // Draw both perturbations for every selected star so the stream does
    // not depend on which stars are dropped.
    const Vec3 bp = sigma > 0.0 ? perturb_direction(b, sigma, rng) : b;
    const double mag = noise.mag_sigma > 0.0 ? c.mag + noise.mag_sigma * rng.normal() : c.mag;
    if (mag > cam.mag_limit || !in_fov(bp, cam)) continue;
    scene.stars.push_back(SimulatedStar{UnitVec3::from_normalized(bp), mag, c.id});
  }

  const double half = deg_to_rad(0.5 * cam.fov_deg);
  const double mag_lo = std::min(cat.brightest_mag(), cam.mag_limit);
  for (int k = 0; k < noise.false_star_count; ++k) {
    const double ax = rng.uniform(-half, half);
    const double ay = rng.uniform(-half, half);
    const double mag = rng.uniform(mag_lo, cam.mag_limit);
    scene.stars.push_back(SimulatedStar{UnitVec3(std::tan(ax), std::tan(ay), 1.0), mag, std::nullopt});
  }

  for (std::size_t k = scene.stars.size(); k > 1; --k) {
    std::swap(scene.stars[k - 1], scene.stars[rng.below(k)]);
  }
  return scene;
}

}  // namespace starid
