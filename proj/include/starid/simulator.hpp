#pragma once

// Synthetic star-tracker scenes with ground truth: a square-FOV camera,
// Gaussian position and magnitude noise, and uniformly placed false stars.

#include <cstdint>
#include <optional>
#include <vector>

#include "starid/catalog.hpp"
#include "starid/geometry.hpp"
#include "starid/rng.hpp"

namespace starid {

/// Boresight is body +z. Attitudes map body to inertial: c = R b.
struct CameraModel {
  double fov_deg = 14.0;
  int resolution = 1024;
  double mag_limit = 6.0;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct NoiseSpec {
  double pos_sigma_deg = 0.0;
  double mag_sigma = 0.0;
  int false_star_count = 0;
  std::uint64_t seed = 0;
};

struct SimulatedStar {
  UnitVec3 v;
  double mag = 0.0;
  /// Catalog id; empty for false stars.
  std::optional<std::uint32_t> truth_id;
};

struct SimulatedScene {
  AxisAngle attitude;
  std::vector<SimulatedStar> stars;

  bool too_few_stars() const { return stars.size() < 3; }
};

/// Small-angle conversion, fov_deg / resolution degrees per pixel.
double pixel_to_angle(double pixels, const CameraModel& cam);

/// Square-frustum test on a body-frame direction.
bool in_fov(const Vec3& body, const CameraModel& cam);

/// Haar-uniform random rotation.
AxisAngle random_attitude(SplitMix64& rng);

/// Deterministic in (catalog, cam, noise, attitude). With no attitude given
/// one is drawn from the noise seed.
SimulatedScene generate_scene(const OnboardCatalog& cat, const CameraModel& cam, const NoiseSpec& noise,
                              std::optional<AxisAngle> attitude = std::nullopt);

}  // namespace starid
