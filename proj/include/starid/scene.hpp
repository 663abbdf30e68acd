#pragma once

#include <span>
#include <vector>

#include "starid/geometry.hpp"

namespace starid {

/// A detected star in the body frame with its triplet feature: the two
/// smallest angular distances to the other stars of the same scene.
struct SceneStar {
  UnitVec3 s;
  double mag = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct NearestTwo {
  double first = 0.0;
  double second = 0.0;
};

/// Two smallest angular distances from each vector to the others. Needs at
/// least three vectors. O(n^2).
std::vector<NearestTwo> nearest_two_angles(std::span<const Vec3> vectors);

/// Throws TooFewStars when fewer than three vectors are given.
std::vector<SceneStar> compute_scene_features(std::span<const UnitVec3> vectors, std::span<const double> mags);

}  // namespace starid
