#include "starid/scene.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "starid/errors.hpp"

namespace starid {

std::vector<NearestTwo> nearest_two_angles(std::span<const Vec3> vectors) {
  const std::size_t n = vectors.size();
  // Track the two largest cosines; acos is monotone so they give the two
  // smallest angles.
  constexpr double kLowest = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n, kLowest), second(n, kLowest);
  const auto push = [&](std::size_t i, double c) {
    if (c > best[i]) {
      second[i] = best[i];
      best[i] = c;
    } else if (c > second[i]) {
      second[i] = c;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = vectors[i].dot(vectors[j]);
      push(i, c);
      push(j, c);
    }
  }
  std::vector<NearestTwo> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].first = std::acos(std::clamp(best[i], -1.0, 1.0));
    out[i].second = std::acos(std::clamp(second[i], -1.0, 1.0));
  }
  return out;
}

std::vector<SceneStar> compute_scene_features(std::span<const UnitVec3> vectors, std::span<const double> mags) {
  if (vectors.size() < 3) {
    throw TooFewStars("scene has " + std::to_string(vectors.size()) + " stars, at least 3 are required");
  }
  if (mags.size() != vectors.size()) throw Error("compute_scene_features: vector/magnitude count mismatch");

  std::vector<Vec3> raw(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) raw[i] = vectors[i].vec();
  const std::vector<NearestTwo> nn = nearest_two_angles(raw);

  std::vector<SceneStar> out(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    out[i] = SceneStar{vectors[i], mags[i], nn[i].first, nn[i].second};
  }
  return out;
}

}  // namespace starid
