#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "starid/catalog.hpp"
#include "starid/geometry.hpp"
#include "starid/rng.hpp"
#include "starid/scene.hpp"
#include "starid/simulator.hpp"

namespace starid::test {

inline std::filesystem::path data_dir() { return STARID_DATA_DIR; }

inline Vec3 random_unit(SplitMix64& rng) {
  for (;;) {
    const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

/// Uniform point of the closed pi-ball.
inline Vec3 random_in_pi_ball(SplitMix64& rng) {
  for (;;) {
    const Vec3 v(rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi));
    if (v.norm() <= kPi) return v;
  }
}

/// Rotation vector of angle `angle` about a random axis.
inline Vec3 random_small_rotation(SplitMix64& rng, double angle) { return random_unit(rng) * angle; }

inline const std::vector<RawStar>& real_raw_catalog() {
  static const std::vector<RawStar> raw = read_raw_catalog_csv(data_dir() / "hipparcos_mag7.csv");
  return raw;
}

/// Hipparcos-derived catalog shipped in data/, built at magnitude 6 with
/// 0.1 deg binary removal. Cached per process.
inline const OnboardCatalog& real_catalog() {
  static const OnboardCatalog cat = build_onboard_catalog(real_raw_catalog(), 6.0, deg_to_rad(0.1));
  return cat;
}

/// Uniformly scattered synthetic stars with magnitudes in [mag_lo, mag_hi].
inline std::vector<RawStar> random_raw_stars(SplitMix64& rng, std::size_t n, double mag_lo = 1.0,
                                             double mag_hi = 6.0) {
  std::vector<RawStar> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 v = random_unit(rng);
    double ra = rad_to_deg(std::atan2(v.y(), v.x()));
    if (ra < 0.0) ra += 360.0;
    if (ra >= 360.0) ra = 0.0;
    out[k] = RawStar{static_cast<std::int64_t>(k + 1), ra, rad_to_deg(std::asin(v.z())),
                     std::round(rng.uniform(mag_lo, mag_hi) * 100.0) / 100.0};
  }
  return out;
}

struct PreparedScene {
  SimulatedScene sim;
  std::vector<SceneStar> stars;
};

/// Scene with features attached; empty `stars` when the scene is too small.
inline PreparedScene prepare(const SimulatedScene& sim) {
  PreparedScene p{sim, {}};
  if (sim.too_few_stars()) return p;
  std::vector<UnitVec3> v;
  std::vector<double> m;
  for (const SimulatedStar& s : sim.stars) {
    v.push_back(s.v);
    m.push_back(s.mag);
  }
  p.stars = compute_scene_features(v, m);
  return p;
}

inline std::vector<std::optional<std::uint32_t>> truth_ids(const SimulatedScene& s) {
  std::vector<std::optional<std::uint32_t>> t;
  for (const SimulatedStar& st : s.stars) t.push_back(st.truth_id);
  return t;
}

/// Standard-noise scenes (1 px, 0.3 mag) from the real catalog.
inline NoiseSpec standard_noise(std::uint64_t seed) {
  CameraModel cam;
  NoiseSpec n;
  n.pos_sigma_deg = pixel_to_angle(1.0, cam);
  n.mag_sigma = 0.3;
  n.seed = seed;
  return n;
}

/// Small synthetic identification problem: `catalog_size` stars scattered in
/// a cap of `cap_deg` radius and a scene of the `scene_size` catalog stars
/// nearest to a random anchor, seen through a random attitude with
/// `noise_deg` of direction noise and 0.1 mag of magnitude noise, plus
/// `false_count` false stars scattered around the scene.
struct MiniInstance {
  OnboardCatalog catalog;
  std::vector<SceneStar> scene;
  AxisAngle truth;
};

inline MiniInstance make_mini_instance(SplitMix64& rng, std::size_t catalog_size, std::size_t scene_size,
                                       double cap_deg, double noise_deg, std::size_t false_count = 0) {
  const Vec3 axis = random_unit(rng);
  const Vec3 e1 = axis.unitOrthogonal();
  const Vec3 e2 = axis.cross(e1);
  std::vector<RawStar> raw;
  const double zmin = std::cos(deg_to_rad(cap_deg));
  for (std::size_t k = 0; k < catalog_size; ++k) {
    const double z = rng.uniform(zmin, 1.0);
    const double t = rng.uniform(0.0, 2.0 * kPi);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 v = z * axis + rho * (std::cos(t) * e1 + std::sin(t) * e2);
    double ra = rad_to_deg(std::atan2(v.y(), v.x()));
    if (ra < 0.0) ra += 360.0;
    if (ra >= 360.0) ra = 0.0;
    raw.push_back(RawStar{static_cast<std::int64_t>(k + 1), ra, rad_to_deg(std::asin(std::clamp(v.z(), -1.0, 1.0))),
                          std::round(rng.uniform(1.0, 6.0) * 100.0) / 100.0});
  }
  MiniInstance m{build_onboard_catalog(raw, 10.0, 0.0), {}, random_attitude(rng)};

  const Vec3 anchor = m.catalog[rng.below(m.catalog.size())].c.vec();
  std::vector<std::size_t> order(m.catalog.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.catalog[a].c.vec().dot(anchor) > m.catalog[b].c.vec().dot(anchor);
  });
  const Mat3 rt = m.truth.matrix().transpose();
  std::vector<UnitVec3> dirs;
  std::vector<double> mags;
  for (std::size_t k = 0; k < std::min(scene_size, order.size()); ++k) {
    const CatalogStar& c = m.catalog[order[k]];
    Vec3 b = rt * c.c.vec();
    const Vec3 t1 = b.unitOrthogonal();
    const Vec3 t2 = b.cross(t1);
    const double sigma = deg_to_rad(noise_deg);
    b = (b + sigma * rng.normal() * t1 + sigma * rng.normal() * t2).normalized();
    dirs.push_back(UnitVec3::from_normalized(b));
    mags.push_back(c.mag + 0.1 * rng.normal());
  }
  const Vec3 center = dirs.front().vec();
  for (std::size_t k = 0; k < false_count; ++k) {
    const Vec3 v = (center + 0.15 * random_unit(rng)).normalized();
    dirs.push_back(UnitVec3::from_normalized(v));
    mags.push_back(rng.uniform(1.0, 6.0));
  }
  m.scene = compute_scene_features(dirs, mags);
  return m;
}

}  // namespace starid::test
