#pragma once

// Branch-and-bound rotation search for lost-in-space star identification.
//
// Q(R) counts scene stars that land within alpha_eps of some star of their
// sub-catalog after rotation by R. For a cube of rotations with center u and
// half-diagonal alpha_B, the bound counts stars whose cap of radius alpha_B
// around R_u s_i meets a catalog cap of radius alpha_eps. Both are answered by
// per-star circular R-trees over stereographically projected catalog caps.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "starid/catalog.hpp"
#include "starid/geometry.hpp"
#include "starid/scene.hpp"
#include "starid/spatial_index.hpp"

namespace starid {

struct SolverConfig {
  double alpha_eps = deg_to_rad(0.0275);
  double eps_v = 0.6;
  int K = 2;
  int min_matches = 3;
  double min_match_fraction = 0.30;
  /// false selects the magnitude-only baseline pair (K treated as 0).
  bool use_triplet_bound = true;
  std::uint64_t max_iterations = 1'000'000;

  /// "S1", "S2" or "S3". Throws std::invalid_argument otherwise.
  static SolverConfig preset(std::string_view name);

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  int effective_order() const { return use_triplet_bound ? K : 0; }
};

enum class SolveStatus { Identified, NoResult };

const char* to_string(SolveStatus s);

struct Match {
  std::uint32_t scene_index = 0;
  std::uint32_t catalog_index = 0;
  std::uint32_t catalog_id = 0;
  double angle = 0.0;
};

struct SearchStats {
  std::uint64_t iterations = 0;
  std::uint64_t max_queue_len = 0;
  std::uint64_t bound_evals = 0;
  std::uint64_t objective_evals = 0;
  double wall_time_s = 0.0;
  bool iteration_cap_hit = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NoResult;
  /// Refined attitude (body to inertial) when identified, else the BnB estimate.
  AxisAngle rotation;
  /// Best cube center found by the search.
  AxisAngle bnb_rotation;
  int q_star = 0;
  std::vector<Match> matches;
  SearchStats stats;
};

using Matchlist = std::vector<std::uint32_t>;

/// Hooks into the search, used by property tests.
class SearchObserver {
 public:
  virtual ~SearchObserver() = default;
  virtual void on_pop(const RotationCube& /*cube*/, int /*bound*/, const Matchlist& /*matchlist*/) {}
  /// Called for every child that meets the pi-ball, before the insert decision.
  virtual void on_branch(const RotationCube& /*parent*/, int /*parent_bound*/, const Matchlist& /*parent_ml*/,
                         const RotationCube& /*child*/, int /*child_bound*/, const Matchlist& /*child_ml*/) {}
};

/// Scene, sub-catalogs and the per-star trees. Immutable after construction.
class IdentificationProblem {
 public:
  IdentificationProblem(std::span<const SceneStar> scene, const OnboardCatalog& cat, const SolverConfig& cfg);

  std::size_t size() const { return scene_.size(); }
  const std::vector<SceneStar>& scene() const { return scene_; }
  const std::vector<SubCatalog>& sub_catalogs() const { return subcats_; }
  const CircularRTree& tree(std::size_t i) const { return trees_[i]; }
  const OnboardCatalog& catalog() const { return *cat_; }
  const SolverConfig& config() const { return cfg_; }

  /// All scene indices.
  Matchlist full_matchlist() const;

  /// Q at rotation r, restricted to `matchlist`. When `matches` is given it
  /// receives the nearest catalog star of every matched scene star.
  int evaluate_objective(const Vec3& r, const Matchlist& matchlist, std::vector<Match>* matches = nullptr) const;
  int evaluate_objective(const Vec3& r, std::vector<Match>* matches = nullptr) const;

  /// Q-bar over the cube, restricted to `matchlist`; `next` receives the
  /// stars that still have a candidate. Centers outside the pi-ball are
  /// clamped to it, alpha_B is kept.
  int evaluate_upper_bound(const RotationCube& cube, const Matchlist& matchlist, Matchlist* next = nullptr) const;

 private:
  bool star_hits_point(std::size_t i, const Vec3& p) const;
  bool star_hits_cap(std::size_t i, const Vec3& p, double alpha_b) const;
  bool brute_force_hit(std::size_t i, const Vec3& p, double radius) const;

  std::vector<SceneStar> scene_;
  const OnboardCatalog* cat_;
  SolverConfig cfg_;
  std::vector<SubCatalog> subcats_;
  std::vector<CircularRTree> trees_;
};

SolveResult solve(const IdentificationProblem& problem, SearchObserver* observer = nullptr);

/// `scene` must carry its triplet features. Throws TooFewStars for fewer
/// than three stars.
SolveResult solve(std::span<const SceneStar> scene, const OnboardCatalog& cat, const SolverConfig& cfg,
                  SearchObserver* observer = nullptr);

/// Rotation R minimising sum |R body - inertial|^2 (SVD with determinant
/// correction). Throws DegenerateGeometry for fewer than two pairs or
/// collinear input.
AxisAngle solve_wahba(std::span<const std::pair<UnitVec3, UnitVec3>> body_inertial);

}  // namespace starid
