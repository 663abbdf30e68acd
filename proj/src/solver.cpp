#include "starid/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "starid/errors.hpp"

namespace starid {

namespace {

// Query caps whose boundary passes this close to the projection pole produce
// huge planar circles; those stars are answered on the sphere directly.
constexpr double kNearPoleCapMargin = 1e-6;

struct QueueEntry {
  RotationCube cube;
  int bound = 0;
  std::uint64_t seq = 0;
  Matchlist matchlist;
};

// Heap order: higher bound first, then coarser cube, then insertion order.
struct LowerPriority {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    if (a.cube.half_side != b.cube.half_side) return a.cube.half_side < b.cube.half_side;
    return a.seq > b.seq;
  }
};

}  // namespace

SolverConfig SolverConfig::preset(std::string_view name) {
  SolverConfig c;
  if (name == "S1") {
    c.alpha_eps = deg_to_rad(0.0205);
    c.eps_v = 0.45;
  } else if (name == "S2") {
    c.alpha_eps = deg_to_rad(0.0275);
    c.eps_v = 0.6;
  } else if (name == "S3") {
    c.alpha_eps = deg_to_rad(0.0275);
    c.eps_v = 1.2;
  } else {
    throw std::invalid_argument("unknown solver preset '" + std::string(name) + "'");
  }
  return c;
}

void SolverConfig::validate() const {
  if (!(alpha_eps > 0.0 && alpha_eps < kPi)) throw std::invalid_argument("alpha_eps must lie in (0, pi)");
  if (!(eps_v >= 0.0)) throw std::invalid_argument("eps_v must be non-negative");
  if (K < 0 || K > 2) throw std::invalid_argument("K must be 0, 1 or 2");
  if (min_matches < 1) throw std::invalid_argument("min_matches must be positive");
  if (!(min_match_fraction > 0.0 && min_match_fraction <= 1.0)) {
    throw std::invalid_argument("min_match_fraction must lie in (0, 1]");
  }
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
}

const char* to_string(SolveStatus s) { return s == SolveStatus::Identified ? "Identified" : "NoResult"; }

IdentificationProblem::IdentificationProblem(std::span<const SceneStar> scene, const OnboardCatalog& cat,
                                             const SolverConfig& cfg)
    : scene_(scene.begin(), scene.end()), cat_(&cat), cfg_(cfg) {
  cfg_.validate();
  if (scene_.size() < 3) {
    throw TooFewStars("scene has " + std::to_string(scene_.size()) + " stars, at least 3 are required");
  }
  subcats_ = extract_sub_catalogs(scene_, cat, cfg_.alpha_eps, cfg_.eps_v, cfg_.effective_order());

  // Catalog caps are shared between the trees of all scene stars.
  std::vector<ProjectedPatch> caps(cat.size());
  std::vector<bool> projected(cat.size(), false);
  trees_.reserve(scene_.size());
  for (const SubCatalog& sub : subcats_) {
    std::vector<CircularRTree::CircleEntry> circles;
    std::vector<CircularRTree::PatchEntry> overflow;
    circles.reserve(sub.indices.size());
    for (std::uint32_t j : sub.indices) {
      if (!projected[j]) {
        caps[j] = project_patch(SphericalPatch{cat[j].c, cfg_.alpha_eps});
        projected[j] = true;
      }
      if (const auto* ic = std::get_if<InteriorCircle>(&caps[j])) {
        circles.push_back({*ic, j});
      } else {
        overflow.push_back({caps[j], j});
      }
    }
    trees_.push_back(CircularRTree::build(std::move(circles), std::move(overflow)));
  }
}

Matchlist IdentificationProblem::full_matchlist() const {
  Matchlist all(scene_.size());
  std::iota(all.begin(), all.end(), 0u);
  return all;
}

bool IdentificationProblem::brute_force_hit(std::size_t i, const Vec3& p, double radius) const {
  for (std::uint32_t j : subcats_[i].indices) {
    if (angular_distance(p, (*cat_)[j].c.vec()) <= radius) return true;
  }
  return false;
}

bool IdentificationProblem::star_hits_point(std::size_t i, const Vec3& p) const {
  if (near_projection_pole(p)) return brute_force_hit(i, p, cfg_.alpha_eps);
  return trees_[i].any_point(project_point(p));
}

bool IdentificationProblem::star_hits_cap(std::size_t i, const Vec3& p, double alpha_b) const {
  if (subcats_[i].indices.empty()) return false;
  if (cfg_.alpha_eps + alpha_b >= kPi) return true;
  const double phi = std::atan2(std::hypot(p.x(), p.y()), p.z());
  if (std::abs(phi - alpha_b) < kNearPoleCapMargin) return brute_force_hit(i, p, cfg_.alpha_eps + alpha_b);
  const ProjectedPatch q = project_patch(SphericalPatch{UnitVec3::from_normalized(p), alpha_b});
  return trees_[i].any_patch(q);
}

int IdentificationProblem::evaluate_objective(const Vec3& r, const Matchlist& matchlist,
                                              std::vector<Match>* matches) const {
  const Mat3 R = AxisAngle(r).matrix();
  int q = 0;
  for (std::uint32_t i : matchlist) {
    const Vec3 p = R * scene_[i].s.vec();
    if (!matches) {
      if (star_hits_point(i, p)) ++q;
      continue;
    }
    // Nearest qualifying catalog star wins.
    Match best{i, 0, 0, std::numeric_limits<double>::infinity()};
    const auto consider = [&](std::uint32_t j) {
      const double a = angular_distance(p, (*cat_)[j].c.vec());
      if (a < best.angle || (a == best.angle && j < best.catalog_index)) {
        best.catalog_index = j;
        best.angle = a;
      }
      return true;
    };
    if (near_projection_pole(p)) {
      for (std::uint32_t j : subcats_[i].indices) {
        if (angular_distance(p, (*cat_)[j].c.vec()) <= cfg_.alpha_eps) consider(j);
      }
    } else {
      trees_[i].visit_point(project_point(p), consider);
    }
    if (std::isfinite(best.angle)) {
      best.catalog_id = (*cat_)[best.catalog_index].id;
      matches->push_back(best);
      ++q;
    }
  }
  return q;
}

int IdentificationProblem::evaluate_objective(const Vec3& r, std::vector<Match>* matches) const {
  return evaluate_objective(r, full_matchlist(), matches);
}

int IdentificationProblem::evaluate_upper_bound(const RotationCube& cube, const Matchlist& matchlist,
                                                Matchlist* next) const {
  const Vec3 u = clamp_to_pi_ball(cube.center);
  const double alpha_b = cube.alpha();
  if (next) next->clear();
  const Mat3 R = AxisAngle(u).matrix();
  int q = 0;
  for (std::uint32_t i : matchlist) {
    const Vec3 p = R * scene_[i].s.vec();
    // A collapsed cube is a single rotation: the bound is the objective.
    const bool hit = alpha_b == 0.0 ? star_hits_point(i, p) : star_hits_cap(i, p, alpha_b);
    if (hit) {
      ++q;
      if (next) next->push_back(i);
    }
  }
  return q;
}

SolveResult solve(const IdentificationProblem& problem, SearchObserver* observer) {
  const auto t0 = std::chrono::steady_clock::now();
  const SolverConfig& cfg = problem.config();
  SolveResult result;
  SearchStats& stats = result.stats;

  std::vector<QueueEntry> heap;
  std::uint64_t seq = 0;
  const auto push = [&](QueueEntry&& e) {
    heap.push_back(std::move(e));
    std::push_heap(heap.begin(), heap.end(), LowerPriority{});
    stats.max_queue_len = std::max<std::uint64_t>(stats.max_queue_len, heap.size());
  };

  {
    QueueEntry root;
    root.cube = RotationCube::root();
    root.seq = seq++;
    root.bound = problem.evaluate_upper_bound(root.cube, problem.full_matchlist(), &root.matchlist);
    ++stats.bound_evals;
    push(std::move(root));
  }

  int q_star = 0;
  Vec3 r_star = Vec3::Zero();
  Matchlist child_ml;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), LowerPriority{});
    QueueEntry top = std::move(heap.back());
    heap.pop_back();
    if (top.bound <= q_star) break;
    if (stats.iterations >= cfg.max_iterations) {
      stats.iteration_cap_hit = true;
      break;
    }
    ++stats.iterations;
    if (observer) observer->on_pop(top.cube, top.bound, top.matchlist);

    const Vec3 u = clamp_to_pi_ball(top.cube.center);
    const int q = problem.evaluate_objective(u, top.matchlist);
    ++stats.objective_evals;
    if (q > q_star) {
      q_star = q;
      r_star = u;
    }

    for (const RotationCube& child : top.cube.branch()) {
      if (!cube_intersects_pi_ball(child)) continue;
      const int bound = problem.evaluate_upper_bound(child, top.matchlist, &child_ml);
      ++stats.bound_evals;
      if (observer) observer->on_branch(top.cube, top.bound, top.matchlist, child, bound, child_ml);
      if (bound > q_star) push(QueueEntry{child, bound, seq++, child_ml});
    }
  }

  result.q_star = q_star;
  result.bnb_rotation = AxisAngle(r_star);
  result.rotation = result.bnb_rotation;

  const double n = static_cast<double>(problem.size());
  const bool enough = q_star >= cfg.min_matches && q_star >= cfg.min_match_fraction * n;
  if (enough && !stats.iteration_cap_hit) {
    problem.evaluate_objective(r_star, &result.matches);
    result.status = SolveStatus::Identified;
    std::vector<std::pair<UnitVec3, UnitVec3>> pairs;
    pairs.reserve(result.matches.size());
    for (const Match& m : result.matches) {
      pairs.emplace_back(problem.scene()[m.scene_index].s, problem.catalog()[m.catalog_index].c);
    }
    try {
      result.rotation = solve_wahba(pairs);
    } catch (const DegenerateGeometry&) {
      // Keep the search estimate.
    }
  }

  stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

SolveResult solve(std::span<const SceneStar> scene, const OnboardCatalog& cat, const SolverConfig& cfg,
                  SearchObserver* observer) {
  const auto t0 = std::chrono::steady_clock::now();
  const IdentificationProblem problem(scene, cat, cfg);
  SolveResult r = solve(problem, observer);
  r.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace starid
