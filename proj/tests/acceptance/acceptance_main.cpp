// Acceptance gate. Each criterion runs at its stated tolerance and prints one
// [PASS]/[FAIL] line. Seeds are fixed here and were chosen before any run.
// Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "starid/bench.hpp"
#include "starid/catalog.hpp"
#include "starid/projection.hpp"
#include "starid/simulator.hpp"
#include "starid/solver.hpp"
#include "support.hpp"

using namespace starid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Scenes with at least three stars; scene k of a set uses derive_seed(seed, k).
std::vector<test::PreparedScene> scenes(std::uint64_t seed, std::size_t count, NoiseSpec noise) {
  std::vector<test::PreparedScene> out;
  for (std::uint64_t k = 0; out.size() < count; ++k) {
    noise.seed = derive_seed(seed, k);
    auto p = test::prepare(generate_scene(test::real_catalog(), CameraModel{}, noise));
    if (!p.stars.empty()) out.push_back(std::move(p));
  }
  return out;
}

// Criteria 1 and 9 share the same 50 solver runs.
struct BranchAudit : SearchObserver {
  const test::PreparedScene* scene = nullptr;
  const std::vector<std::vector<std::uint32_t>>* members = nullptr;
  double alpha_eps = 0.0;
  SplitMix64 rng{0};

  std::uint64_t pops = 0, samples = 0, bound_violations = 0, sampling_misses = 0;
  std::uint64_t branches = 0, matchlist_violations = 0, monotone_violations = 0;

  void on_pop(const RotationCube& cube, int bound, const Matchlist&) override {
    ++pops;
    for (int s = 0; s < 64; ++s) {
      Vec3 r;
      if (!sample_inside(cube, r)) {
        ++sampling_misses;
        continue;
      }
      ++samples;
      const int q = oracle::objective(scene->stars, test::real_catalog(), *members, r, alpha_eps).q;
      if (q > bound) ++bound_violations;
    }
  }

  /// Point of cube and ball. Rejection sampling first; cubes that only graze
  /// the ball get a point on the segment from the cube point nearest the
  /// origin towards a uniform cube point, which stays in both convex sets.
  bool sample_inside(const RotationCube& cube, Vec3& r) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      for (int d = 0; d < 3; ++d) r[d] = rng.uniform(cube.lower(d), cube.upper(d));
      if (r.norm() <= kPi) return true;
    }
    Vec3 a, b;
    for (int d = 0; d < 3; ++d) {
      // Upper faces are open.
      const double hi = std::nextafter(cube.upper(d), cube.lower(d));
      a[d] = std::clamp(0.0, cube.lower(d), hi);
      b[d] = rng.uniform(cube.lower(d), cube.upper(d));
    }
    if (a.norm() > kPi) return false;
    // Largest t with |a + t (b - a)| <= pi, then a uniform fraction of it.
    const Vec3 v = b - a;
    const double vv = v.squaredNorm();
    double t_max = 1.0;
    if (vv > 0.0) {
      const double av = a.dot(v);
      t_max = std::min(1.0, (-av + std::sqrt(av * av - vv * (a.squaredNorm() - kPi * kPi))) / vv);
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
      r = a + rng.uniform(0.0, t_max) * v;
      if (r.norm() <= kPi && cube.contains(r)) return true;
    }
    r = a;
    return cube.contains(r);
  }

  void on_branch(const RotationCube&, int parent_bound, const Matchlist& parent_ml, const RotationCube&,
                 int child_bound, const Matchlist& child_ml) override {
    ++branches;
    if (!std::includes(parent_ml.begin(), parent_ml.end(), child_ml.begin(), child_ml.end())) {
      ++matchlist_violations;
    }
    if (child_bound > parent_bound) ++monotone_violations;
  }
};

BranchAudit audit;
double audit_seconds = 0.0;

Verdict bound_validity() {
  const auto t0 = Clock::now();
  const SolverConfig cfg = SolverConfig::preset("S2");
  audit.rng = SplitMix64(101);
  audit.alpha_eps = cfg.alpha_eps;
  for (const auto& p : scenes(1001, 50, test::standard_noise(0))) {
    const auto mem = oracle::members(p.stars, test::real_catalog(), cfg.alpha_eps, cfg.eps_v, cfg.effective_order());
    audit.scene = &p;
    audit.members = &mem;
    solve(p.stars, test::real_catalog(), cfg, &audit);
  }
  audit_seconds = seconds_since(t0);
  const bool pass = audit.bound_violations == 0 && audit.sampling_misses == 0 && audit_seconds < 120.0;
  return {pass, fmt("%llu popped cubes, %llu sampled rotations, %llu violations, %llu unsampled, %.1f s (limit 120 s)",
                    (unsigned long long)audit.pops, (unsigned long long)audit.samples,
                    (unsigned long long)audit.bound_violations, (unsigned long long)audit.sampling_misses,
                    audit_seconds)};
}

Verdict convergence() {
  const SolverConfig cfg = SolverConfig::preset("S2");
  SplitMix64 rng(102);
  std::uint64_t evals = 0, mismatches = 0, nonzero = 0;
  for (const auto& p : scenes(1002, 10, test::standard_noise(0))) {
    const IdentificationProblem problem(p.stars, test::real_catalog(), cfg);
    const Matchlist all = problem.full_matchlist();
    for (int t = 0; t < 1000; ++t) {
      // Half uniform over the ball, half near the true attitude.
      const Vec3 r = t % 2 ? test::random_in_pi_ball(rng)
                           : clamp_to_pi_ball(p.sim.attitude.vec() +
                                              test::random_small_rotation(rng, rng.uniform(0.0, 3 * cfg.alpha_eps)));
      const int q = problem.evaluate_objective(r, all);
      const int b = problem.evaluate_upper_bound(RotationCube(r, 0.0), all);
      ++evals;
      mismatches += q != b;
      nonzero += q > 0;
    }
  }
  return {evals == 10000 && mismatches == 0,
          fmt("%llu evaluations (%llu with Q > 0), %llu mismatches", (unsigned long long)evals,
              (unsigned long long)nonzero, (unsigned long long)mismatches)};
}

/// A cube reachable by branching that follows r for most levels.
RotationCube cube_near(SplitMix64& rng, const Vec3& r) {
  RotationCube c = RotationCube::root();
  const auto depth = rng.below(16);
  for (std::uint64_t d = 0; d < depth; ++d) {
    const auto kids = c.branch();
    std::size_t pick = rng.below(8);
    if (rng.uniform() < 0.8) {
      for (std::size_t k = 0; k < 8; ++k) {
        if (kids[k].contains(r)) pick = k;
      }
    }
    if (!cube_intersects_pi_ball(kids[pick])) break;
    c = kids[pick];
  }
  return c;
}

Verdict oracle_equivalence() {
  const SolverConfig cfg = SolverConfig::preset("S2");
  SplitMix64 rng(103);
  std::uint64_t compared = 0, excluded = 0, mismatches = 0;
  const auto set = scenes(1003, 100, test::standard_noise(0));
  for (std::size_t k = 0; compared < 1000; ++k) {
    const auto& p = set[k % set.size()];
    const IdentificationProblem problem(p.stars, test::real_catalog(), cfg);
    const auto mem = oracle::members(p.stars, test::real_catalog(), cfg.alpha_eps, cfg.eps_v, cfg.effective_order());
    const Matchlist all = problem.full_matchlist();
    for (int t = 0; t < 10 && compared < 1000; ++t) {
      const Vec3 r = t % 2 ? test::random_in_pi_ball(rng)
                           : clamp_to_pi_ball(p.sim.attitude.vec() +
                                              test::random_small_rotation(rng, rng.uniform(0.0, 2 * cfg.alpha_eps)));
      const RotationCube cube = cube_near(rng, p.sim.attitude.vec());
      const oracle::Eval qo = oracle::objective(p.stars, test::real_catalog(), mem, r, cfg.alpha_eps);
      const oracle::Eval bo =
          oracle::upper_bound(p.stars, test::real_catalog(), mem, cube.center, cube.half_side, cfg.alpha_eps, all);
      if (qo.margin < 1e-9 || bo.margin < 1e-9) {
        ++excluded;
        continue;
      }
      Matchlist next;
      const bool same = problem.evaluate_objective(r, all) == qo.q &&
                        problem.evaluate_upper_bound(cube, all, &next) == bo.q && next == bo.hits;
      mismatches += !same;
      ++compared;
    }
  }
  return {mismatches == 0, fmt("%llu instances (objective and bound), %llu boundary cases excluded, %llu mismatches",
                               (unsigned long long)compared, (unsigned long long)excluded,
                               (unsigned long long)mismatches)};
}

Verdict global_optimality() {
  const auto t0 = Clock::now();
  SplitMix64 rng(104);
  int failures = 0, nontrivial = 0;
  std::uint64_t grid_points = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n_cat = 20 + rng.below(11);
    const std::size_t n_scene = 6 + rng.below(3);
    // Two of the scene stars are false, so the optimum is not simply every star.
    const test::MiniInstance m = test::make_mini_instance(rng, n_cat, n_scene - 2, 35.0, 0.05, 2);
    SolverConfig cfg;
    cfg.alpha_eps = deg_to_rad(1.0);
    cfg.eps_v = 0.5;
    cfg.K = t % 2 ? 2 : 0;
    const SolveResult res = solve(m.scene, m.catalog, cfg);
    const auto mem = oracle::members(m.scene, m.catalog, cfg.alpha_eps, cfg.eps_v, cfg.K);
    const oracle::GridResult grid = oracle::grid_search(m.scene, m.catalog, mem, cfg.alpha_eps, deg_to_rad(0.25));
    grid_points += grid.points_evaluated;
    failures += res.q_star != grid.best;
    int ceiling = 0;
    for (const auto& l : mem) ceiling += !l.empty();
    nontrivial += grid.best >= 3 && grid.best < ceiling;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 300.0,
          fmt("50 instances (%d with 3 <= optimum < matchable stars), %d disagreements, %llu grid points scored, %.1f s (limit 300 s)",
              nontrivial, failures, (unsigned long long)grid_points, secs)};
}

struct Rates {
  std::size_t scenes = 0, success = 0, no_result = 0, false_positive = 0;
  double id() const { return static_cast<double>(success) / static_cast<double>(scenes); }
  double fp() const { return static_cast<double>(false_positive) / static_cast<double>(scenes); }
};

/// Scenes drawn exactly as the bench command draws them; scenes with fewer
/// than three stars count as no result.
Rates identification(std::uint64_t seed, std::size_t count, NoiseSpec noise, const SolverConfig& cfg) {
  Rates r;
  for (std::uint64_t k = 0; k < count; ++k) {
    noise.seed = derive_seed(seed, k);
    const auto p = test::prepare(generate_scene(test::real_catalog(), CameraModel{}, noise));
    ++r.scenes;
    if (p.stars.empty()) {
      ++r.no_result;
      continue;
    }
    const SolveResult res = solve(p.stars, test::real_catalog(), cfg);
    const auto truth = test::truth_ids(p.sim);
    switch (score_scene(truth, res.status, res.matches, cfg.min_matches)) {
      case Outcome::Success:
        ++r.success;
        break;
      case Outcome::NoResult:
        ++r.no_result;
        break;
      case Outcome::FalsePositive:
        ++r.false_positive;
        break;
    }
  }
  return r;
}

Verdict zero_noise_identification() {
  const Rates r = identification(1005, 100, NoiseSpec{}, SolverConfig::preset("S2"));
  return {r.id() >= 0.99 && r.false_positive == 0,
          fmt("id_rate %.3f (need >= 0.99), false_positive_rate %.3f (need 0), no_result %zu/%zu", r.id(), r.fp(),
              r.no_result, r.scenes)};
}

Verdict positional_noise() {
  const Rates r = identification(1006, 100, test::standard_noise(0), SolverConfig::preset("S2"));
  return {r.id() >= 0.93, fmt("id_rate %.3f (need >= 0.93), no_result %zu, false_positive %zu of %zu scenes", r.id(),
                              r.no_result, r.false_positive, r.scenes)};
}

Verdict tight_bound_speedup() {
  const std::uint64_t cap = 50000;
  SolverConfig tight = SolverConfig::preset("S2");
  SolverConfig loose = tight;
  loose.use_triplet_bound = false;
  loose.max_iterations = cap;
  double it_tight = 0, it_loose = 0, t_tight = 0, t_loose = 0;
  int capped = 0;
  const auto set = scenes(1007, 50, test::standard_noise(0));
  for (const auto& p : set) {
    const SolveResult a = solve(p.stars, test::real_catalog(), tight);
    const SolveResult b = solve(p.stars, test::real_catalog(), loose);
    it_tight += static_cast<double>(a.stats.iterations);
    it_loose += static_cast<double>(b.stats.iterations);  // capped runs stop at the cap
    t_tight += a.stats.wall_time_s;
    t_loose += b.stats.wall_time_s;
    capped += b.stats.iteration_cap_hit;
  }
  const double n = static_cast<double>(set.size());
  const double ratio = it_loose / it_tight;
  return {ratio >= 10.0,
          fmt("mean iterations baseline %.0f / triplet %.1f = %.1fx (need >= 10x); runtime ratio %.1fx; "
              "%d of 50 baseline runs capped at %llu",
              it_loose / n, it_tight / n, ratio, t_loose / t_tight, capped, (unsigned long long)cap)};
}

Verdict catalog_scaling() {
  std::vector<double> m, bytes;
  for (double lim = 5.0; lim <= 6.5 + 1e-9; lim += 0.25) {
    const OnboardCatalog cat = build_onboard_catalog(test::real_raw_catalog(), lim, deg_to_rad(0.1));
    m.push_back(static_cast<double>(cat.size()));
    bytes.push_back(static_cast<double>(serialize_catalog(cat).size()));
  }
  // Ordinary least squares of size on star count.
  const double n = static_cast<double>(m.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    mx += m[k] / n;
    my += bytes[k] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    sxy += (m[k] - mx) * (bytes[k] - my);
    sxx += (m[k] - mx) * (m[k] - mx);
    syy += (bytes[k] - my) * (bytes[k] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  const double mb6 = static_cast<double>(serialize_catalog(test::real_catalog()).size()) / 1e6;
  const bool pass = r2 >= 0.999 && std::abs(mb6 - 0.24) <= 0.3 * 0.24;
  return {pass, fmt("R^2 %.6f over %zu limits (M %.0f..%.0f, slope %.1f B/star); mag-6 size %.3f MB (need 0.24 +/- 30%%)",
                    r2, m.size(), m.front(), m.back(), sxy / sxx, mb6)};
}

Verdict monotonicity() {
  return {audit.branches > 0 && audit.matchlist_violations == 0 && audit.monotone_violations == 0,
          fmt("%llu branch events from the bound-validity runs, %llu matchlist violations, %llu bound increases",
              (unsigned long long)audit.branches, (unsigned long long)audit.matchlist_violations,
              (unsigned long long)audit.monotone_violations)};
}

/// Deviations are measured on the sphere: the planar distance to the computed
/// boundary divided by the local scale factor (1 + |p|^2) / 2 of the
/// projection. Near N the map magnifies by up to ~1e8 at |p| ~ 1e4, so a
/// boundary point that is itself only representable to 1e-16 lands 1e-8 off
/// the line in the plane. Below |p| = 1 the factor is at most 1 and the test
/// is at least as strict as a planar one.
Verdict conformality() {
  SplitMix64 rng(110);
  double worst = 0.0, worst_planar = 0.0, worst_planar_near = 0.0;
  std::uint64_t points = 0, failures = 0;
  int kinds[3] = {0, 0, 0};
  for (int k = 0; k < 1000; ++k) {
    SphericalPatch patch{UnitVec3::from_normalized(test::random_unit(rng)), rng.uniform(1e-4, kPi - 1e-4)};
    if (k % 10 == 0) {
      // Every tenth patch has its boundary through the projection pole.
      const double a = rng.uniform(1e-3, kPi - 1e-3);
      patch = SphericalPatch{SphericalCoord{a, rng.uniform(0.0, 2 * kPi)}.to_unit(), a};
    }
    const ProjectedPatch proj = project_patch(patch);
    ++kinds[proj.index()];
    const Vec3 x = patch.center.vec();
    for (int s = 0; s < 64; ++s) {
      const Vec3 t = test::random_unit(rng);
      const Vec3 y = std::cos(patch.alpha) * x + std::sin(patch.alpha) * (t - t.dot(x) * x).normalized();
      if (near_projection_pole(y)) continue;
      const Vec2 p = project_point(y);
      double err = 0.0;
      if (const auto* h = std::get_if<HalfPlane>(&proj)) {
        err = std::abs(h->normal.dot(p) - h->offset);
      } else if (const auto* i = std::get_if<InteriorCircle>(&proj)) {
        err = std::abs((p - i->center).norm() - i->radius);
      } else {
        const auto& e = std::get<ExteriorCircle>(proj);
        err = std::abs((p - e.center).norm() - e.radius);
      }
      const double on_sphere = err / std::max(1.0, 0.5 * (1.0 + p.squaredNorm()));
      worst = std::max(worst, on_sphere);
      worst_planar = std::max(worst_planar, err);
      if (p.norm() <= 10.0) worst_planar_near = std::max(worst_planar_near, err);
      failures += on_sphere > 1e-9;
      ++points;
    }
  }
  return {failures == 0, fmt("1000 patches (%d interior, %d exterior, %d half-plane), %llu boundary points, "
                             "max deviation %.2e on the sphere (limit 1e-9); planar max %.2e overall, "
                             "%.2e where |p| <= 10",
                             kinds[0], kinds[1], kinds[2], (unsigned long long)points, worst, worst_planar,
                             worst_planar_near)};
}

}  // namespace

// Optional arguments select criteria by id (e.g. "C2 C8"); the default runs
// all of them. C9 reuses the search events recorded by C1.
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  const auto selected = [&](const std::string& id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"C1", "bound validity", bound_validity},
      {"C2", "convergence at a collapsed cube", convergence},
      {"C3", "oracle equivalence", oracle_equivalence},
      {"C4", "global optimality on mini instances", global_optimality},
      {"C5", "zero-noise identification", zero_noise_identification},
      {"C6", "positional-noise identification", positional_noise},
      {"C7", "tight-bound speedup", tight_bound_speedup},
      {"C8", "catalog scaling", catalog_scaling},
      {"C9", "matchlist and bound monotonicity", monotonicity},
      {"C10", "projection conformality", conformality},
  };
  if (selected("C9") && !selected("C1")) bound_validity();
  int failed = 0;
  std::size_t ran = 0;
  for (const Criterion& c : criteria) {
    if (!selected(c.id)) continue;
    ++ran;
    const auto t0 = Clock::now();
    const Verdict v = c.run();
    failed += !v.pass;
    std::printf("[%s] %s %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", ran, failed);
  return failed == 0 ? 0 : 1;
}
