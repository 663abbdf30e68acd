#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "starid/bench.hpp"
#include "starid/catalog.hpp"
#include "starid/errors.hpp"
#include "starid/scene_io.hpp"
#include "starid/simulator.hpp"
#include "starid/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace starid;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitEmptyCatalog = 3;
constexpr int kExitTooFewStars = 4;

struct BuildArgs {
  std::string input, output;
  double mag_limit = 6.0;
  double min_sep_deg = 0.1;
};

struct SimulateArgs {
  std::string catalog, out;
  std::size_t scenes = 10;
  double pos_sigma_px = 0.0;
  double mag_sigma = 0.0;
  int false_stars = 0;
  std::uint64_t seed = 1;
  CameraModel cam;
};

struct SolveArgs {
  std::string catalog, scene, config = "S2";
  bool baseline = false;
  std::uint64_t max_iterations = 0;
};

struct BenchArgs {
  std::string catalog, sweep = "pos", out = "bench_out";
  std::vector<std::string> configs{"S1", "S2", "S3"};
  std::vector<double> levels;
  std::size_t scenes = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool compare_bounds = false;
  std::uint64_t baseline_max_iterations = 1'000'000;
};

int cmd_build_catalog(const BuildArgs& a) {
  const std::vector<RawStar> raw = read_raw_catalog_csv(a.input);
  const OnboardCatalog cat = build_onboard_catalog(raw, a.mag_limit, deg_to_rad(a.min_sep_deg), sha256_file(a.input));
  save_catalog(cat, a.output);
  const OnboardCatalog back = load_catalog(a.output);
  std::cout << "stars: " << back.size() << "\n"
            << "bytes: " << fs::file_size(a.output) << "\n"
            << "source_sha256: " << to_hex(back.metadata().source_hash) << "\n";
  return 0;
}

int cmd_simulate(const SimulateArgs& a) {
  const OnboardCatalog cat = load_catalog(a.catalog);
  std::vector<SimulatedScene> scenes;
  scenes.reserve(a.scenes);
  for (std::size_t k = 0; k < a.scenes; ++k) {
    NoiseSpec noise;
    noise.pos_sigma_deg = pixel_to_angle(a.pos_sigma_px, a.cam);
    noise.mag_sigma = a.mag_sigma;
    noise.false_star_count = a.false_stars;
    noise.seed = derive_seed(a.seed, k);
    scenes.push_back(generate_scene(cat, a.cam, noise));
  }
  write_scenes(a.out, scenes);
  std::size_t stars = 0;
  for (const SimulatedScene& s : scenes) stars += s.stars.size();
  std::cout << "scenes: " << scenes.size() << "\n"
            << "mean_stars: " << (scenes.empty() ? 0.0 : double(stars) / double(scenes.size())) << "\n";
  return 0;
}

int cmd_solve(const SolveArgs& a) {
  const OnboardCatalog cat = load_catalog(a.catalog);
  const SceneRef ref = parse_scene_ref(a.scene);
  const SimulatedScene scene = read_scene_line(ref.file, ref.line);
  NamedConfig nc = load_named_config(a.config);
  if (a.baseline) nc.config.use_triplet_bound = false;
  if (a.max_iterations) nc.config.max_iterations = a.max_iterations;

  std::vector<UnitVec3> v;
  std::vector<double> m;
  std::vector<std::optional<std::uint32_t>> truth;
  bool has_truth = false;
  for (const SimulatedStar& s : scene.stars) {
    v.push_back(s.v);
    m.push_back(s.mag);
    truth.push_back(s.truth_id);
    has_truth = has_truth || s.truth_id.has_value();
  }
  const SolveResult r = solve(compute_scene_features(v, m), cat, nc.config);

  json out;
  out["status"] = to_string(r.status);
  out["config"] = nc.name;
  out["q_star"] = r.q_star;
  out["scene_stars"] = scene.stars.size();
  json matches = json::array();
  for (const Match& mt : r.matches) {
    matches.push_back({{"scene_index", mt.scene_index},
                       {"catalog_id", mt.catalog_id},
                       {"angle_deg", rad_to_deg(mt.angle)}});
  }
  out["matches"] = std::move(matches);
  const Eigen::Quaterniond q = r.rotation.quaternion();
  const Vec3& aa = r.rotation.vec();
  out["attitude"] = {{"quaternion_wxyz", {q.w(), q.x(), q.y(), q.z()}}, {"axis_angle", {aa.x(), aa.y(), aa.z()}}};
  const Vec3& bb = r.bnb_rotation.vec();
  out["bnb_axis_angle"] = {bb.x(), bb.y(), bb.z()};
  out["stats"] = {{"iterations", r.stats.iterations},
                  {"max_queue_len", r.stats.max_queue_len},
                  {"bound_evals", r.stats.bound_evals},
                  {"objective_evals", r.stats.objective_evals},
                  {"wall_time_s", r.stats.wall_time_s},
                  {"iteration_cap_hit", r.stats.iteration_cap_hit}};
  if (has_truth) {
    out["score"] = to_string(score_scene(truth, r.status, r.matches, nc.config.min_matches));
    out["attitude_error_deg"] = rad_to_deg(rotation_distance(r.rotation, scene.attitude));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_bench(const BenchArgs& a) {
  const OnboardCatalog cat = load_catalog(a.catalog);
  CampaignSpec spec;
  spec.sweep = parse_sweep(a.sweep);
  spec.levels = a.levels.empty() ? default_levels(spec.sweep) : a.levels;
  for (const std::string& c : a.configs) spec.configs.push_back(load_named_config(c));
  spec.scenes = a.scenes;
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.compare_bounds = a.compare_bounds;
  spec.baseline_max_iterations = a.baseline_max_iterations;

  const ExperimentReport report = run_campaign(cat, spec);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());
  for (const auto& [name, text] : {std::pair{"report.json", report_to_json(report)},
                                   std::pair{"report.csv", report_to_csv(report)}}) {
    const fs::path p = fs::path(a.out) / name;
    std::ofstream f(p, std::ios::trunc);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed: " + p.string());
  }
  std::cout << report_to_csv(report);
  for (const BoundComparison& c : report.comparisons) {
    std::cout << "bound comparison " << c.config << ": iterations " << c.mean_iterations_baseline << " / "
              << c.mean_iterations_triplet << " = " << c.iteration_ratio << "x, runtime " << c.runtime_ratio
              << "x, baseline capped " << c.baseline_capped << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lost-in-space star identification by branch-and-bound rotation search"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-catalog", "Build an onboard catalog from an id,ra_deg,dec_deg,vmag CSV");
  b->add_option("--input", build.input, "Input CSV")->required();
  b->add_option("--output", build.output, "Output catalog file")->required();
  b->add_option("--mag-limit", build.mag_limit, "Faintest magnitude kept")->capture_default_str();
  b->add_option("--min-sep-deg", build.min_sep_deg, "Binary-star separation in degrees")->capture_default_str();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Write simulated scenes as JSON Lines");
  s->add_option("--catalog", sim.catalog)->required();
  s->add_option("--out", sim.out)->required();
  s->add_option("--scenes", sim.scenes)->capture_default_str();
  s->add_option("--pos-sigma-px", sim.pos_sigma_px, "Position noise SD in pixels")->capture_default_str();
  s->add_option("--mag-sigma", sim.mag_sigma, "Magnitude noise SD")->capture_default_str();
  s->add_option("--false-stars", sim.false_stars)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--fov-deg", sim.cam.fov_deg)->capture_default_str();
  s->add_option("--resolution", sim.cam.resolution)->capture_default_str();
  s->add_option("--camera-mag-limit", sim.cam.mag_limit)->capture_default_str();

  SolveArgs solve_args;
  auto* v = app.add_subcommand("solve", "Identify one scene");
  v->add_option("--catalog", solve_args.catalog)->required();
  v->add_option("--scene", solve_args.scene, "<file.jsonl>[:<line>], line numbers start at 1")->required();
  v->add_option("--config", solve_args.config, "S1, S2, S3 or a JSON config file")->capture_default_str();
  v->add_flag("--baseline-bound", solve_args.baseline, "Use the magnitude-only baseline bound");
  v->add_option("--max-iterations", solve_args.max_iterations, "Override the iteration cap");

  BenchArgs bench;
  auto* e = app.add_subcommand("bench", "Run a noise-sweep campaign");
  e->add_option("--catalog", bench.catalog)->required();
  e->add_option("--sweep", bench.sweep, "pos, mag or false")->capture_default_str();
  e->add_option("--configs", bench.configs, "Comma-separated presets or config files")
      ->delimiter(',')
      ->capture_default_str();
  e->add_option("--levels", bench.levels, "Comma-separated sweep levels (default: full sweep)")->delimiter(',');
  e->add_option("--scenes", bench.scenes, "Scenes per level")->capture_default_str();
  e->add_option("--seed", bench.seed)->capture_default_str();
  e->add_option("--out", bench.out, "Output directory")->capture_default_str();
  e->add_option("--threads", bench.threads, "Worker threads (0: all, capped by ROSIA_THREADS)");
  e->add_flag("--compare-bounds", bench.compare_bounds, "Also solve with the baseline bound");
  e->add_option("--baseline-max-iterations", bench.baseline_max_iterations)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (b->parsed()) return cmd_build_catalog(build);
    if (s->parsed()) return cmd_simulate(sim);
    if (v->parsed()) return cmd_solve(solve_args);
    if (e->parsed()) return cmd_bench(bench);
  } catch (const EmptyCatalog& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitEmptyCatalog;
  } catch (const TooFewStars& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitTooFewStars;
  } catch (const FormatError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
