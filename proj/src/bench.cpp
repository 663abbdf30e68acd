#include "starid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "starid/errors.hpp"
#include "starid/rng.hpp"

#ifndef STARID_BUILD_FLAGS
#define STARID_BUILD_FLAGS "unknown"
#endif

namespace starid {

using nlohmann::json;

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success:
      return "Success";
    case Outcome::NoResult:
      return "NoResult";
    case Outcome::FalsePositive:
      return "FalsePositive";
  }
  return "?";
}

Outcome score_scene(std::span<const std::optional<std::uint32_t>> truth_ids, SolveStatus status,
                    std::span<const Match> matches, int min_matches) {
  if (status == SolveStatus::NoResult) return Outcome::NoResult;
  for (const Match& m : matches) {
    if (m.scene_index >= truth_ids.size()) return Outcome::FalsePositive;
    const auto& truth = truth_ids[m.scene_index];
    if (!truth || *truth != m.catalog_id) return Outcome::FalsePositive;
  }
  if (matches.size() < static_cast<std::size_t>(min_matches)) return Outcome::FalsePositive;
  return Outcome::Success;
}

Sweep parse_sweep(std::string_view name) {
  if (name == "pos") return Sweep::Position;
  if (name == "mag") return Sweep::Magnitude;
  if (name == "false") return Sweep::FalseStars;
  throw std::invalid_argument("unknown sweep '" + std::string(name) + "' (expected pos, mag or false)");
}

const char* to_string(Sweep s) {
  switch (s) {
    case Sweep::Position:
      return "pos";
    case Sweep::Magnitude:
      return "mag";
    case Sweep::FalseStars:
      return "false";
  }
  return "?";
}

std::vector<double> default_levels(Sweep s) {
  switch (s) {
    case Sweep::Position:
      return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    case Sweep::Magnitude:
      return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case Sweep::FalseStars:
      return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  }
  return {};
}

NoiseSpec noise_at(Sweep s, double level, const CameraModel& cam) {
  NoiseSpec n;
  n.pos_sigma_deg = pixel_to_angle(1.0, cam);
  n.mag_sigma = 0.3;
  switch (s) {
    case Sweep::Position:
      n.pos_sigma_deg = pixel_to_angle(level, cam);
      break;
    case Sweep::Magnitude:
      n.mag_sigma = level;
      break;
    case Sweep::FalseStars:
      n.false_star_count = static_cast<int>(std::lround(level));
      break;
  }
  return n;
}

NamedConfig load_named_config(const std::string& name_or_path) {
  if (name_or_path == "S1" || name_or_path == "S2" || name_or_path == "S3") {
    return NamedConfig{name_or_path, SolverConfig::preset(name_or_path)};
  }
  std::ifstream in(name_or_path);
  if (!in) throw IoError("config '" + name_or_path + "' is neither a preset nor a readable file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config " + name_or_path + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError("config " + name_or_path + ": expected a JSON object");
  try {
    NamedConfig nc;
    nc.name = j.value("name", std::filesystem::path(name_or_path).stem().string());
    SolverConfig c = j.contains("preset") ? SolverConfig::preset(j["preset"].get<std::string>()) : SolverConfig{};
    if (j.contains("alpha_eps_deg")) c.alpha_eps = deg_to_rad(j["alpha_eps_deg"].get<double>());
    if (j.contains("eps_v")) c.eps_v = j["eps_v"].get<double>();
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("min_matches")) c.min_matches = j["min_matches"].get<int>();
    if (j.contains("min_match_fraction")) c.min_match_fraction = j["min_match_fraction"].get<double>();
    if (j.contains("use_triplet_bound")) c.use_triplet_bound = j["use_triplet_bound"].get<bool>();
    if (j.contains("max_iterations")) c.max_iterations = j["max_iterations"].get<std::uint64_t>();
    c.validate();
    nc.config = c;
    return nc;
  } catch (const json::exception& e) {
    throw FormatError("config " + name_or_path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("config " + name_or_path + ": " + e.what());
  }
}

unsigned campaign_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROSIA_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

EnvironmentInfo current_environment(std::uint64_t seed, unsigned threads) {
  EnvironmentInfo env;
  env.seed = seed;
  env.threads = threads;
  env.build_flags = STARID_BUILD_FLAGS;
  env.cpu = "unknown";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) env.cpu = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  return env;
}

namespace {

struct RunRecord {
  Outcome outcome = Outcome::NoResult;
  double runtime = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t bound_evals = 0;
  bool capped = false;
};

RunRecord run_one(const OnboardCatalog& cat, const SimulatedScene& scene, const SolverConfig& cfg) {
  RunRecord rec;
  if (scene.too_few_stars()) return rec;
  std::vector<UnitVec3> v;
  std::vector<double> m;
  std::vector<std::optional<std::uint32_t>> truth;
  for (const SimulatedStar& s : scene.stars) {
    v.push_back(s.v);
    m.push_back(s.mag);
    truth.push_back(s.truth_id);
  }
  const SolveResult r = solve(compute_scene_features(v, m), cat, cfg);
  rec.outcome = score_scene(truth, r.status, r.matches, cfg.min_matches);
  rec.runtime = r.stats.wall_time_s;
  rec.iterations = r.stats.iterations;
  rec.bound_evals = r.stats.bound_evals;
  rec.capped = r.stats.iteration_cap_hit;
  return rec;
}

ReportRow aggregate(const std::string& name, double level, std::span<const RunRecord> runs) {
  ReportRow row;
  row.config = name;
  row.level = level;
  row.scenes = runs.size();
  if (runs.empty()) return row;
  std::size_t ok = 0, none = 0, fp = 0;
  for (const RunRecord& r : runs) {
    ok += r.outcome == Outcome::Success;
    none += r.outcome == Outcome::NoResult;
    fp += r.outcome == Outcome::FalsePositive;
    row.mean_runtime += r.runtime;
    row.mean_iterations += static_cast<double>(r.iterations);
    row.mean_bound_evals += static_cast<double>(r.bound_evals);
    row.capped_runs += r.capped;
  }
  const double n = static_cast<double>(runs.size());
  row.id_rate = static_cast<double>(ok) / n;
  row.no_result_rate = static_cast<double>(none) / n;
  row.false_positive_rate = static_cast<double>(fp) / n;
  row.mean_runtime /= n;
  row.mean_iterations /= n;
  row.mean_bound_evals /= n;
  return row;
}

}  // namespace

ExperimentReport run_campaign(const OnboardCatalog& cat, const CampaignSpec& spec) {
  ExperimentReport report;
  report.sweep = spec.sweep;
  report.scenes_per_level = spec.scenes;
  const unsigned threads = spec.threads ? std::min(spec.threads, campaign_threads()) : campaign_threads();
  report.environment = current_environment(spec.seed, threads);
  if (spec.scenes == 0 || spec.levels.empty() || spec.configs.empty()) return report;

  // Every config (and the baseline twin in comparison mode) sees the same scenes.
  std::vector<SolverConfig> configs;
  std::vector<std::string> names;
  for (const NamedConfig& nc : spec.configs) {
    configs.push_back(nc.config);
    names.push_back(nc.name);
    if (spec.compare_bounds) {
      SolverConfig b = nc.config;
      b.use_triplet_bound = false;
      b.max_iterations = spec.baseline_max_iterations;
      configs.push_back(b);
      names.push_back(nc.name + "/baseline");
    }
  }
  const std::size_t n_levels = spec.levels.size();
  const std::size_t n_cfg = configs.size();
  const std::size_t jobs = n_levels * spec.scenes;
  std::vector<RunRecord> records(jobs * n_cfg);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t li = job / spec.scenes;
      const std::size_t k = job % spec.scenes;
      try {
        NoiseSpec noise = noise_at(spec.sweep, spec.levels[li], spec.camera);
        noise.seed = derive_seed(derive_seed(spec.seed, li), k);
        const SimulatedScene scene = generate_scene(cat, spec.camera, noise);
        for (std::size_t c = 0; c < n_cfg; ++c) records[job * n_cfg + c] = run_one(cat, scene, configs[c]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> runs(spec.scenes);
  for (std::size_t c = 0; c < n_cfg; ++c) {
    for (std::size_t li = 0; li < n_levels; ++li) {
      for (std::size_t k = 0; k < spec.scenes; ++k) runs[k] = records[(li * spec.scenes + k) * n_cfg + c];
      report.rows.push_back(aggregate(names[c], spec.levels[li], runs));
    }
  }

  if (spec.compare_bounds) {
    for (std::size_t c = 0; c + 1 < n_cfg; c += 2) {
      BoundComparison bc;
      bc.config = names[c];
      double rt_t = 0.0, rt_b = 0.0;
      for (std::size_t job = 0; job < jobs; ++job) {
        const RunRecord& t = records[job * n_cfg + c];
        const RunRecord& b = records[job * n_cfg + c + 1];
        bc.mean_iterations_triplet += static_cast<double>(t.iterations);
        bc.mean_iterations_baseline += static_cast<double>(b.iterations);
        rt_t += t.runtime;
        rt_b += b.runtime;
        bc.baseline_capped += b.capped;
      }
      bc.mean_iterations_triplet /= static_cast<double>(jobs);
      bc.mean_iterations_baseline /= static_cast<double>(jobs);
      bc.iteration_ratio =
          bc.mean_iterations_triplet > 0.0 ? bc.mean_iterations_baseline / bc.mean_iterations_triplet : 0.0;
      bc.runtime_ratio = rt_t > 0.0 ? rt_b / rt_t : 0.0;
      report.comparisons.push_back(bc);
    }
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["sweep"] = to_string(report.sweep);
  j["scenes_per_level"] = report.scenes_per_level;
  j["environment"] = {{"cpu", report.environment.cpu},
                      {"build_flags", report.environment.build_flags},
                      {"seed", report.environment.seed},
                      {"threads", report.environment.threads}};
  json rows = json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"config", r.config},
                    {"level", r.level},
                    {"scenes", r.scenes},
                    {"id_rate", r.id_rate},
                    {"no_result_rate", r.no_result_rate},
                    {"false_positive_rate", r.false_positive_rate},
                    {"mean_runtime", r.mean_runtime},
                    {"mean_iterations", r.mean_iterations},
                    {"mean_bound_evals", r.mean_bound_evals},
                    {"capped_runs", r.capped_runs}});
  }
  j["rows"] = std::move(rows);
  json cmp = json::array();
  for (const BoundComparison& c : report.comparisons) {
    cmp.push_back({{"config", c.config},
                   {"mean_iterations_triplet", c.mean_iterations_triplet},
                   {"mean_iterations_baseline", c.mean_iterations_baseline},
                   {"iteration_ratio", c.iteration_ratio},
                   {"runtime_ratio", c.runtime_ratio},
                   {"baseline_capped", c.baseline_capped}});
  }
  j["bound_comparison"] = std::move(cmp);
  return j.dump(2);
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "config,level,id_rate,no_result_rate,false_positive_rate,mean_runtime,mean_iterations,mean_bound_evals\n";
  out << std::setprecision(10);
  for (const ReportRow& r : report.rows) {
    out << r.config << ',' << r.level << ',' << r.id_rate << ',' << r.no_result_rate << ',' << r.false_positive_rate
        << ',' << r.mean_runtime << ',' << r.mean_iterations << ',' << r.mean_bound_evals << '\n';
  }
  return out.str();
}

}  // namespace starid
