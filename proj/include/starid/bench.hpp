#pragma once

// Experiment campaigns: noise sweeps over simulated scenes, per-scene scoring
// against ground truth, and aggregated reports.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starid/catalog.hpp"
#include "starid/simulator.hpp"
#include "starid/solver.hpp"

namespace starid {

enum class Outcome { Success, NoResult, FalsePositive };

const char* to_string(Outcome o);

/// truth_ids[i] is the catalog id behind scene star i (empty for false
/// stars). Success needs an Identified status, at least `min_matches`
/// matches and every match equal to its truth id; any wrong match is a false
/// positive.
Outcome score_scene(std::span<const std::optional<std::uint32_t>> truth_ids, SolveStatus status,
                    std::span<const Match> matches, int min_matches = 3);

enum class Sweep { Position, Magnitude, FalseStars };

/// "pos", "mag" or "false". Throws std::invalid_argument.
Sweep parse_sweep(std::string_view name);
const char* to_string(Sweep s);

/// pos: 0..2 px; mag: 0..1 SD; false: 0..10 stars.
std::vector<double> default_levels(Sweep s);

/// Noise of one sweep level. Position levels are in pixels. Sweeps that do
/// not vary a source keep it at 1 px position SD and 0.3 magnitude SD.
NoiseSpec noise_at(Sweep s, double level, const CameraModel& cam);

struct NamedConfig {
  std::string name;
  SolverConfig config;
};

/// Preset name (S1, S2, S3) or a JSON file of SolverConfig fields.
NamedConfig load_named_config(const std::string& name_or_path);

struct CampaignSpec {
  Sweep sweep = Sweep::Position;
  std::vector<double> levels;
  std::vector<NamedConfig> configs;
  std::size_t scenes = 100;
  std::uint64_t seed = 1;
  CameraModel camera;
  /// 0 picks hardware concurrency, capped by ROSIA_THREADS.
  unsigned threads = 0;
  /// Also solve every scene with the magnitude-only baseline bound.
  bool compare_bounds = false;
  std::uint64_t baseline_max_iterations = 1'000'000;
};

struct ReportRow {
  std::string config;
  double level = 0.0;
  std::size_t scenes = 0;
  double id_rate = 0.0;
  double no_result_rate = 0.0;
  double false_positive_rate = 0.0;
  double mean_runtime = 0.0;
  double mean_iterations = 0.0;
  double mean_bound_evals = 0.0;
  std::size_t capped_runs = 0;
};

struct EnvironmentInfo {
  std::string cpu;
  std::string build_flags;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct BoundComparison {
  std::string config;
  double mean_iterations_triplet = 0.0;
  double mean_iterations_baseline = 0.0;
  double iteration_ratio = 0.0;
  double runtime_ratio = 0.0;
  std::size_t baseline_capped = 0;
};

struct ExperimentReport {
  Sweep sweep = Sweep::Position;
  std::size_t scenes_per_level = 0;
  std::vector<ReportRow> rows;
  std::vector<BoundComparison> comparisons;
  EnvironmentInfo environment;
};

/// Worker count: hardware concurrency, capped by ROSIA_THREADS when set.
unsigned campaign_threads();

EnvironmentInfo current_environment(std::uint64_t seed, unsigned threads);

/// Same seed gives the same rows apart from timing columns.
ExperimentReport run_campaign(const OnboardCatalog& cat, const CampaignSpec& spec);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

}  // namespace starid
