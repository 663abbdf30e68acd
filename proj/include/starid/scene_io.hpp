#pragma once

// JSON Lines scene files, one scene per line:
//   {"attitude_axis_angle":[r1,r2,r3],
//    "stars":[{"v":[x,y,z],"mag":m,"truth_id":id|null}, ...]}

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starid/simulator.hpp"

namespace starid {

std::string scene_to_json_line(const SimulatedScene& scene);

/// Throws FormatError on malformed input.
SimulatedScene scene_from_json_line(std::string_view line);

void write_scenes(const std::filesystem::path& path, std::span<const SimulatedScene> scenes);
std::vector<SimulatedScene> read_scenes(const std::filesystem::path& path);

/// 1-based line number; blank lines count. Throws IoError or FormatError.
SimulatedScene read_scene_line(const std::filesystem::path& path, std::size_t line);

/// "<file>" or "<file>:<line>". The suffix after the last ':' is taken as a
/// line number only if it is all digits; a bare file means line 1.
struct SceneRef {
  std::filesystem::path file;
  std::size_t line = 1;
};
SceneRef parse_scene_ref(std::string_view ref);

}  // namespace starid
