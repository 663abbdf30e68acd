#include "starid/scene_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "starid/errors.hpp"

namespace starid {

using nlohmann::json;

std::string scene_to_json_line(const SimulatedScene& scene) {
  json j;
  const Vec3& r = scene.attitude.vec();
  j["attitude_axis_angle"] = {r.x(), r.y(), r.z()};
  json stars = json::array();
  for (const SimulatedStar& s : scene.stars) {
    json e;
    e["v"] = {s.v.x(), s.v.y(), s.v.z()};
    e["mag"] = s.mag;
    e["truth_id"] = s.truth_id ? json(*s.truth_id) : json(nullptr);
    stars.push_back(std::move(e));
  }
  j["stars"] = std::move(stars);
  return j.dump();
}

namespace {

Vec3 read_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw FormatError(std::string("scene: '") + what + "' must be a 3-array");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw FormatError(std::string("scene: '") + what + "' must be numeric");
    v[k] = j[k].get<double>();
  }
  return v;
}

}  // namespace

SimulatedScene scene_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scene: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("scene: expected a JSON object");
  SimulatedScene scene;
  if (j.contains("attitude_axis_angle") && !j["attitude_axis_angle"].is_null()) {
    scene.attitude = AxisAngle(read_vec3(j["attitude_axis_angle"], "attitude_axis_angle"));
  }
  if (!j.contains("stars") || !j["stars"].is_array()) throw FormatError("scene: missing 'stars' array");
  for (const json& e : j["stars"]) {
    if (!e.is_object() || !e.contains("v") || !e.contains("mag") || !e["mag"].is_number()) {
      throw FormatError("scene: each star needs 'v' and numeric 'mag'");
    }
    SimulatedStar s;
    try {
      // Vectors written by this tool are already unit length; renormalising
      // them would perturb the last bits and break exact round trips.
      const Vec3 v = read_vec3(e["v"], "v");
      s.v = std::abs(v.norm() - 1.0) <= 1e-14 ? UnitVec3::from_normalized(v) : UnitVec3(v);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& err) {
      throw FormatError(std::string("scene: ") + err.what());
    }
    s.mag = e["mag"].get<double>();
    if (e.contains("truth_id") && !e["truth_id"].is_null()) {
      if (!e["truth_id"].is_number_unsigned()) throw FormatError("scene: 'truth_id' must be a non-negative integer");
      s.truth_id = e["truth_id"].get<std::uint32_t>();
    }
    scene.stars.push_back(s);
  }
  return scene;
}

void write_scenes(const std::filesystem::path& path, std::span<const SimulatedScene> scenes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const SimulatedScene& s : scenes) out << scene_to_json_line(s) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SimulatedScene> read_scenes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<SimulatedScene> out;
  std::string line;
  while (std::getline(in, line)) {
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    out.push_back(scene_from_json_line(line));
  }
  return out;
}

SimulatedScene read_scene_line(const std::filesystem::path& path, std::size_t line_no) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (line_no == 0) throw FormatError("scene line numbers start at 1");
  std::string line;
  for (std::size_t k = 0; k < line_no; ++k) {
    if (!std::getline(in, line)) {
      throw FormatError(path.string() + " has fewer than " + std::to_string(line_no) + " lines");
    }
  }
  return scene_from_json_line(line);
}

SceneRef parse_scene_ref(std::string_view ref) {
  const std::size_t colon = ref.rfind(':');
  if (colon != std::string_view::npos && colon + 1 < ref.size()) {
    const std::string_view suffix = ref.substr(colon + 1);
    if (std::all_of(suffix.begin(), suffix.end(), [](unsigned char c) { return std::isdigit(c); })) {
      std::size_t line = 0;
      const auto [ptr, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), line);
      if (ec == std::errc() && ptr == suffix.data() + suffix.size()) {
        return SceneRef{std::filesystem::path(std::string(ref.substr(0, colon))), line};
      }
    }
  }
  return SceneRef{std::filesystem::path(std::string(ref)), 1};
}

}  // namespace starid
