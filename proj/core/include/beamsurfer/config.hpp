#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "beamsurfer/engine.hpp"
#include "beamsurfer/errors.hpp"

namespace beamsurfer {

Environment scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Environment& env);

MotionModel motion_from_json(const nlohmann::json& doc, std::uint64_t seed);
nlohmann::json motion_to_json(const MotionModel& model);

// Relative file references resolve against `base_dir`. Throws ConfigError.
ScenarioConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

struct LoadedConfig
{
  ScenarioConfig scenario;
  nlohmann::json document;
  std::filesystem::path base_dir;
};

LoadedConfig load_config(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
// Hash of the canonical serialization with the seed applied.
std::string config_hash(const nlohmann::json& doc);

// Sets a dotted path such as "motion.speed_mps", creating objects on the way.
void set_json_path(nlohmann::json& doc, std::string_view dotted, const nlohmann::json& value);

// Number when the text parses as one, otherwise a string.
nlohmann::json parse_axis_value(std::string_view text);

} // namespace beamsurfer
