#include "beamsurfer/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <set>

namespace beamsurfer {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
  if (!obj.is_object())
    throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
}

Vec2 vec2(const json& v, const std::string& where)
{
  if (v.is_array() && v.size() == 2)
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object())
    return {v.at("x").get<double>(), v.at("y").get<double>()};
  throw ConfigError(where + ": expected [x, y]");
}

json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }

template <class T>
void read(const json& obj, const char* key, T& out)
{
  if (obj.contains(key))
    out = obj.at(key).get<T>();
}

BeamCodebook codebook(const json& spec, const std::filesystem::path& base, const std::string& where)
{
  try {
    if (spec.is_string())
      return BeamCodebook::preset(spec.get<std::string>());
    if (spec.is_object() && spec.contains("preset"))
      return BeamCodebook::preset(spec.at("preset").get<std::string>());
    if (spec.is_object() && spec.contains("file")) {
      std::filesystem::path p = spec.at("file").get<std::string>();
      if (p.is_relative())
        p = base / p;
      return BeamCodebook::from_json(read_json_file(p));
    }
    if (spec.is_object() && spec.contains("count")) {
      return BeamCodebook::uniform(spec.at("count").get<int>(), spec.value("beamwidth", 20.0),
                                   spec.value("sector_width", 120.0), spec.value("peak_gain", kDefaultPeakGainDbi));
    }
    return BeamCodebook::from_json(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

} // namespace

nlohmann::json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

Environment scene_from_json(const json& doc)
{
  check_keys(doc, {"tx", "walls", "blockers", "nominal_distance_m", "description"}, "scene");
  Environment env;
  if (doc.contains("tx")) {
    const json& tx = doc.at("tx");
    check_keys(tx, {"position", "boresight_deg"}, "scene.tx");
    if (tx.contains("position"))
      env.tx_position = vec2(tx.at("position"), "scene.tx.position");
    read(tx, "boresight_deg", env.tx_boresight_deg);
  }
  int next_id = 0;
  for (const json& w : doc.value("walls", json::array())) {
    check_keys(w, {"id", "from", "to", "reflection_loss_db"}, "scene.walls");
    Wall wall;
    wall.id = w.value("id", next_id);
    next_id = wall.id + 1;
    wall.segment = {vec2(w.at("from"), "wall.from"), vec2(w.at("to"), "wall.to")};
    read(w, "reflection_loss_db", wall.reflection_loss_db);
    env.walls.push_back(wall);
  }
  for (const json& b : doc.value("blockers", json::array())) {
    check_keys(b, {"center", "radius_m", "attenuation_db", "onset_ramp_ms", "velocity_mps", "appear_ms", "vanish_ms"},
               "scene.blockers");
    Blocker blk;
    blk.center = vec2(b.at("center"), "blocker.center");
    read(b, "radius_m", blk.radius_m);
    read(b, "attenuation_db", blk.attenuation_db);
    read(b, "onset_ramp_ms", blk.onset_ramp_ms);
    if (b.contains("velocity_mps"))
      blk.velocity_mps = vec2(b.at("velocity_mps"), "blocker.velocity_mps");
    read(b, "appear_ms", blk.appear_ms);
    if (b.contains("vanish_ms") && !b.at("vanish_ms").is_null())
      blk.vanish_ms = b.at("vanish_ms").get<double>();
    env.blockers.push_back(blk);
  }
  read(doc, "nominal_distance_m", env.nominal_distance_m);
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  return env;
}

nlohmann::json scene_to_json(const Environment& env)
{
  json walls = json::array();
  for (const Wall& w : env.walls)
    walls.push_back({{"id", w.id},
                     {"from", vec2_json(w.segment.a)},
                     {"to", vec2_json(w.segment.b)},
                     {"reflection_loss_db", w.reflection_loss_db}});
  json blockers = json::array();
  for (const Blocker& b : env.blockers) {
    json j{{"center", vec2_json(b.center)},     {"radius_m", b.radius_m},
           {"attenuation_db", b.attenuation_db}, {"onset_ramp_ms", b.onset_ramp_ms},
           {"velocity_mps", vec2_json(b.velocity_mps)}, {"appear_ms", b.appear_ms}};
    if (std::isfinite(b.vanish_ms))
      j["vanish_ms"] = b.vanish_ms;
    blockers.push_back(j);
  }
  return {{"tx", {{"position", vec2_json(env.tx_position)}, {"boresight_deg", env.tx_boresight_deg}}},
          {"walls", walls},
          {"blockers", blockers},
          {"nominal_distance_m", env.nominal_distance_m}};
}

MotionModel motion_from_json(const json& doc, std::uint64_t seed)
{
  MotionModel m;
  m.seed = seed;
  const std::string kind = doc.value("kind", std::string("static"));
  if (doc.contains("start_position"))
    m.start_position = vec2(doc.at("start_position"), "motion.start_position");
  read(doc, "start_orientation_deg", m.start_orientation_deg);
  if (kind == "static") {
    check_keys(doc, {"kind", "start_position", "start_orientation_deg"}, "motion");
    m.kind = StaticMotion{};
  } else if (kind == "lateral") {
    check_keys(doc, {"kind", "start_position", "start_orientation_deg", "speed_mps", "path_length_m", "heading_deg",
                "start_offset_m"},
               "motion");
    LateralMotion k;
    read(doc, "speed_mps", k.speed_mps);
    read(doc, "path_length_m", k.path_length_m);
    read(doc, "heading_deg", k.heading_deg);
    read(doc, "start_offset_m", k.start_offset_m);
    if (!(k.speed_mps >= 0.0) || !(k.path_length_m > 0.0))
      throw ConfigError("motion: lateral speed must be >= 0 and path length > 0");
    m.kind = k;
  } else if (kind == "rotational") {
    check_keys(doc, {"kind", "start_position", "start_orientation_deg", "angular_speed_dps", "sweep_deg",
                "start_offset_deg"},
               "motion");
    RotationalMotion k;
    read(doc, "angular_speed_dps", k.angular_speed_dps);
    read(doc, "sweep_deg", k.sweep_deg);
    read(doc, "start_offset_deg", k.start_offset_deg);
    if (!(k.angular_speed_dps >= 0.0) || !(k.sweep_deg > 0.0))
      throw ConfigError("motion: angular speed must be >= 0 and sweep > 0");
    m.kind = k;
  } else if (kind == "random_walk") {
    check_keys(doc,
               {"kind", "start_position", "start_orientation_deg", "speed_mps", "bounds_min", "bounds_max",
                "orientation_jitter_dps", "orientation_limit_deg", "leg_ms", "jitter_step_ms"},
               "motion");
    RandomWalkMotion k;
    read(doc, "speed_mps", k.speed_mps);
    if (doc.contains("bounds_min"))
      k.bounds_min = vec2(doc.at("bounds_min"), "motion.bounds_min");
    if (doc.contains("bounds_max"))
      k.bounds_max = vec2(doc.at("bounds_max"), "motion.bounds_max");
    read(doc, "orientation_jitter_dps", k.orientation_jitter_dps);
    read(doc, "orientation_limit_deg", k.orientation_limit_deg);
    read(doc, "leg_ms", k.leg_ms);
    read(doc, "jitter_step_ms", k.jitter_step_ms);
    if (!(k.bounds_max.x > k.bounds_min.x) || !(k.bounds_max.y > k.bounds_min.y))
      throw ConfigError("motion: random-walk bounds are empty");
    if (!(k.leg_ms > 0.0) || !(k.jitter_step_ms > 0.0))
      throw ConfigError("motion: leg_ms and jitter_step_ms must be positive");
    m.kind = k;
  } else {
    throw ConfigError("motion: unknown kind '" + kind + "'");
  }
  return m;
}

nlohmann::json motion_to_json(const MotionModel& model)
{
  json j{{"start_position", vec2_json(model.start_position)}, {"start_orientation_deg", model.start_orientation_deg}};
  if (std::holds_alternative<StaticMotion>(model.kind)) {
    j["kind"] = "static";
  } else if (const auto* l = std::get_if<LateralMotion>(&model.kind)) {
    j["kind"] = "lateral";
    j["speed_mps"] = l->speed_mps;
    j["path_length_m"] = l->path_length_m;
    j["heading_deg"] = l->heading_deg;
    j["start_offset_m"] = l->start_offset_m;
  } else if (const auto* r = std::get_if<RotationalMotion>(&model.kind)) {
    j["kind"] = "rotational";
    j["angular_speed_dps"] = r->angular_speed_dps;
    j["sweep_deg"] = r->sweep_deg;
    j["start_offset_deg"] = r->start_offset_deg;
  } else if (const auto* w = std::get_if<RandomWalkMotion>(&model.kind)) {
    j["kind"] = "random_walk";
    j["speed_mps"] = w->speed_mps;
    j["bounds_min"] = vec2_json(w->bounds_min);
    j["bounds_max"] = vec2_json(w->bounds_max);
    j["orientation_jitter_dps"] = w->orientation_jitter_dps;
    j["orientation_limit_deg"] = w->orientation_limit_deg;
    j["leg_ms"] = w->leg_ms;
    j["jitter_step_ms"] = w->jitter_step_ms;
  }
  return j;
}

ScenarioConfig config_from_json(const json& doc, const std::filesystem::path& base_dir)
{
  try {
    check_keys(doc,
               {"description", "scene", "scene_file", "motion", "codebooks", "budget", "protocol", "policies",
                "duration_ms", "decision_epoch_ms", "slot_us", "frame_ms", "seed", "measurement_noise_db", "ssb",
                "ladder", "control_min_snr_db", "heatmap"},
               "config");
    ScenarioConfig c;
    read(doc, "seed", c.seed);

    if (doc.contains("scene")) {
      c.env = scene_from_json(doc.at("scene"));
    } else if (doc.contains("scene_file")) {
      std::filesystem::path p = doc.at("scene_file").get<std::string>();
      if (p.is_relative())
        p = base_dir / p;
      c.env = scene_from_json(read_json_file(p));
    } else {
      throw ConfigError("config: no scene or scene_file given");
    }

    c.motion = motion_from_json(doc.value("motion", json::object()), c.seed);

    if (doc.contains("codebooks")) {
      const json& cb = doc.at("codebooks");
      check_keys(cb, {"tx", "rx", "sidelobe"}, "codebooks");
      if (cb.contains("tx"))
        c.tx_codebook = codebook(cb.at("tx"), base_dir, "codebooks.tx");
      if (cb.contains("rx"))
        c.rx_codebook = codebook(cb.at("rx"), base_dir, "codebooks.rx");
      if (cb.contains("sidelobe")) {
        const json& s = cb.at("sidelobe");
        check_keys(s, {"suppression_db", "ripple", "ripple_amplitude_db", "bucket_deg"}, "codebooks.sidelobe");
        SidelobeModel model;
        read(s, "suppression_db", model.suppression_db);
        read(s, "ripple", model.ripple);
        read(s, "ripple_amplitude_db", model.ripple_amplitude_db);
        read(s, "bucket_deg", model.bucket_deg);
        if (!(model.bucket_deg > 0.0))
          throw ConfigError("codebooks.sidelobe.bucket_deg must be positive");
        c.tx_codebook.set_sidelobe(model);
        c.rx_codebook.set_sidelobe(model);
      }
    }

    if (doc.contains("budget")) {
      const json& b = doc.at("budget");
      check_keys(b, {"tx_power_dbm", "target_rss_dbm", "noise_floor_dbm", "carrier_hz", "bandwidth_hz"}, "budget");
      if (b.contains("tx_power_dbm") && !(b.at("tx_power_dbm").is_string() && b.at("tx_power_dbm") == "auto")) {
        c.budget.tx_power_dbm = b.at("tx_power_dbm").get<double>();
        c.calibrate_tx_power = false;
      }
      read(b, "target_rss_dbm", c.target_rss_dbm);
      read(b, "noise_floor_dbm", c.budget.noise_floor_dbm);
      read(b, "carrier_hz", c.budget.carrier_hz);
      read(b, "bandwidth_hz", c.budget.bandwidth_hz);
    }

    if (doc.contains("protocol")) {
      const json& p = doc.at("protocol");
      check_keys(p,
                 {"rba_drop_db", "blockage_drop_db", "nlos_floor_db", "stored_beam_max_age_ms", "tba_timeout_ms",
                  "br_interval_ms", "control_patience", "nlos_guard_beams"},
                 "protocol");
      read(p, "rba_drop_db", c.protocol.rba_drop_db);
      read(p, "blockage_drop_db", c.protocol.blockage_drop_db);
      read(p, "nlos_floor_db", c.protocol.nlos_floor_db);
      read(p, "stored_beam_max_age_ms", c.protocol.stored_beam_max_age_ms);
      read(p, "tba_timeout_ms", c.protocol.tba_timeout_ms);
      read(p, "br_interval_ms", c.protocol.br_interval_ms);
      read(p, "control_patience", c.protocol.control_patience);
      if (p.contains("nlos_guard_beams")) {
        read(p, "nlos_guard_beams", c.protocol.nlos_guard_beams);
        c.auto_nlos_guard = false;
      }
    }

    if (doc.contains("policies")) {
      c.policies.clear();
      for (const json& p : doc.at("policies")) {
        const auto policy = parse_policy(p.get<std::string>());
        if (!policy)
          throw ConfigError("policies: unknown policy '" + p.get<std::string>() + "'");
        c.policies.push_back(*policy);
      }
    }

    read(doc, "duration_ms", c.duration_ms);
    read(doc, "decision_epoch_ms", c.decision_epoch_ms);
    read(doc, "slot_us", c.slot_us);
    read(doc, "frame_ms", c.frame_ms);
    read(doc, "measurement_noise_db", c.measurement_noise_db);
    read(doc, "control_min_snr_db", c.control_min_snr_db);

    if (doc.contains("ssb")) {
      const json& s = doc.at("ssb");
      check_keys(s, {"period_ms", "connected_period_ms", "first_rx_beam"}, "ssb");
      read(s, "period_ms", c.ssb.period_ms);
      read(s, "connected_period_ms", c.ssb.connected_period_ms);
      read(s, "first_rx_beam", c.ssb.first_rx_beam);
    }

    if (doc.contains("ladder")) {
      c.ladder.clear();
      for (const json& step : doc.at("ladder")) {
        check_keys(step, {"snr_db", "rate_bps"}, "ladder");
        c.ladder.push_back({step.at("snr_db").get<double>(), step.at("rate_bps").get<double>()});
      }
    }

    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

LoadedConfig load_config(const std::filesystem::path& path)
{
  LoadedConfig out;
  out.document = read_json_file(path);
  out.base_dir = path.parent_path();
  out.scenario = config_from_json(out.document, out.base_dir);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& doc)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

void set_json_path(nlohmann::json& doc, std::string_view dotted, const nlohmann::json& value)
{
  if (dotted.empty())
    throw ConfigError("empty axis name");
  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string key(dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
    if (key.empty())
      throw ConfigError("malformed axis name '" + std::string(dotted) + "'");
    json* next = nullptr;
    if (node->is_array()) {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
      if (ec != std::errc() || ptr != key.data() + key.size() || index >= node->size())
        throw ConfigError("axis '" + std::string(dotted) + "': bad array index '" + key + "'");
      next = &(*node)[index];
    } else {
      if (node->is_null())
        *node = json::object();
      if (!node->is_object())
        throw ConfigError("axis '" + std::string(dotted) + "': '" + key + "' is not inside an object");
      next = &(*node)[key];
    }
    if (dot == std::string_view::npos) {
      *next = value;
      return;
    }
    node = next;
    pos = dot + 1;
  }
}

nlohmann::json parse_axis_value(std::string_view text)
{
  if (text == "true")
    return true;
  if (text == "false")
    return false;
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) {
    long long i = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ec == std::errc() && ptr == s.data() + s.size())
      return i;
    return v;
  }
  return s;
}

} // namespace beamsurfer
