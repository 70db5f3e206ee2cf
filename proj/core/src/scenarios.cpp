#include "beamsurfer/scenarios.hpp"

#include <cmath>

#include "beamsurfer/rng.hpp"

namespace beamsurfer {

Environment default_scene()
{
  Environment env;
  env.tx_position = {0.0, 0.0};
  env.tx_boresight_deg = 0.0;
  env.walls.push_back({{{-1.0, -2.0}, {12.0, -2.0}}, 8.0, 0});
  env.nominal_distance_m = 5.0;
  return env;
}

const char* to_string(Mobility mobility) noexcept
{
  switch (mobility) {
  case Mobility::lateral:
    return "lateral";
  case Mobility::rotational:
    return "rotational";
  case Mobility::random_walk:
    return "random_walk";
  }
  return "?";
}

MotionModel default_motion(Mobility mobility, std::uint64_t seed)
{
  // Trials differ in where along the path or sweep the user starts.
  const double phase = RandomStream(seed, Stream::scenario).uniform(0);
  MotionModel m;
  m.seed = seed;
  switch (mobility) {
  case Mobility::lateral:
    m.kind = LateralMotion{1.4, 3.0, 90.0, 6.0 * phase};
    m.start_position = {5.0, -1.5};
    m.start_orientation_deg = 180.0;
    break;
  case Mobility::rotational:
    m.kind = RotationalMotion{120.0, 120.0, 240.0 * phase};
    m.start_position = {5.0, 0.0};
    m.start_orientation_deg = 120.0;
    break;
  case Mobility::random_walk:
    m.kind = RandomWalkMotion{};
    m.start_position = {5.0, 0.0};
    m.start_orientation_deg = 180.0;
    break;
  }
  return m;
}

ScenarioConfig mobility_scenario(Mobility mobility, std::uint64_t seed, double duration_ms)
{
  ScenarioConfig c;
  c.env = default_scene();
  c.motion = default_motion(mobility, seed);
  c.seed = seed;
  c.duration_ms = duration_ms;
  c.policies = {Policy::beamsurfer, Policy::oracle};
  return c;
}

BctResult simulate_bct(const BctCell& cell, double sample_ms)
{
  Environment env;
  env.nominal_distance_m = cell.distance_m;
  const BeamCodebook tx = BeamCodebook::narrow();
  const BeamCodebook rx = BeamCodebook::preset(cell.rx_codebook);
  LinkBudget budget;
  budget.tx_power_dbm = calibrate_tx_power(budget, tx, rx, 5.0);

  MotionModel motion;
  motion.start_position = {cell.distance_m, 0.0};
  motion.start_orientation_deg = 180.0;
  double duration_ms = 0.0;
  if (cell.kind == BctCell::Kind::lateral) {
    const LateralMotion k{cell.speed, 4.0, 90.0};
    motion.kind = k;
    duration_ms = 1000.0 * k.path_length_m / k.speed_mps;
  } else {
    const RotationalMotion k{cell.speed, 120.0};
    motion.kind = k;
    duration_ms = 1000.0 * k.sweep_deg / k.angular_speed_dps;
  }

  const MobileState start = sample_state(motion, 0.0);
  const BeamPair pair = oracle_best_pair(env, budget, tx, rx, start, 0.0);

  BctResult out;
  out.cell = cell;
  for (double t = 0.0; t <= duration_ms + 1e-9; t += sample_ms) {
    const RssSample s = compute_rss(env, budget, tx, rx, pair.tx_beam, pair.rx_beam, sample_state(motion, t), t);
    out.series.push_back({t, s.rss_dbm});
  }
  out.bct_ms = compute_bct(out.series);
  return out;
}

std::vector<BctCell> bct_grid()
{
  std::vector<BctCell> cells;
  for (const char* cb : {"narrow", "wide"})
    for (double speed : {0.67, 1.4})
      for (double d : {5.0, 10.0})
        cells.push_back({BctCell::Kind::lateral, speed, d, cb});
  for (const char* cb : {"narrow", "wide"})
    for (double w : {40.0, 60.0, 120.0, 240.0})
      cells.push_back({BctCell::Kind::rotational, w, 5.0, cb});
  return cells;
}

ScenarioConfig blockage_trial(std::uint64_t seed, bool with_wall)
{
  const RandomStream rs(seed, Stream::scenario);
  std::uint64_t n = 0;
  const auto draw = [&](double lo, double hi) { return rs.uniform(n++, lo, hi); };

  ScenarioConfig c;
  c.seed = seed;
  c.duration_ms = 3000.0;
  c.policies = {Policy::beamsurfer, Policy::oracle};

  // Transmitter 2 m from the wall; the mobile 4.75-5.5 m away, 1-1.5 m from it.
  const double range = draw(4.75, 5.5);
  const Vec2 rx{range, -2.0 + draw(1.0, 1.5)};
  c.env.tx_position = {0.0, 0.0};
  c.env.tx_boresight_deg = 0.0;
  if (with_wall)
    c.env.walls.push_back({{{-1.0, -2.0}, {range + 3.0, -2.0}}, 8.0, 0});
  c.env.nominal_distance_m = 5.0;

  c.motion.kind = StaticMotion{};
  c.motion.start_position = rx;
  c.motion.start_orientation_deg = wrap_deg(bearing_deg(rx, c.env.tx_position) + draw(-10.0, 10.0));

  Blocker b;
  b.radius_m = 0.25;
  b.attenuation_db = draw(15.0, 25.0);
  b.onset_ramp_ms = 30.0;
  const Vec2 on_path = c.env.tx_position + (rx - c.env.tx_position) * draw(0.15, 0.85);
  const double crossing_ms = draw(900.0, 1100.0);
  if (draw(0.0, 1.0) < 0.5) {
    b.center = on_path;
    b.appear_ms = crossing_ms;
    b.vanish_ms = crossing_ms + draw(500.0, 1500.0);
  } else {
    const double heading = bearing_deg(c.env.tx_position, rx) + (draw(0.0, 1.0) < 0.5 ? 90.0 : -90.0);
    const double speed = draw(0.5, 1.5);
    b.velocity_mps = unit_vector(heading) * speed;
    b.center = on_path - b.velocity_mps * (crossing_ms / 1000.0);
    b.appear_ms = 0.0;
  }
  c.env.blockers.push_back(b);
  return c;
}

} // namespace beamsurfer
