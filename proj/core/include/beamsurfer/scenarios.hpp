#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beamsurfer/engine.hpp"
#include "beamsurfer/metrics.hpp"

namespace beamsurfer {

// TX at the origin facing +x, a reflecting wall along y = -2 and the mobile
// 5 m down the boresight facing back at it.
Environment default_scene();

enum class Mobility
{
  lateral,
  rotational,
  random_walk,
};

const char* to_string(Mobility mobility) noexcept;

MotionModel default_motion(Mobility mobility, std::uint64_t seed);

// 10 s run in the default scene with BeamSurfer and the oracle.
ScenarioConfig mobility_scenario(Mobility mobility, std::uint64_t seed, double duration_ms = 10000.0);

// One cell of the coherence-time grid: the pair aligned at t = 0 is held
// fixed while the mobile moves, and the RSS of that pair is tracked.
struct BctCell
{
  enum class Kind
  {
    lateral,
    rotational,
  };
  Kind kind = Kind::lateral;
  double speed = 1.4; // m/s or deg/s
  double distance_m = 5.0;
  std::string rx_codebook = "narrow";
};

struct BctResult
{
  BctCell cell;
  std::optional<double> bct_ms;
  std::vector<TimedRss> series;
};

BctResult simulate_bct(const BctCell& cell, double sample_ms = 10.0);

// 2 speeds x 2 distances x 2 codebooks for lateral motion, and
// 40/60/120/240 deg/s x 2 codebooks for rotation at 5 m.
std::vector<BctCell> bct_grid();

// Static mobile 2 m from TX-side wall geometry with one blocker crossing or
// appearing on the LoS at about 1 s. Geometry and blocker drawn from `seed`.
ScenarioConfig blockage_trial(std::uint64_t seed, bool with_wall = true);

} // namespace beamsurfer
